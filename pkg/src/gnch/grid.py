"""Periodic grid, spectral differentiation, Bessel-potential multipliers and norms.

All transforms are real FFTs (``numpy.fft.rfft``).  Odd-order derivatives
zero the Nyquist mode so that ``ddx`` stays skew-adjoint for the discrete
inner product.
"""
from dataclasses import dataclass, field
import csv

import numpy as np


@dataclass(frozen=True)
class Grid:
    length: float
    n: int
    _k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 16 or self.n % 2:
            raise ValueError(f"n must be even and >= 16, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"length must be > 0, got {self.length}")
        k = 2 * np.pi / self.length * np.arange(self.n // 2 + 1)
        k.setflags(write=False)
        object.__setattr__(self, "_k", k)

    @property
    def dx(self):
        return self.length / self.n

    @property
    def x(self):
        return np.arange(self.n) * self.dx

    @property
    def k(self):
        """Non-negative wavenumbers of the real transform, ``2*pi*j/L``, j = 0..n/2."""
        return self._k

    @property
    def wavenumbers(self):
        """All resolved wavenumbers ``2*pi*j/L`` for j = -n/2..n/2-1 (FFT ordering)."""
        return 2 * np.pi / self.length * np.fft.fftfreq(self.n, 1.0 / self.n)

    @property
    def k_max(self):
        return self._k[-1]

    # -- kernels on raw arrays -------------------------------------------

    def fft(self, a):
        return np.fft.rfft(a)

    def ifft(self, ah):
        return np.fft.irfft(ah, n=self.n)

    def deriv(self, a, order=1):
        if order == 0:
            return np.array(a, dtype=float)
        sym = (1j * self._k) ** order
        if order % 2:
            sym[-1] = 0.0
        return self.ifft(sym * self.fft(a))

    def apply_symbol(self, a, symbol):
        """Multiply the transform of ``a`` by ``symbol`` (sampled on ``self.k``)."""
        return self.ifft(symbol * self.fft(a))

    def dealias_mask(self):
        return np.arange(self.n // 2 + 1) <= self.n // 3

    def dealias(self, a):
        ah = self.fft(a)
        ah[~self.dealias_mask()] = 0.0
        return self.ifft(ah)

    def inner(self, a, b):
        return self.dx * float(np.dot(a, b))

    def _parseval_weights(self):
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = w[-1] = 1.0
        return w

    def sobolev_norm2(self, a, s=0.0):
        ah = self.fft(a)
        wt = self._parseval_weights() * (1 + self._k ** 2) ** s
        return self.dx / self.n * float(np.sum(wt * np.abs(ah) ** 2))

    def translate(self, a, shift):
        """Exact periodic translation ``a(x - shift)`` via modal phase factors."""
        ph = np.exp(-1j * self._k * shift)
        ph[-1] = np.cos(self._k[-1] * shift)
        return self.ifft(ph * self.fft(a))


@dataclass(frozen=True, eq=False)
class Field:
    """Real nodal values on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, fn(grid.x))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n))

    @property
    def hat(self):
        return self.grid.fft(self.values)

    def _other(self, other):
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / self._other(other))

    def __neg__(self):
        return Field(self.grid, -self.values)

    def mean(self):
        return float(np.mean(self.values))

    def sup(self):
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class State:
    """Interface deformation ``zeta`` and shear mean velocity ``v``."""

    zeta: Field
    v: Field

    def __post_init__(self):
        if self.zeta.grid != self.v.grid:
            raise ValueError("zeta and v live on different grids")

    @property
    def grid(self):
        return self.zeta.grid

    def as_array(self):
        return np.stack([self.zeta.values, self.v.values])

    @classmethod
    def from_array(cls, grid, arr):
        return cls(Field(grid, arr[0]), Field(grid, arr[1]))

    @classmethod
    def zeros(cls, grid):
        return cls(Field.zeros(grid), Field.zeros(grid))

    def __sub__(self, other):
        return State(self.zeta - other.zeta, self.v - other.v)

    def __add__(self, other):
        return State(self.zeta + other.zeta, self.v + other.v)

    def __mul__(self, a):
        return State(self.zeta * a, self.v * a)

    __rmul__ = __mul__


def ddx(f: Field) -> Field:
    return Field(f.grid, f.grid.deriv(f.values, 1))


def ddx2(f: Field) -> Field:
    return Field(f.grid, f.grid.deriv(f.values, 2))


def ddx3(f: Field) -> Field:
    return Field(f.grid, f.grid.deriv(f.values, 3))


def lambda_s(f: Field, s: float) -> Field:
    """Apply ``(1 - d_x^2)^(s/2)``, i.e. the multiplier ``(1 + k^2)^(s/2)``."""
    if s == 0:
        return f
    return Field(f.grid, f.grid.apply_symbol(f.values, (1 + f.grid.k ** 2) ** (s / 2)))


def sobolev_norm(f: Field, s: float = 0.0) -> float:
    return float(np.sqrt(f.grid.sobolev_norm2(f.values, s)))


def h1mu_norm(f: Field, mu: float) -> float:
    g = f.grid
    return float(np.sqrt(g.sobolev_norm2(f.values) + mu * g.sobolev_norm2(g.deriv(f.values))))


def xs_terms(U: State, s: float, mu: float):
    """The three squared contributions ``|zeta|_s^2, |v|_s^2, mu |v_x|_s^2``."""
    g = U.grid
    return (g.sobolev_norm2(U.zeta.values, s),
            g.sobolev_norm2(U.v.values, s),
            mu * g.sobolev_norm2(g.deriv(U.v.values), s))


def xs_norm(U: State, s: float, mu: float) -> float:
    return float(np.sqrt(sum(xs_terms(U, s, mu))))


def dealias(f: Field) -> Field:
    """2/3-rule truncation: zero every mode with ``|j| > n/3``."""
    return Field(f.grid, f.grid.dealias(f.values))


def write_field_csv(path, f: Field, name="value"):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", name])
        for xi, vi in zip(f.grid.x, f.values):
            w.writerow([f"{xi:.17g}", f"{vi:.17g}"])


def read_field_csv(path, grid: Grid) -> Field:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != grid.n or not np.allclose(data[:, 0], grid.x, rtol=0, atol=1e-12 * grid.length):
        raise ValueError(f"{path}: nodes do not match grid")
    return Field(grid, data[:, 1])
