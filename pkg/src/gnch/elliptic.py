"""The variable-coefficient operator ``T[eps zeta]`` and constant-coefficient Helmholtz inverses.

``T[eps zeta] V = q1 V - mu nu d_x(q2 d_x V)`` with ``q_i = 1 + eps kappa_i zeta``.
It is symmetric and, under the ellipticity condition, coercive on
``H^1_mu``; it is inverted by preconditioned conjugate gradients, using the
exact inverse of its constant-coefficient part as preconditioner.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import H2Violated, NoConvergence, SingularSymbol
from .grid import Field

DEFAULT_TOL = 1e-11
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True, eq=False)
class TContext:
    grid: object
    q1: np.ndarray
    q2: np.ndarray
    mu_nu: float
    _precond: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_precond", 1.0 / (1.0 + self.mu_nu * self.grid.k ** 2))

    @classmethod
    def from_zeta(cls, zeta: Field, p, c):
        z = zeta.values
        return cls(zeta.grid, 1 + p.eps * c.kappa1 * z, 1 + p.eps * c.kappa2 * z, p.mu * c.nu)

    @property
    def q1_min(self):
        return float(np.min(self.q1))

    @property
    def q2_min(self):
        return float(np.min(self.q2))

    def apply(self, v):
        g = self.grid
        return self.q1 * v - self.mu_nu * g.deriv(self.q2 * g.deriv(v))

    def precondition(self, r):
        return self.grid.apply_symbol(r, self._precond)


@dataclass
class SolverStats:
    """Running tally of linear solves; shared by the stages of one RHS evaluation."""

    solves: int = 0
    iterations: int = 0
    max_residual: float = 0.0

    def add(self, iters, residual):
        self.solves += 1
        self.iterations += iters
        self.max_residual = max(self.max_residual, residual)

    def reset(self):
        self.solves = self.iterations = 0
        self.max_residual = 0.0


def apply_T(ctx: TContext, v: Field) -> Field:
    if v.grid != ctx.grid:
        raise ValueError("grid mismatch")
    return Field(ctx.grid, ctx.apply(v.values))


def pcg_solve(ctx: TContext, b, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Solve ``T x = b`` on raw arrays.  Returns ``(x, iterations, relative_residual)``."""
    if ctx.q1_min <= 0 or ctx.q2_min <= 0:
        raise H2Violated(f"min q1 = {ctx.q1_min:.3g}, min q2 = {ctx.q2_min:.3g}",
                         q1_min=ctx.q1_min, q2_min=ctx.q2_min)
    if tol <= 0:
        raise ValueError("tol must be > 0")
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b)
    if bnorm == 0:
        return x, 0, 0.0
    r = np.array(b, dtype=float)
    z = ctx.precondition(r)
    d = z.copy()
    rz = np.dot(r, z)
    for it in range(1, max_iter + 1):
        Ad = ctx.apply(d)
        a = rz / np.dot(d, Ad)
        x += a * d
        r -= a * Ad
        res = np.linalg.norm(r) / bnorm
        if res <= tol:
            # confirm on the true residual; the recursive one drifts slightly
            res = np.linalg.norm(b - ctx.apply(x)) / bnorm
            if res <= tol:
                return x, it, res
            r = b - ctx.apply(x)
        z = ctx.precondition(r)
        rz_new = np.dot(r, z)
        d = z + (rz_new / rz) * d
        rz = rz_new
    raise NoConvergence(f"PCG did not reach tol={tol:g} in {max_iter} iterations (res={res:.3g})",
                        iterations=max_iter, residual=res)


def invert_T(ctx: TContext, f: Field, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
             stats: SolverStats = None) -> Field:
    if f.grid != ctx.grid:
        raise ValueError("grid mismatch")
    x, it, res = pcg_solve(ctx, f.values, tol, max_iter)
    if stats is not None:
        stats.add(it, res)
    return Field(ctx.grid, x)


def helmholtz_symbol(grid, c):
    sym = 1.0 + c * grid.k ** 2
    if np.any(sym <= 0):
        raise SingularSymbol(f"1 + c k^2 <= 0 on resolved modes (c = {c!r}, k_max = {grid.k_max:.6g})",
                             c=c)
    return sym


def invert_helmholtz(c: float, f: Field) -> Field:
    """Apply ``(1 - c d_x^2)^-1`` exactly in Fourier space."""
    if c == 0:
        return f
    return Field(f.grid, f.grid.apply_symbol(f.values, 1.0 / helmholtz_symbol(f.grid, c)))


def apply_helmholtz(c: float, f: Field) -> Field:
    """Apply ``(1 - c d_x^2)``; the forward counterpart of :func:`invert_helmholtz`."""
    if c == 0:
        return f
    return Field(f.grid, f.grid.apply_symbol(f.values, 1.0 + c * f.grid.k ** 2))
