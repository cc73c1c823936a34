"""Constantin-Lannes decoupled approximation.

Two scalar BBM-type equations, one per direction, evolved in the
``v^lambda`` variable and mapped back to ``(zeta, v)`` through

    zeta = v+(t, x - t) + v-(t, x + t),  v = (gamma+delta)(v+(t, x - t) - v-(t, x + t))

with ``v+- = (1 +- mu lambda d_x^2)^-1 v+-^lambda``.
"""
from dataclasses import dataclass

import numpy as np

from .elliptic import apply_helmholtz, helmholtz_symbol, invert_helmholtz
from .errors import NutNonpositive
from .grid import Field, State


@dataclass(frozen=True)
class CLParams:
    theta: float = 1.0
    lam: float = 0.0


@dataclass(frozen=True)
class CLConstants:
    alpha1: float
    alpha2: float
    alpha3: float
    nu_t: float
    nu_x: float
    kappa1_cl: float
    kappa2_cl: float


def derive_cl_constants(p, clp: CLParams = CLParams()) -> CLConstants:
    g, d = p.gamma, p.delta
    th, lam = clp.theta, clp.lam
    crit = d * d - g
    a1 = 1.5 * crit / (g + d)
    a2 = -3 * g * d * (d + 1) ** 2 / (g + d) ** 2
    a3 = -5 * d * d * (d + 1) ** 2 * g * (1 - g) / (g + d) ** 3
    base = (1 + g * d) / (d * (d + g))
    nu_t = th / 6 * base + lam
    nu_x = (1 - th) / 6 * base - p.bo_inv / 2 - lam
    common = (1 + g * d) * crit / (3 * d * (g + d) ** 2) * (1 + (1 - th) / 4)
    k1 = common - (1 - g) / (6 * (g + d)) + lam * 1.5 * crit / (g + d)
    k2 = common - (1 - g) / (12 * (g + d))
    if not nu_t > 0:
        raise NutNonpositive(f"nu_t = {nu_t!r} <= 0 for theta={th!r}, lambda={lam!r}", nu_t=nu_t)
    return CLConstants(a1, a2, a3, nu_t, nu_x, k1, k2)


@dataclass(frozen=True, eq=False)
class CLState:
    vplus_lambda: Field
    vminus_lambda: Field
    t: float = 0.0

    def __post_init__(self):
        if self.vplus_lambda.grid != self.vminus_lambda.grid:
            raise ValueError("v+ and v- live on different grids")

    @property
    def grid(self):
        return self.vplus_lambda.grid

    def as_array(self):
        return np.stack([self.vplus_lambda.values, self.vminus_lambda.values])

    @classmethod
    def from_array(cls, grid, arr, t=0.0):
        return cls(Field(grid, arr[0]), Field(grid, arr[1]), t)


def _cl_rhs_raw(grid, w, direction, p, clc, dealias):
    d = grid.deriv
    prod = grid.dealias if dealias else (lambda a: a)
    eps, mu = p.eps, p.mu
    wx = d(w)
    nonlinear = (eps * clc.alpha1 * prod(w * wx)
                 + eps ** 2 * clc.alpha2 * prod(w * w * wx)
                 + eps ** 3 * clc.alpha3 * prod(w ** 3 * wx))
    disp = mu * clc.nu_x * d(w, 3)
    mixed = mu * eps * d(prod(clc.kappa1_cl * w * d(w, 2) + clc.kappa2_cl * wx * wx))
    total = nonlinear + disp + mixed
    return -direction * grid.apply_symbol(total, 1.0 / (1.0 + mu * clc.nu_t * grid.k ** 2))


def cl_rhs(vlam: Field, direction: int, p, clc: CLConstants, dealias=True) -> Field:
    """``d_t v^lambda`` for the right-going (+1) or left-going (-1) equation."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if not clc.nu_t > 0:
        raise NutNonpositive(f"nu_t = {clc.nu_t!r} <= 0")
    return Field(vlam.grid, _cl_rhs_raw(vlam.grid, vlam.values, direction, p, clc, dealias))


def cl_init_split(zeta0: Field, v0: Field, p, clp: CLParams = CLParams()) -> CLState:
    s = p.gamma + p.delta
    vp = 0.5 * (zeta0 + v0 / s)
    vm = 0.5 * (zeta0 - v0 / s)
    c = p.mu * clp.lam
    if c:
        # the reconstruction must be able to invert the same symbols
        helmholtz_symbol(zeta0.grid, -c)
        helmholtz_symbol(zeta0.grid, c)
    # (1 + mu lam d_x^2) is (1 - c d_x^2) with c = -mu lam
    return CLState(apply_helmholtz(-c, vp), apply_helmholtz(c, vm), 0.0)


def cl_reconstruct(s: CLState, p, clp: CLParams = CLParams()) -> State:
    c = p.mu * clp.lam
    vp = invert_helmholtz(-c, s.vplus_lambda)
    vm = invert_helmholtz(c, s.vminus_lambda)
    g = s.grid
    right = Field(g, g.translate(vp.values, s.t))
    left = Field(g, g.translate(vm.values, -s.t))
    return State(right + left, (p.gamma + p.delta) * (right - left))


class CLSystem:
    """Both directions packed as a ``(2, n)`` array for the time integrator."""

    name = "cl"

    def __init__(self, grid, p, clp=CLParams(), dealias=True):
        self.grid, self.p, self.clp, self.dealias = grid, p, clp, dealias
        self.clc = derive_cl_constants(p, clp)

    def rhs(self, y):
        g = self.grid
        return np.stack([_cl_rhs_raw(g, y[0], 1, self.p, self.clc, self.dealias),
                         _cl_rhs_raw(g, y[1], -1, self.p, self.clc, self.dealias)])

    def max_speed(self, y):
        eps = self.p.eps
        c = self.clc
        w = np.max(np.abs(y))
        return 1 + eps * w * (abs(c.alpha1) + eps * w * abs(c.alpha2) + (eps * w) ** 2 * abs(c.alpha3))

    def check(self, y, t):
        pass

    def size(self, y):
        g = self.grid
        return float(np.sqrt(g.sobolev_norm2(y[0], 1) + g.sobolev_norm2(y[1], 1)))

    def to_state(self, y, t):
        return CLState.from_array(self.grid, y, t)

    def record(self, y, t):
        from .diagnostics import CLDiagRecord
        return CLDiagRecord(t=t, mass_plus=float(np.mean(y[0])), mass_minus=float(np.mean(y[1])),
                            max_abs=float(np.max(np.abs(y))))
