"""Right-hand side of the Green-Naghdi type system in the Camassa-Holm regime.

Unknowns are the interface deformation ``zeta`` and the shear mean velocity
``v``.  The system reads::

    d_t zeta + d_x(f(eps zeta) v) = 0
    T[eps zeta](d_t v + eps varsigma v v_x) + (gamma+delta) q1 zeta_x
        + eps q1 d_x(q3 v^2) + mu eps kappa d_x(v_x^2) = 0

with ``f(X) = (1-X)(1/delta+X) / (1-X+gamma(1/delta+X))`` and
``q3 = (f' - varsigma)/2``.  Two independent assemblies are provided: the
direct (divergence) form above and the condensed quasilinear form
``d_t U + (A0[U] + A1[U]) d_x U = 0``.
"""
from dataclasses import dataclass

import numpy as np

from .elliptic import DEFAULT_MAX_ITER, DEFAULT_TOL, TContext, pcg_solve
from .errors import H1Violated
from .grid import Field, State
from .params import check_H1


def f_of(X, gamma, delta):
    h1 = 1 - X
    h2 = 1 / delta + X
    return h1 * h2 / (h1 + gamma * h2)


def fp_of(X, gamma, delta):
    h1 = 1 - X
    h2 = 1 / delta + X
    return (h1 ** 2 - gamma * h2 ** 2) / (h1 + gamma * h2) ** 2


def fpp_of(X, gamma, delta):
    # N = h1^2 - gamma h2^2 has N' = -2 D with D = h1 + gamma h2, D' = gamma - 1
    h1 = 1 - X
    h2 = 1 / delta + X
    D = h1 + gamma * h2
    N = h1 ** 2 - gamma * h2 ** 2
    return -2 * (D ** 2 + (gamma - 1) * N) / D ** 3


@dataclass(frozen=True, eq=False)
class GNCoeffs:
    h1: np.ndarray
    h2: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    q3p: np.ndarray

    @classmethod
    def from_zeta(cls, zeta, p, c):
        z = np.asarray(getattr(zeta, "values", zeta))
        X = p.eps * z
        g, d = p.gamma, p.delta
        fp = fp_of(X, g, d)
        return cls(h1=1 - X, h2=1 / d + X, f=f_of(X, g, d), fp=fp,
                   q1=1 + c.kappa1 * X, q2=1 + c.kappa2 * X,
                   q3=0.5 * (fp - c.varsigma), q3p=0.5 * fpp_of(X, g, d))


class _Products:
    """Optional 2/3-rule truncation of nonlinear products."""

    def __init__(self, grid, on):
        self.grid, self.on = grid, on

    def __call__(self, a):
        return self.grid.dealias(a) if self.on else a


def _require_h1(zeta, p):
    rep = check_H1(zeta, p)
    if not rep.ok:
        raise H1Violated(f"h1_min = {rep.h1_min:.3g}, h2_min = {rep.h2_min:.3g}",
                         h1_min=rep.h1_min, h2_min=rep.h2_min)


def gn_rhs(U: State, p, c, dealias=True, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
           stats=None) -> State:
    """Time derivative of ``U`` from the direct form of the system."""
    _require_h1(U.zeta, p)
    g = U.grid
    eps = p.eps
    z, v = U.zeta.values, U.v.values
    co = GNCoeffs.from_zeta(z, p, c)
    prod = _Products(g, dealias)

    zx = g.deriv(z)
    vx = g.deriv(v)
    dzeta = -g.deriv(prod(co.f * v))

    forcing = ((p.gamma + p.delta) * co.q1 * zx
               + eps * co.q1 * g.deriv(prod(co.q3 * v * v))
               + p.mu * eps * c.kappa * g.deriv(prod(vx * vx)))
    ctx = TContext(g, co.q1, co.q2, p.mu * c.nu)
    w, it, res = pcg_solve(ctx, forcing, tol, max_iter)
    if stats is not None:
        stats.add(it, res)
    dv = -eps * c.varsigma * prod(v * vx) - w
    return State(Field(g, dzeta), Field(g, dv))


def gn_rhs_condensed(U: State, p, c, dealias=True, tol=DEFAULT_TOL,
                     max_iter=DEFAULT_MAX_ITER, stats=None) -> State:
    """Time derivative of ``U`` from ``-(A0[U] + A1[U]) d_x U``.

    Each block of ``A0``/``A1`` involving ``T^-1`` is inverted separately.
    """
    _require_h1(U.zeta, p)
    g = U.grid
    eps = p.eps
    z, v = U.zeta.values, U.v.values
    co = GNCoeffs.from_zeta(z, p, c)
    prod = _Products(g, dealias)
    zx = g.deriv(z)
    vx = g.deriv(v)

    dzeta = -(eps * prod(co.fp * v * zx) + prod(co.f * vx))

    ctx = TContext(g, co.q1, co.q2, p.mu * c.nu)
    Q0 = (p.gamma + p.delta) * co.q1
    Q1 = co.q1 * co.q3p * v * v
    # frak-Q applied to v_x: 2 q1 q3 v v_x + mu kappa d_x(v_x v_x)
    fq = 2 * prod(co.q1 * co.q3 * v * vx) + p.mu * c.kappa * g.deriv(prod(vx * vx))
    dv = -eps * c.varsigma * prod(v * vx)
    for rhs in (Q0 * zx, eps * fq, eps ** 2 * prod(Q1 * zx)):
        w, it, res = pcg_solve(ctx, rhs, tol, max_iter)
        if stats is not None:
            stats.add(it, res)
        dv = dv - w
    return State(Field(g, dzeta), Field(g, dv))


def linear_dispersion(k, p, c):
    """Phase speed ``1/sqrt(1 + mu nu k^2)`` of the linearization about rest."""
    return 1.0 / np.sqrt(1.0 + p.mu * c.nu * np.asarray(k, dtype=float) ** 2)


def right_moving_mode(grid, k_index, amplitude, p, c):
    """Linear right-moving eigenvector ``zeta = a cos(kx)``, ``v = (gamma+delta) c(k) zeta``."""
    k = 2 * np.pi * k_index / grid.length
    zeta = amplitude * np.cos(k * grid.x)
    v = (p.gamma + p.delta) * linear_dispersion(k, p, c) * zeta
    return State(Field(grid, zeta), Field(grid, v))


# -- classical Green-Naghdi operators (consistency checks only) ---------------

def _raw(a):
    return np.asarray(getattr(a, "values", a), dtype=float)


def classical_Q(h1, h2, V, gamma) -> Field:
    grid = V.grid
    a, b, w = _raw(h1), _raw(h2), _raw(V)
    D = a + gamma * b
    d = grid.deriv
    inner1 = d(b ** 3 * d(a * w / D))
    inner2 = d(a ** 3 * d(b * w / D))
    return Field(grid, -(a * inner1 + gamma * b * inner2) / (3 * a * b))


def classical_R(h1, h2, V, gamma) -> Field:
    grid = V.grid
    a, b, w = _raw(h1), _raw(h2), _raw(V)
    D = a + gamma * b
    d = grid.deriv
    u1 = d(a * w / D)
    u2 = d(b * w / D)
    first = 0.5 * ((b * u1) ** 2 - gamma * (a * u2) ** 2)
    second = w / (3 * D) * (a / b * d(b ** 3 * u1) - gamma * b / a * d(a ** 3 * u2))
    return Field(grid, first + second)


def expansion_Q(zeta: Field, v: Field, p, c) -> Field:
    """First-order expansion of ``Q[h1,h2] v`` in ``eps``."""
    d = zeta.grid.deriv
    z, w = zeta.values, v.values
    corr = ((c.beta - c.alpha) * w * d(z, 2) + (c.alpha + 2 * c.beta) * d(z * d(w))
            - c.beta * z * d(w, 2))
    return Field(zeta.grid, -c.nu_bar * d(w, 2) - p.eps * (p.gamma + p.delta) / 3 * corr)


def expansion_R(v: Field, c) -> Field:
    d = v.grid.deriv
    w = v.values
    return Field(v.grid, c.alpha * (0.5 * d(w) ** 2 + d(w, 2) * w / 3))


def _depths(zeta, p):
    return 1 - p.eps * zeta.values, 1 / p.delta + p.eps * zeta.values


def expansion_residual_Q(zeta: Field, v: Field, p, c, s=2.0) -> float:
    from .grid import sobolev_norm
    h1, h2 = _depths(zeta, p)
    return sobolev_norm(classical_Q(h1, h2, v, p.gamma) - expansion_Q(zeta, v, p, c), s)


def expansion_residual_R(zeta: Field, v: Field, p, c, s=2.0) -> float:
    from .grid import sobolev_norm
    h1, h2 = _depths(zeta, p)
    return sobolev_norm(classical_R(h1, h2, v, p.gamma) - expansion_R(v, c), s)


class GNSystem:
    """The system packed as a ``(2, n)`` array, with monitors for the integrator."""

    name = "gn"

    def __init__(self, grid, p, c, s=1.0, dealias=True, tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER, energy_form="es"):
        from .elliptic import SolverStats
        self.grid, self.p, self.c, self.s = grid, p, c, s
        self.dealias, self.tol, self.max_iter = dealias, tol, max_iter
        self.energy_form = energy_form
        self.stats = SolverStats()

    def rhs(self, y):
        U = State(Field(self.grid, y[0]), Field(self.grid, y[1]))
        dU = gn_rhs(U, self.p, self.c, self.dealias, self.tol, self.max_iter, self.stats)
        return dU.as_array()

    def max_speed(self, y):
        X = self.p.eps * y[0]
        fp_sup = float(np.max(np.abs(fp_of(X, self.p.gamma, self.p.delta))))
        return 1 + self.p.eps * float(np.max(np.abs(y[1]))) * max(abs(self.c.varsigma), fp_sup)

    def check(self, y, t):
        from .errors import ConditionLost
        from .params import check_H2
        h1 = check_H1(y[0], self.p)
        h2 = check_H2(y[0], self.p, self.c)
        if not (h1.ok and h2.ok):
            raise ConditionLost(f"condition lost at t={t:.6g}: h1_min={h1.h1_min:.3g}, "
                                f"h2_min={h1.h2_min:.3g}, q1_min={h2.q1_min:.3g}, q2_min={h2.q2_min:.3g}",
                                t=t, h1=h1, h2=h2)

    def to_state(self, y, t):
        return State(Field(self.grid, y[0]), Field(self.grid, y[1]))

    def size(self, y):
        from .grid import xs_norm
        return xs_norm(self.to_state(y, 0.0), self.s, self.p.mu)

    def record(self, y, t):
        from .diagnostics import DiagRecord, energy_Es
        from .grid import xs_norm
        from .params import check_H2
        U = self.to_state(y, t)
        h1 = check_H1(y[0], self.p)
        h2 = check_H2(y[0], self.p, self.c)
        iters = self.stats.iterations
        self.stats.reset()
        return DiagRecord(t=t, E_s=energy_Es(U, U, self.s, self.p, self.c, self.energy_form),
                          X_s=xs_norm(U, self.s, self.p.mu), mass=float(np.mean(y[0])),
                          h1_min=h1.h1_min, h2_min=h1.h2_min, q1_min=h2.q1_min, q2_min=h2.q2_min,
                          solver_iters=iters)
