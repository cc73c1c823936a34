"""Energy functional, norm-equivalence probes, growth-rate fits and twin-run metrics."""
from dataclasses import dataclass, field
import math

import numpy as np

from .elliptic import TContext
from .errors import Degenerate, H1Violated, H2Violated, Mismatch, ZeroState
from .grid import xs_norm
from .gn_model import f_of
from .params import check_H1, check_H2


@dataclass(frozen=True)
class DiagRecord:
    t: float
    E_s: float
    X_s: float
    mass: float
    h1_min: float
    h2_min: float
    q1_min: float
    q2_min: float
    solver_iters: int


@dataclass(frozen=True)
class CLDiagRecord:
    t: float
    mass_plus: float
    mass_minus: float
    max_abs: float


def _check_reference(zeta_ref, p, c):
    h1 = check_H1(zeta_ref, p)
    if not h1.ok:
        raise H1Violated(f"reference state: h1_min={h1.h1_min:.3g}, h2_min={h1.h2_min:.3g}")
    h2 = check_H2(zeta_ref, p, c)
    if not h2.ok:
        raise H2Violated(f"reference state: q1_min={h2.q1_min:.3g}, q2_min={h2.q2_min:.3g}")


def energy_blocks(U, Uref, s, p, c, form="es"):
    """Squared energy split into its ``zeta`` and ``v`` contributions.

    ``form="es"`` weights the ``v`` block by ``1/(gamma+delta)``;
    ``form="S"`` uses the symmetrizer blocks as they stand.
    """
    if form not in ("es", "S"):
        raise ValueError(f"unknown energy form {form!r}")
    if Uref is None:
        Uref = U
    _check_reference(Uref.zeta, p, c)
    g = U.grid
    zr = Uref.zeta.values
    X = p.eps * zr
    s_sum = p.gamma + p.delta
    weight = s_sum * (1 + c.kappa1 * X) / f_of(X, p.gamma, p.delta)
    sym = (1 + g.k ** 2) ** (s / 2)
    lz = g.apply_symbol(U.zeta.values, sym)
    lv = g.apply_symbol(U.v.values, sym)
    ctx = TContext.from_zeta(Uref.zeta, p, c)
    ez = g.inner(lz, weight * lz)
    ev = g.inner(lv, ctx.apply(lv))
    if form == "es":
        ev /= s_sum
    return ez, ev


def energy_Es(U, Uref, s, p, c, form="es") -> float:
    ez, ev = energy_blocks(U, Uref, s, p, c, form)
    return math.sqrt(max(ez + ev, 0.0))


def equivalence_ratio(U, Uref, s, p, c, form="es") -> float:
    """``E^s(U) / |U|_{X^s}``."""
    xs = xs_norm(U, s, p.mu)
    if xs == 0:
        raise ZeroState("equivalence ratio undefined for the zero state")
    return energy_Es(U, Uref, s, p, c, form) / xs


def equivalence_bounds(states, Uref, s, p, c, form="es"):
    ratios = [equivalence_ratio(U, Uref, s, p, c, form) for U in states]
    return min(ratios), max(ratios)


def fit_growth_rate(t, E, eps=None) -> float:
    """Least-squares slope of ``log E`` against ``t``, divided by ``eps`` when given."""
    t = np.asarray(t, dtype=float)
    E = np.asarray(E, dtype=float)
    if t.size < 3 or t.size != E.size:
        raise Degenerate(f"need >= 3 matched samples, got {t.size}/{E.size}")
    if np.any(~(E > 0)):
        raise Degenerate("energies must be positive")
    slope = np.polyfit(t, np.log(E), 1)[0]
    if eps:
        slope /= eps
    return float(slope)


@dataclass
class TwinReport:
    t: np.ndarray
    diff: np.ndarray
    rate: float
    extra: dict = field(default_factory=dict)


def twin_divergence(traj1, traj2, s, mu, eps=None) -> TwinReport:
    """``|U1 - U2|_{X^s}`` at the common sample times, plus a fitted exponential rate."""
    if len(traj1.times) != len(traj2.times) or not np.allclose(traj1.times, traj2.times, rtol=0, atol=1e-12):
        raise Mismatch("trajectories have different sample times")
    if traj1.states[0].grid != traj2.states[0].grid:
        raise Mismatch("trajectories live on different grids")
    t = np.asarray(traj1.times, dtype=float)
    diff = np.array([xs_norm(a - b, s, mu) for a, b in zip(traj1.states, traj2.states)])
    pos = diff > 0
    rate = fit_growth_rate(t[pos], diff[pos], eps) if pos.sum() >= 3 else 0.0
    return TwinReport(t, diff, rate)
