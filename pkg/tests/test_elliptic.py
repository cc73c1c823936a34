import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gnch import (Field, Grid, RegimeParams, SolverStats, TContext, apply_T, apply_helmholtz,
                  derive_constants, h1mu_norm, invert_T, invert_helmholtz, pcg_solve)
from gnch.errors import H2Violated, NoConvergence, SingularSymbol
from gnch.profiles import random_smooth

G = Grid(2 * math.pi, 128)
P = RegimeParams(0.1, 0.1, 1.0, 0.0)
C = derive_constants(P)


def _ctx(zeta):
    return TContext.from_zeta(Field(G, zeta), P, C)


def test_apply_on_rest_state_mode():
    k = 3
    v = Field(G, np.sin(k * G.x))
    out = apply_T(_ctx(np.zeros(G.n)), v)
    assert np.max(np.abs(out.values - (1 + P.mu * C.nu * k * k) * v.values)) < 1e-12


def test_apply_on_constant():
    z = 0.5 * np.cos(G.x)
    out = apply_T(_ctx(z), Field(G, np.full(G.n, 2.0)))
    assert np.max(np.abs(out.values - (1 + P.eps * C.kappa1 * z) * 2.0)) < 1e-12


def test_rest_state_inverse_is_one_iteration():
    k = 4
    f = (1 + P.mu * C.nu * k * k) * np.sin(k * G.x)
    x, it, res = pcg_solve(_ctx(np.zeros(G.n)), f)
    assert it == 1 and np.max(np.abs(x - np.sin(k * G.x))) < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31))
def test_symmetry_coercivity_roundtrip(seed):
    rng = np.random.default_rng(seed)
    zeta = random_smooth(G, rng, amplitude=1.0)
    u, w, v = (random_smooth(G, rng, modes=8) for _ in range(3))
    ctx = TContext.from_zeta(zeta, P, C)
    Tu, Tw, Tv = ctx.apply(u.values), ctx.apply(w.values), ctx.apply(v.values)
    nu, nw = math.sqrt(G.inner(u.values, u.values)), math.sqrt(G.inner(w.values, w.values))
    assert abs(G.inner(Tu, w.values) - G.inner(u.values, Tw)) <= 1e-10 * nu * nw
    h02 = min(ctx.q1_min, ctx.q2_min)
    assert G.inner(Tv, v.values) >= h02 * min(1, C.nu) * h1mu_norm(v, P.mu) ** 2 - 1e-9
    back = invert_T(ctx, Field(G, Tv))
    assert np.max(np.abs(back.values - v.values)) <= 1e-9


def test_invert_constant_rhs_checked_by_apply():
    ctx = _ctx(0.8 * np.sin(G.x) ** 3)
    stats = SolverStats()
    out = invert_T(ctx, Field(G, np.full(G.n, 1.5)), stats=stats)
    assert np.max(np.abs(ctx.apply(out.values) - 1.5)) < 1e-9
    assert stats.solves == 1 and stats.iterations > 0


def test_invert_requires_ellipticity():
    ctx = TContext.from_zeta(Field(G, np.full(G.n, -20.0)), P.replace(eps=0.5), C)
    with pytest.raises(H2Violated):
        invert_T(ctx, Field(G, np.ones(G.n)))


def test_no_convergence():
    ctx = _ctx(0.9 * np.cos(G.x))
    with pytest.raises(NoConvergence):
        pcg_solve(ctx, np.sin(G.x) + np.cos(5 * G.x), tol=1e-14, max_iter=1)


def test_helmholtz():
    f = Field(G, np.sin(3 * G.x))
    assert invert_helmholtz(0.0, f) is f
    out = invert_helmholtz(0.2, f)
    assert np.max(np.abs(out.values - f.values / (1 + 0.2 * 9))) < 1e-14
    assert np.max(np.abs(invert_helmholtz(0.2, apply_helmholtz(0.2, f)).values - f.values)) < 1e-13
    mu_lam = 1.0 / G.k_max ** 2
    with pytest.raises(SingularSymbol):
        invert_helmholtz(-mu_lam, f)
