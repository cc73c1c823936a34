import math

import numpy as np
import pytest

from gnch import (Field, GNSystem, Grid, RegimeParams, State, StepConfig, Trajectory,
                  derive_constants, energy_Es, equivalence_bounds, equivalence_ratio,
                  fit_growth_rate, right_moving_mode, rk4_step, run, twin_divergence)
from gnch.diagnostics import energy_blocks
from gnch.errors import Blowup, ConditionLost, Degenerate, Mismatch, ZeroState
from gnch.integrator import plan_steps
from gnch.profiles import random_smooth

G = Grid(2 * math.pi, 64)
P = RegimeParams(0.1, 0.1, 1.0, 0.0)
C = derive_constants(P)


def test_rk4_zero_rhs_and_linear_decay():
    y = np.arange(4.0)
    assert np.array_equal(rk4_step(y, 0.1, lambda u: np.zeros_like(u)), y)
    errs = []
    for dt in (0.1, 0.05):
        errs.append(abs(rk4_step(np.array([1.0]), dt, lambda u: -u)[0] - math.exp(-dt)))
    assert 25 < errs[0] / errs[1] < 40  # local error O(dt^5)


def test_plan_lands_on_t_end():
    sys_ = GNSystem(G, P, C)
    n, dt = plan_steps(sys_, State.zeros(G).as_array(), StepConfig(0.3, 1.0, cfl=0))
    assert n == 4 and math.isclose(n * dt, 1.0)


def test_zero_state_trajectory():
    tr = run(GNSystem(G, P, C), State.zeros(G), StepConfig(0.1, 1.0))
    assert all(not s.as_array().any() for s in tr.states)
    assert len({(r.h1_min, r.q2_min) for r in tr.records}) == 1


def test_tiny_mode_long_run():
    g = Grid(1.0, 64)
    U0 = right_moving_mode(g, 1, 1e-6, P, C)
    tr = run(GNSystem(g, P, C, energy_form="S"), U0, StepConfig(0.02, 10.0, sample_every=50))
    m = [r.mass for r in tr.records]
    assert max(abs(x - m[0]) for x in m) / 10 <= 1e-12
    E = np.array([r.E_s for r in tr.records])
    assert np.max(np.abs(E / E[0] - 1)) < 1e-5


def test_condition_lost_reports_time():
    p = RegimeParams(0.1, 0.9, 1.0, 0.0)
    c = derive_constants(p)
    g = Grid(20.0, 128)
    z = 0.3 * np.exp(-(g.x - 10) ** 2)
    U0 = State(Field(g, z), Field(g, 3.0 * z))
    with pytest.raises(ConditionLost) as ei:
        run(GNSystem(g, p, c), U0, StepConfig(0.01, 20.0))
    assert ei.value.t is not None and ei.value.t > 0


def test_condition_lost_at_start():
    p = RegimeParams(0.1, 0.5, 1.0, 0.0)
    U0 = State(Field(G, np.full(G.n, 1.0) - 2 * np.cos(G.x)), Field.zeros(G))
    with pytest.raises(ConditionLost):
        run(GNSystem(G, p, derive_constants(p)), U0, StepConfig(0.1, 1.0))


def test_blowup_ceiling():
    U0 = State(Field(G, 0.1 * np.cos(G.x)), Field(G, 0.1 * np.sin(G.x)))
    with pytest.raises(Blowup):
        run(GNSystem(G, P, C), U0, StepConfig(0.1, 1.0, xs_ceiling=1e-3))


def test_determinism():
    U0 = State(Field(G, 0.2 * np.cos(G.x)), Field(G, 0.1 * np.sin(G.x)))
    a = run(GNSystem(G, P, C), U0, StepConfig(0.05, 0.5))
    b = run(GNSystem(G, P, C), U0, StepConfig(0.05, 0.5))
    assert np.array_equal(a.states[-1].as_array(), b.states[-1].as_array())


def test_energy_at_rest_reference():
    rng = np.random.default_rng(3)
    U = State(random_smooth(G, rng), random_smooth(G, rng))
    ref = State.zeros(G)
    for p in (P, RegimeParams(0.1, 0.1, 0.5, 0.25)):
        c = derive_constants(p)
        s_ = p.gamma + p.delta
        zz = G.inner(U.zeta.values, U.zeta.values)
        vv = G.inner(U.v.values, U.v.values)
        vx = G.deriv(U.v.values)
        hand = s_ ** 2 * zz + (vv + p.mu * c.nu * G.inner(vx, vx)) / s_
        assert math.isclose(energy_Es(U, ref, 0, p, c) ** 2, hand, rel_tol=1e-12)
        ez, ev = energy_blocks(U, ref, 0, p, c, form="S")
        assert math.isclose(ez + ev, s_ ** 2 * zz + vv + p.mu * c.nu * G.inner(vx, vx), rel_tol=1e-12)
    assert energy_Es(State.zeros(G), None, 1, P, C) == 0


def test_energy_positive_and_monotone_in_s():
    U = State(Field(G, 0.3 * np.cos(G.x)), Field(G, 0.2 * np.cos(G.x)))
    e0, e1 = energy_Es(U, None, 0, P, C), energy_Es(U, None, 1, P, C)
    assert 0 < e0 < e1


def test_equivalence_ratio():
    with pytest.raises(ZeroState):
        equivalence_ratio(State.zeros(G), State.zeros(G), 1, P, C)
    rng = np.random.default_rng(11)
    ref = State(random_smooth(G, rng, amplitude=0.5), Field.zeros(G))
    states = [State(random_smooth(G, rng), random_smooth(G, rng)) for _ in range(100)]
    lo, hi = equivalence_bounds(states, ref, 1, P, C)
    assert 0 < lo <= hi < np.inf
    # closed form at rest with mu*nu = 1 on one mode, zeta block only
    p = RegimeParams(3.0, 0.1, 1.0, 0.0)
    c = derive_constants(p)
    U = State(Field(G, np.cos(2 * G.x)), Field.zeros(G))
    assert math.isclose(equivalence_ratio(U, State.zeros(G), 1, p, c), 1.0, rel_tol=1e-12)
    U = State(Field.zeros(G), Field(G, np.cos(2 * G.x)))
    expect = math.sqrt((1 + 4) / (1 + 3 * 4))  # (1 + mu nu k^2)/(1 + mu k^2), gamma+delta = 1
    assert math.isclose(equivalence_ratio(U, State.zeros(G), 0, p, c), expect, rel_tol=1e-12)


def test_fit_growth_rate():
    t = np.linspace(0, 10, 11)
    assert abs(fit_growth_rate(t, np.full(11, 2.0))) < 1e-14
    eps = 0.1
    assert abs(fit_growth_rate(t, 3 * np.exp(0.3 * eps * t), eps) - 0.3) <= 1e-10
    with pytest.raises(Degenerate):
        fit_growth_rate([0, 1], [1, 2])
    with pytest.raises(Degenerate):
        fit_growth_rate([0, 1, 2], [1, 0, 2])


def test_twin_divergence():
    U0 = State(Field(G, 0.2 * np.cos(G.x)), Field(G, 0.1 * np.sin(G.x)))
    a = run(GNSystem(G, P, C), U0, StepConfig(0.05, 0.5))
    b = run(GNSystem(G, P, C), U0, StepConfig(0.05, 0.5))
    rep = twin_divergence(a, b, 1, P.mu)
    assert not rep.diff.any() and rep.rate == 0
    c = run(GNSystem(G, P, C), U0, StepConfig(0.05, 1.0))
    with pytest.raises(Mismatch):
        twin_divergence(a, c, 1, P.mu)
    with pytest.raises(Mismatch):
        twin_divergence(a, Trajectory(a.times, [State.zeros(Grid(1.0, 64))] * len(a.times)), 1, P.mu)
