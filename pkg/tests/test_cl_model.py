import math

import numpy as np
import pytest

from gnch import (CLParams, CLState, CLSystem, Field, Grid, RegimeParams, State, StepConfig,
                  cl_init_split, cl_reconstruct, cl_rhs, derive_cl_constants, run)
from gnch.errors import NutNonpositive, SingularSymbol

import oracle

G = Grid(20.0, 128)


def _close(a, b):
    return abs(a - float(b)) <= 1e-14 * max(1.0, abs(float(b)))


def test_symmetric_case_hand_values():
    clc = derive_cl_constants(RegimeParams(0.1, 0.1, 1.0, 0.0))
    for name, val in oracle.HAND_CL_SYMMETRIC.items():
        assert _close(getattr(clc, name), val), name


@pytest.mark.parametrize("gamma,delta,theta,lam", [
    (0.25, 0.5, 1.0, 0.0), (0.1, 1.5, 0.5, 0.02), (0.6, 0.9, 0.0, 0.3), (0.0, 2.0, 1.0, -0.01)])
def test_against_exact_oracle(gamma, delta, theta, lam):
    clc = derive_cl_constants(RegimeParams(0.1, 0.1, delta, gamma), CLParams(theta, lam))
    ref = oracle.cl_constants(gamma, delta, theta, lam)
    for name, val in ref.items():
        assert abs(getattr(clc, name) - float(val)) <= 1e-13 * max(1, abs(float(val))), name


def test_critical_ratio_kills_quadratic_term():
    assert derive_cl_constants(RegimeParams(0.1, 0.1, 0.5, 0.25)).alpha1 == 0


def test_negative_nu_t():
    p = RegimeParams(0.1, 0.1, 0.5, 0.25)
    base = (1 + 0.125) / (0.5 * 0.75)
    with pytest.raises(NutNonpositive):
        derive_cl_constants(p, CLParams(1.0, -base / 6 - 1e-6))


def test_zero_field_rhs():
    p = RegimeParams(0.1, 0.1, 1.0, 0.0)
    out = cl_rhs(Field.zeros(G), 1, p, derive_cl_constants(p))
    assert not out.values.any()


def test_linear_mode_matches_exact_solution():
    p = RegimeParams(0.1, 0.0, 1.0, 0.0)
    clp = CLParams(0.5, 0.0)
    clc = derive_cl_constants(p, clp)
    assert clc.nu_x != 0
    k = 2 * math.pi * 3 / G.length
    w0 = np.sin(k * G.x)
    t = 2.0
    sys_ = CLSystem(G, p, clp)
    U = CLState(Field(G, w0), Field(G, w0))
    tr = run(sys_, U, StepConfig(0.01, t, cfl=0))
    om = -clc.nu_x * p.mu * k ** 3 / (1 + p.mu * clc.nu_t * k * k)  # right-going: phase speed om/k
    speed = om / k
    exact_plus = np.sin(k * (G.x - speed * t))
    exact_minus = np.sin(k * (G.x + speed * t))
    last = tr.states[-1]
    assert np.max(np.abs(last.vplus_lambda.values - exact_plus)) < 1e-9
    assert np.max(np.abs(last.vminus_lambda.values - exact_minus)) < 1e-9


def test_bbm_reduction_conserves_momentum():
    p = RegimeParams(0.1, 0.3, 1.0, 0.0)
    clc = derive_cl_constants(p)
    assert clc.alpha2 == 0 and clc.alpha3 == 0 and clc.nu_x == 0
    w = Field(G, np.exp(-(G.x - 10) ** 2))
    sys_ = CLSystem(G, p)
    tr = run(sys_, CLState(w, Field.zeros(G)), StepConfig(0.02, 3.0))
    m = [r.mass_plus for r in tr.records]
    assert max(abs(x - m[0]) for x in m) <= 1e-12


def test_init_split_and_reconstruct():
    p = RegimeParams(0.1, 0.1, 0.5, 0.25)
    z = Field(G, np.exp(-(G.x - 10) ** 2))
    s = cl_init_split(Field.zeros(G), Field.zeros(G), p)
    assert not s.as_array().any()
    s = cl_init_split(z, (p.gamma + p.delta) * z, p)
    assert np.max(np.abs(s.vminus_lambda.values)) < 1e-15
    v0 = Field(G, np.sin(2 * math.pi * G.x / G.length))
    for clp in (CLParams(), CLParams(1.0, 0.02)):
        s = cl_init_split(z, v0, p, clp)
        back = cl_reconstruct(s, p, clp)
        assert np.max(np.abs(back.zeta.values - z.values)) <= 1e-12
        assert np.max(np.abs(back.v.values - v0.values)) <= 1e-12
    s = cl_init_split(z, v0, p)
    vp, vm = 0.5 * (z + v0 / 0.75), 0.5 * (z - v0 / 0.75)
    assert np.max(np.abs(s.vplus_lambda.values - vp.values)) < 1e-15
    t0 = cl_reconstruct(s, p)
    wrapped = cl_reconstruct(CLState(s.vplus_lambda, s.vminus_lambda, G.length), p)
    assert np.max(np.abs(wrapped.as_array() - t0.as_array())) <= 1e-12


def test_init_split_singular_symbol():
    p = RegimeParams(0.1, 0.1, 1.0, 0.0)
    lam = 2.0 / (p.mu * G.k_max ** 2)
    with pytest.raises(SingularSymbol):
        cl_init_split(Field.zeros(G), Field.zeros(G), p, CLParams(1.0, lam))
