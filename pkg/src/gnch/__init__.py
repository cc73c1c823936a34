"""Two-layer internal-wave model in the Camassa-Holm regime.

Pseudospectral solver for the coupled Green-Naghdi-type system, its
decoupled Constantin-Lannes approximation, and diagnostics probing the
well-posedness and convergence statements numerically.
"""
from .cl_model import (CLConstants, CLParams, CLState, CLSystem, cl_init_split,
                       cl_reconstruct, cl_rhs, derive_cl_constants)
from .diagnostics import (CLDiagRecord, DiagRecord, TwinReport, energy_blocks, energy_Es,
                          equivalence_bounds, equivalence_ratio, fit_growth_rate, twin_divergence)
from .elliptic import (SolverStats, TContext, apply_T, apply_helmholtz, helmholtz_symbol,
                       invert_helmholtz, invert_T, pcg_solve)
from .errors import *  # noqa: F401,F403
from .gn_model import (GNSystem, classical_Q, classical_R, expansion_Q, expansion_R,
                       expansion_residual_Q, expansion_residual_R, f_of, fp_of, gn_rhs,
                       gn_rhs_condensed, linear_dispersion, right_moving_mode)
from .grid import (Field, Grid, State, ddx, ddx2, ddx3, h1mu_norm, lambda_s, sobolev_norm,
                   xs_norm, xs_terms)
from .integrator import StepConfig, Trajectory, rk4_step, run
from .params import (ModelConstants, RegimeBounds, RegimeParams, check_H1, check_H2,
                     check_regime, derive_constants)

__version__ = "0.1.0"
