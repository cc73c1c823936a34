"""Classical RK4 time stepping with condition monitors.

A *system* is any object providing ``rhs(y)``, ``max_speed(y)``,
``check(y, t)``, ``record(y, t)``, ``to_state(y, t)`` and ``size(y)`` on a
packed ``(2, n)`` array ``y``.  See :class:`gnch.gn_model.GNSystem` and
:class:`gnch.cl_model.CLSystem`.
"""
from dataclasses import dataclass, field
import math

from .errors import Blowup, ConditionLost, H1Violated, H2Violated


@dataclass(frozen=True)
class StepConfig:
    dt: float
    t_end: float
    cfl: float = 0.5
    sample_every: int = 1
    xs_ceiling: float = 100.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_end >= 0:
            raise ValueError("t_end must be >= 0")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    dt: float = 0.0
    steps: int = 0


def rk4_step(U, dt, rhs):
    k1 = rhs(U)
    k2 = rhs(U + 0.5 * dt * k1)
    k3 = rhs(U + 0.5 * dt * k2)
    k4 = rhs(U + dt * k3)
    return U + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def cfl_dt(system, y, cfl):
    return cfl * system.grid.dx / system.max_speed(y)


def plan_steps(system, y0, cfg: StepConfig):
    """Uniform step no larger than ``cfg.dt`` (and the CFL bound when ``cfg.cfl``) landing on ``t_end``."""
    if cfg.t_end == 0:
        return 0, 0.0
    dt = cfg.dt
    if cfg.cfl:
        dt = min(dt, cfl_dt(system, y0, cfg.cfl))
    nsteps = max(1, math.ceil(cfg.t_end / dt - 1e-12))
    return nsteps, cfg.t_end / nsteps


def run(system, U0, cfg: StepConfig, keep_states=True) -> Trajectory:
    y = U0.as_array()
    system.check(y, 0.0)
    nsteps, dt = plan_steps(system, y, cfg)
    traj = Trajectory(dt=dt, steps=nsteps)
    size0 = system.size(y)

    def sample(y, t):
        traj.times.append(t)
        traj.records.append(system.record(y, t))
        if keep_states:
            traj.states.append(system.to_state(y, t))
        if size0 > 0 and system.size(y) > cfg.xs_ceiling * size0:
            raise Blowup(f"norm exceeded {cfg.xs_ceiling:g}x its initial value at t={t:.6g}", t=t)

    sample(y, 0.0)
    for i in range(1, nsteps + 1):
        t = i * dt
        try:
            y = rk4_step(y, dt, system.rhs)
        except (H1Violated, H2Violated) as exc:
            raise ConditionLost(f"{exc.code} during step ending at t={t:.6g}", t=t, cause=exc.code) from exc
        system.check(y, t)
        if i % cfg.sample_every == 0 or i == nsteps:
            sample(y, t)
    return traj
