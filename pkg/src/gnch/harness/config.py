"""Flat ``section.key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Lists are
comma-separated.  Unknown keys are rejected.  Every resolved value is echoed
back (see :meth:`ExperimentConfig.echo`) so a run can be reproduced from its
report directory alone.
"""
from dataclasses import dataclass, field
import math

from ..cl_model import CLParams
from ..errors import ConfigInvalid
from ..grid import Grid
from ..integrator import StepConfig
from ..params import RegimeBounds, RegimeParams
from ..profiles import PROFILES


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return [float(t) for t in items]


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


# key -> (parser, default)
SCHEMA = {
    "experiment.name": (str, None),
    "params.mu": (float, 0.1),
    "params.eps": (float, 0.1),
    "params.delta": (float, 1.0),
    "params.gamma": (float, 0.0),
    "params.bo_inv": (float, 0.0),
    "bounds.mu_max": (float, 1.0),
    "bounds.M": (float, 1.0),
    "bounds.delta_min": (float, 0.1),
    "bounds.delta_max": (float, 10.0),
    "bounds.bo_min_inv": (float, 1.0),
    "bounds.nu0": (float, 1e-3),
    "grid.L": (float, 40.0),
    "grid.n": (int, 256),
    "step.dt": (float, 0.05),
    "step.t_end": (float, 1.0),
    "step.cfl": (float, 0.5),
    "step.sample_every": (int, 1),
    "step.xs_ceiling": (float, 100.0),
    "cl.theta": (float, 1.0),
    "cl.lambda": (float, 0.0),
    "init.profile": (str, "gaussian"),
    "init.amplitude": (float, 1.0),
    "init.width": (float, 2.0),
    "init.center": (float, math.nan),
    "init.mode": (int, 1),
    "sweep.mu_list": (_floats, [0.1]),
    "sweep.eps_list": (_floats, [0.1]),
    "sweep.dt_list": (_floats, [0.2, 0.1, 0.05]),
    "sweep.pert_list": (_floats, [1e-6, 2e-6]),
    "sweep.samples": (int, 20),
    "sweep.seed": (int, 12345),
    "run.s": (float, 1.0),
    "run.dealias": (_bool, True),
    "run.force": (_bool, False),
    "run.energy_form": (str, "es"),
    "run.solver_tol": (float, 1e-11),
    "run.max_iter": (int, 500),
    "run.mu_over_eps": (float, 0.0),
    "run.eps_over_sqrt_mu": (float, 1.0),
    "run.svg": (_bool, False),
    "output.dir": (str, "gnch-out"),
    "verdict.sym_tol": (float, 1e-10),
    "verdict.coercivity_slack": (float, 1e-9),
    "verdict.continuity_slack": (float, 1e-9),
    "verdict.roundtrip_tol": (float, 1e-9),
    "verdict.rel_tol": (float, 1e-3),
    "verdict.slope_min": (float, 0.9),
    "verdict.slope_Q_min": (float, 1.9),
    "verdict.slope_R_min": (float, 0.9),
    "verdict.ratio_lo": (float, 0.4),
    "verdict.ratio_hi": (float, 0.6),
    "verdict.growth_max": (float, 10.0),
    "verdict.linearity_tol": (float, 0.05),
    "verdict.linear_max": (float, 1e-3),
    "verdict.order_min": (float, 3.9),
    "verdict.mass_drift_max": (float, 1e-12),
    "verdict.equiv_tol": (float, 1e-9),
}


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def name(self):
        return self.values["experiment.name"]

    @property
    def params(self):
        v = self.values
        return RegimeParams(v["params.mu"], v["params.eps"], v["params.delta"],
                            v["params.gamma"], v["params.bo_inv"])

    @property
    def bounds(self):
        v = self.values
        return RegimeBounds(v["bounds.mu_max"], v["bounds.M"], v["bounds.delta_min"],
                            v["bounds.delta_max"], v["bounds.bo_min_inv"], v["bounds.nu0"])

    @property
    def grid(self):
        return Grid(self.values["grid.L"], self.values["grid.n"])

    @property
    def step(self):
        v = self.values
        return StepConfig(v["step.dt"], v["step.t_end"], v["step.cfl"],
                          v["step.sample_every"], v["step.xs_ceiling"])

    @property
    def cl_params(self):
        return CLParams(self.values["cl.theta"], self.values["cl.lambda"])

    @property
    def center(self):
        c = self.values["init.center"]
        return None if math.isnan(c) else c

    def echo(self):
        return "".join(f"{k} = {_fmt(self.values[k])}\n" for k in sorted(self.values))

    def with_overrides(self, **dotted):
        vals = dict(self.values)
        for k, val in dotted.items():
            vals[k.replace("__", ".")] = val
        return ExperimentConfig(vals)


def parse_text(text, source="<config>"):
    from .experiments import EXPERIMENTS

    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigInvalid(f"{source}:{lineno}: expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigInvalid(f"{source}:{lineno}: unknown key {key!r}", line=lineno, key=key)
        if key in raw:
            raise ConfigInvalid(f"{source}:{lineno}: duplicate key {key!r}", line=lineno, key=key)
        raw[key] = value
        lines[key] = lineno

    name = raw.get("experiment.name")
    if name is None:
        raise ConfigInvalid(f"{source}: missing required key 'experiment.name'", key="experiment.name")
    if name not in EXPERIMENTS:
        raise ConfigInvalid(f"{source}:{lines['experiment.name']}: unknown experiment {name!r}; "
                            f"known: {', '.join(sorted(EXPERIMENTS))}", key="experiment.name")

    values = {k: d for k, (_, d) in SCHEMA.items()}
    values.update(EXPERIMENTS[name].defaults)
    for key, text_value in raw.items():
        parser = SCHEMA[key][0]
        try:
            values[key] = parser(text_value)
        except ValueError as exc:
            raise ConfigInvalid(f"{source}:{lines[key]}: bad value for {key!r}: {exc}",
                                line=lines[key], key=key) from None
    cfg = ExperimentConfig(values)
    validate(cfg, lines, source)
    return cfg


def validate(cfg, lines=None, source="<config>"):
    lines = lines or {}

    def fail(key, msg):
        where = f"{source}:{lines[key]}" if key in lines else source
        raise ConfigInvalid(f"{where}: {key}: {msg}", key=key, line=lines.get(key))

    v = cfg.values
    if not 0 <= v["params.eps"] <= 1:
        fail("params.eps", "must satisfy 0 <= eps <= 1")
    for key in ("params.mu", "params.delta", "grid.L", "step.dt", "run.solver_tol"):
        if not v[key] > 0:
            fail(key, "must be > 0")
    if not 0 <= v["params.gamma"] < 1:
        fail("params.gamma", "must lie in [0, 1)")
    if v["params.bo_inv"] < 0:
        fail("params.bo_inv", "must be >= 0")
    if v["grid.n"] < 16 or v["grid.n"] % 2:
        fail("grid.n", "must be even and >= 16")
    if v["step.t_end"] < 0:
        fail("step.t_end", "must be >= 0")
    if v["step.sample_every"] < 1:
        fail("step.sample_every", "must be >= 1")
    if v["init.profile"] not in PROFILES:
        fail("init.profile", f"must be one of {', '.join(PROFILES)}")
    if v["run.energy_form"] not in ("es", "S"):
        fail("run.energy_form", "must be 'es' or 'S'")
    for key in ("sweep.mu_list", "sweep.eps_list", "sweep.dt_list", "sweep.pert_list"):
        if not v[key]:
            fail(key, "sweep list must be nonempty")
    if any(m <= 0 for m in v["sweep.mu_list"]):
        fail("sweep.mu_list", "entries must be > 0")
    if any(not 0 <= e <= 1 for e in v["sweep.eps_list"]):
        fail("sweep.eps_list", "entries must satisfy 0 <= eps <= 1")
    if any(d <= 0 for d in v["sweep.dt_list"]):
        fail("sweep.dt_list", "entries must be > 0")
    try:
        cfg.bounds
    except ValueError as exc:
        fail("bounds", str(exc))


def parse_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from None
    return parse_text(text, str(path))
