"""Dimensionless parameters, model constants and pointwise state conditions."""
from dataclasses import dataclass
import math

import numpy as np

from .errors import NuNonpositive


@dataclass(frozen=True)
class RegimeParams:
    """The five dimensionless parameters.

    ``bo_inv`` is the inverse Bond number; ``bo_inv=0`` means no surface
    tension.
    """

    mu: float
    eps: float
    delta: float
    gamma: float
    bo_inv: float = 0.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not self.eps >= 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if not self.bo_inv >= 0:
            raise ValueError(f"bo_inv must be >= 0, got {self.bo_inv}")

    def replace(self, **changes):
        fields = dict(mu=self.mu, eps=self.eps, delta=self.delta,
                      gamma=self.gamma, bo_inv=self.bo_inv)
        fields.update(changes)
        return RegimeParams(**fields)


@dataclass(frozen=True)
class RegimeBounds:
    mu_max: float = 1.0
    M: float = 1.0
    delta_min: float = 0.1
    delta_max: float = 10.0
    bo_min_inv: float = 1.0
    nu0: float = 1e-3

    def __post_init__(self):
        for name in ("mu_max", "M", "delta_min", "delta_max", "bo_min_inv", "nu0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.delta_min < self.delta_max:
            raise ValueError("delta_min must be < delta_max")

    # Carried for reporting only; never enters a numerical formula.
    @property
    def M_SW(self):
        return max(self.mu_max, 1 / self.delta_min, self.delta_max, self.bo_min_inv)

    @property
    def M_CH(self):
        return max(self.M_SW, self.M, 1 / self.nu0)


@dataclass(frozen=True)
class ModelConstants:
    nu_bar: float
    nu: float
    alpha: float
    beta: float
    kappa1: float
    kappa2: float
    varsigma: float
    kappa: float


def nu_bar_of(gamma, delta):
    return (1 + gamma * delta) / (3 * delta * (gamma + delta))


def derive_constants(p: RegimeParams) -> ModelConstants:
    g, d = p.gamma, p.delta
    nu_bar = nu_bar_of(g, d)
    nu = nu_bar - p.bo_inv
    if not nu > 0:
        raise NuNonpositive(f"nu = {nu!r} <= 0 (bo_inv = {p.bo_inv!r})", nu=nu)
    alpha = (1 - g) / (g + d) ** 2
    beta = (1 + g * d) * (d * d - g) / (d * (g + d) ** 3)
    kappa1 = (g + d) * (2 * beta - alpha) / (3 * nu)
    kappa2 = (g + d) * beta / nu
    varsigma = ((2 * alpha - beta) / 3 - p.bo_inv * (d * d - g) / (d + g) ** 2) / nu
    kappa = 2 * alpha / 3
    return ModelConstants(nu_bar, nu, alpha, beta, kappa1, kappa2, varsigma, kappa)


@dataclass(frozen=True)
class RegimeReport:
    in_SW: bool
    in_CH: bool
    nu_margin: float


def check_regime(p: RegimeParams, b: RegimeBounds = RegimeBounds()) -> RegimeReport:
    nu = nu_bar_of(p.gamma, p.delta) - p.bo_inv
    in_sw = (0 < p.mu <= b.mu_max and 0 <= p.eps <= 1
             and b.delta_min < p.delta < b.delta_max
             and 0 <= p.gamma < 1 and p.bo_inv <= b.bo_min_inv)
    # relative slack so that eps == M*sqrt(mu) typed in decimal is accepted
    ch_eps = p.eps <= b.M * math.sqrt(p.mu) * (1 + 1e-12)
    in_ch = in_sw and ch_eps and nu >= b.nu0
    return RegimeReport(bool(in_sw), bool(in_ch), nu - b.nu0)


@dataclass(frozen=True)
class DepthReport:
    h1_min: float
    h2_min: float
    ok: bool


@dataclass(frozen=True)
class EllipticityReport:
    q1_min: float
    q2_min: float
    ok: bool


def _values(zeta):
    return np.asarray(getattr(zeta, "values", zeta), dtype=float)


def check_H1(zeta, p: RegimeParams) -> DepthReport:
    """Positivity of the two layer depths ``1 - eps*zeta`` and ``1/delta + eps*zeta``."""
    z = _values(zeta)
    h1_min = float(np.min(1 - p.eps * z))
    h2_min = float(np.min(1 / p.delta + p.eps * z))
    return DepthReport(h1_min, h2_min, h1_min > 0 and h2_min > 0)


def check_H2(zeta, p: RegimeParams, c: ModelConstants) -> EllipticityReport:
    """Positivity of ``1 + eps*kappa_i*zeta``, i = 1, 2."""
    z = _values(zeta)
    q1_min = float(np.min(1 + p.eps * c.kappa1 * z))
    q2_min = float(np.min(1 + p.eps * c.kappa2 * z))
    return EllipticityReport(q1_min, q2_min, q1_min > 0 and q2_min > 0)
