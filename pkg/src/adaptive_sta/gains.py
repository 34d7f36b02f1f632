"""Lyapunov-based gain selection for the super-twisting algorithm.

Two routes are provided. The constant-gain route picks an ellipse
parameterisation (lambda, h), takes its centre (theta1, theta2) and maps it to
(alpha, beta) for a known perturbation bound L1. The variable-gain route ties
the ellipse centre to the current beta so that alpha can follow beta on line.
Both return a :class:`LyapunovCertificate` whose matrices are checked
numerically rather than assumed positive definite.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

from .errors import InfeasibleDesignError, InvalidInputError
from .inclusions import signed_power
from .sta import GainState


@dataclass(frozen=True)
class EllipseParams:
    lam: float
    h: float
    theta1: float
    theta2: float

    @property
    def feasible(self) -> bool:
        return ellipse_residual(self.theta1, self.theta2, self.lam, self.h) > 0


@dataclass(frozen=True)
class AdaptationParams:
    eta: float = 0.99
    h: float = 1.01
    p: float = 0.01
    beta_m: float = 1.0
    L: float = 200.0

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise InvalidInputError(f"eta must lie in (0, 1), got {self.eta!r}")
        if not self.h > 1:
            raise InvalidInputError(f"h must exceed 1, got {self.h!r}")
        for name in ("p", "beta_m", "L"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidInputError(f"{name} must be positive and finite, got {v!r}")


def _check_lam_h(lam: float, h: float) -> None:
    if not 0 < lam < 1:
        raise InvalidInputError(f"lambda must lie in (0, 1), got {lam!r}")
    if not h > 1:
        raise InvalidInputError(f"h must exceed 1, got {h!r}")


def ellipse_residual(theta1: float, theta2: float, lam: float, h: float) -> float:
    """Left minus right side of the ellipse inequality; positive iff strictly inside."""
    lhs = theta1 - 2.0 * theta2 / h
    rhs = 0.25 * (1.0 + theta1) ** 2 - (1.0 + theta1) * theta2 * lam + theta2**2
    return lhs - rhs


def lemma1_center(lam: float, h: float) -> tuple[float, float]:
    _check_lam_h(lam, h)
    if not h * lam > 1:
        raise InfeasibleDesignError(f"h*lambda = {h * lam:g} must exceed 1 for a positive centre")
    den = h * (1.0 - lam * lam)
    return (h - 2.0 * lam + h * lam * lam) / den, (lam * h - 1.0) / den


def lemma1_gains(L1: float, lam: float, h: float, theta1: float, theta2: float) -> GainState:
    """Constant gains beta = L1 (1+lam)/(1-lam), alpha = theta1 sqrt(2h / ((1-lam) theta2)) sqrt(L1)."""
    _check_lam_h(lam, h)
    if not (L1 > 0 and math.isfinite(L1)):
        raise InvalidInputError(f"L1 must be positive, got {L1!r}")
    if not (theta1 > 0 and theta2 > 0) or ellipse_residual(theta1, theta2, lam, h) <= 0:
        raise InfeasibleDesignError(f"(theta1, theta2) = ({theta1:g}, {theta2:g}) is not inside the ellipse")
    beta = L1 * (1.0 + lam) / (1.0 - lam)
    alpha = theta1 * math.sqrt(2.0 * h / ((1.0 - lam) * theta2)) * math.sqrt(L1)
    return GainState(alpha=alpha, beta=beta)


class Schedule(NamedTuple):
    lam: float
    theta1: float
    theta2: float
    alpha: float


def thm1_schedule(beta: float, ap: AdaptationParams) -> Schedule:
    """Variable-gain schedule: theta2 = beta p, lambda from the centre condition, alpha = theta1 sqrt(h/p).

    lambda is the positive root of theta2 h lam^2 + h lam - (1 + theta2 h) = 0,
    evaluated in a cancellation-free form so that 1 - lambda keeps full
    relative precision when theta2 is large.
    """
    if not (beta > 0 and math.isfinite(beta)):
        raise InvalidInputError(f"beta must be positive and finite, got {beta!r}")
    h = ap.h
    th2 = beta * ap.p
    root = math.sqrt(h * h + 4.0 * th2 * h + 4.0 * th2 * th2 * h * h)
    lam = 2.0 * (1.0 + th2 * h) / (h + root)
    one_minus = (h - 1.0) * ((h + 1.0) / (root + 2.0 * th2 * h + 1.0) + 1.0) / (h + root)
    if not (0 < lam < 1 and one_minus > 0 and h * lam > 1):
        raise InfeasibleDesignError(f"schedule infeasible at beta={beta:g}: lambda={lam!r}")
    th1 = (h * one_minus**2 + 2.0 * lam * (h - 1.0)) / (h * one_minus * (1.0 + lam))
    return Schedule(lam, th1, th2, th1 * math.sqrt(h / ap.p))


def thm1_beta(rho0_mag: float, ap: AdaptationParams) -> float:
    if not rho0_mag >= 0:
        raise InvalidInputError(f"perturbation magnitude must be non-negative, got {rho0_mag!r}")
    return max(ap.beta_m, rho0_mag / ap.eta)


def sym2_eigvals(a: float, b: float, c: float) -> tuple[float, float]:
    """Eigenvalues (min, max) of [[a, b], [b, c]]."""
    mean = 0.5 * (a + c)
    r = math.hypot(0.5 * (a - c), b)
    lo, hi = mean - r, mean + r
    # recover the small eigenvalue from the determinant when mean - r cancels
    if hi != 0 and abs(lo) < 1e-8 * abs(hi):
        lo = (a * c - b * b) / hi
    return lo, hi


@dataclass(frozen=True)
class LyapunovCertificate:
    p11: float
    p12: float
    p22: float
    q11: float
    q12: float
    q22: float
    lambda_min_P: float
    lambda_max_P: float
    omega_min_Q: float
    omega_max_Q: float
    P_positive: bool
    Q_positive: bool
    alpha: float
    beta: float
    gamma: float | None
    V0: float | None
    t_z_bound: float | None
    t_z_bound_alt: float | None

    @property
    def valid(self) -> bool:
        return self.P_positive and self.Q_positive

    def V(self, z1: float, z2: float) -> float:
        return lyapunov_value(self, z1, z2)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["valid"] = self.valid
        return d


def lyapunov_value(cert: LyapunovCertificate, z1: float, z2: float) -> float:
    """V = zeta^T P zeta with zeta = (|z1|^(1/2) sgn z1, z2)."""
    x = signed_power(z1, 0.5)
    return cert.p11 * x * x + 2.0 * cert.p12 * x * z2 + cert.p22 * z2 * z2


def _build(p11, p12, p22, q11, q12, q22, alpha, beta, z0) -> LyapunovCertificate:
    lp_min, lp_max = sym2_eigvals(p11, p12, p22)
    wq_min, wq_max = sym2_eigvals(q11, q12, q22)
    P_pos, Q_pos = lp_min > 0, wq_min > 0
    gamma = V0 = tz = tz_alt = None
    if P_pos and Q_pos:
        gamma = math.sqrt(lp_min) * math.sqrt(wq_min) / lp_max
    if z0 is not None:
        x = signed_power(z0[0], 0.5)
        V0 = p11 * x * x + 2.0 * p12 * x * z0[1] + p22 * z0[1] ** 2
        if gamma is not None:
            tz = 2.0 / gamma * math.sqrt(V0)
            tz_alt = 4.0 * math.sqrt(lp_min) * math.sqrt(V0) / wq_min
    return LyapunovCertificate(
        p11, p12, p22, q11, q12, q22, lp_min, lp_max, wq_min, wq_max, P_pos, Q_pos,
        alpha, beta, gamma, V0, tz, tz_alt,
    )


def lemma1_certificate(L1, lam, h, theta1, theta2, z0=None) -> LyapunovCertificate:
    """P and Q_R for constant gains designed from (lam, h, theta1, theta2) and bound L1."""
    g = lemma1_gains(L1, lam, h, theta1, theta2)
    a, b = g.alpha, g.beta
    p22 = (1.0 - lam) * theta2 / (2.0 * L1)
    p12 = -math.sqrt(p22 / h)
    q11 = a + 2.0 * p12 * (b + L1) + 2.0 * L1 * (1.0 - a * p12) * p22 / p12
    q12 = -0.5 * (1.0 - a * p12) + (b + L1) * p22
    q22 = -p12
    return _build(1.0, p12, p22, q11, q12, q22, a, b, z0)


def thm1_certificate(beta: float, ap: AdaptationParams, z0=None) -> LyapunovCertificate:
    """P and Q_R for the variable-gain schedule, frozen at the given beta."""
    lam, th1, th2, alpha = thm1_schedule(beta, ap)
    p22 = ap.p
    p12 = -math.sqrt(p22 / ap.h)
    xi = 2.0 * (1.0 + th1) * th2 * (1.0 - lam) / p12
    q11 = 2.0 * alpha + 4.0 * th2 * p12 / p22 + xi
    q12 = 2.0 * th2 - (1.0 + th1)
    q22 = -2.0 * p12
    return _build(1.0, p12, p22, q11, q12, q22, alpha, beta, z0)
