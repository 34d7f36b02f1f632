"""Third-order sliding-mode perturbation observer and the low-pass baseline."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidInputError
from .inclusions import sgn_select, signed_power
from .sta import GainState

log = logging.getLogger(__name__)


class ObserverState(NamedTuple):
    zhat1: float
    zhat2: float
    zhat3: float


class ObserverError(NamedTuple):
    e1: float
    e2: float
    e3: float


@dataclass(frozen=True)
class ObserverGains:
    L: float
    k1: float
    k2: float
    k3: float


def observer_gains_from_L(L: float, L2: float | None = None) -> ObserverGains:
    """Homogeneous gain triple k1 = 3 L^(1/3), k2 = 1.5 sqrt(3) L^(2/3), k3 = 1.1 L.

    ``L2`` is the bound on the perturbation derivative; if given and not below
    ``L`` a warning is logged (convergence is then not guaranteed) but the
    gains are still returned.
    """
    if not (L > 0 and math.isfinite(L)):
        raise InvalidInputError(f"observer scale L must be positive, got {L!r}")
    if L2 is not None and not L > L2:
        log.warning("observer scale L=%g does not exceed derivative bound L2=%g", L, L2)
    return ObserverGains(L=L, k1=3.0 * L ** (1.0 / 3.0), k2=1.5 * math.sqrt(3.0) * L ** (2.0 / 3.0), k3=1.1 * L)


def observer_rhs(o: ObserverState, z1: float, g: GainState, og: ObserverGains) -> tuple[float, float, float]:
    e1 = z1 - o.zhat1
    d1 = -g.alpha * signed_power(z1, 0.5) + o.zhat2 + og.k1 * signed_power(e1, 2.0 / 3.0)
    d2 = -g.beta * sgn_select(z1) + og.k2 * signed_power(e1, 1.0 / 3.0) + o.zhat3
    d3 = og.k3 * sgn_select(e1)
    return d1, d2, d3


def error_rhs(err: ObserverError, og: ObserverGains, rho1: float) -> tuple[float, float, float]:
    """Autonomous estimation-error dynamics, driven only by the perturbation derivative."""
    de1 = -og.k1 * signed_power(err.e1, 2.0 / 3.0) + err.e2
    de2 = -og.k2 * signed_power(err.e1, 1.0 / 3.0) + err.e3
    de3 = -og.k3 * sgn_select(err.e1) + rho1
    return de1, de2, de3


@dataclass(frozen=True)
class LowPassState:
    tau: float
    w: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidInputError(f"filter time constant must be positive, got {self.tau!r}")


def lowpass_step(lp: LowPassState, beta: float, z1: float, T: float) -> LowPassState:
    """One forward-Euler step of tau*w' + w = beta*sgn(z1)."""
    if not T > 0:
        raise InvalidInputError(f"step size must be positive, got {T!r}")
    w = lp.w + (T / lp.tau) * (beta * sgn_select(z1) - lp.w)
    return LowPassState(lp.tau, w)
