"""Set-valued signum / modified Heaviside and their single-valued selections."""

from __future__ import annotations

import math
from typing import NamedTuple

from .errors import InvalidInputError


class IntervalValue(NamedTuple):
    lo: float
    hi: float

    def __neg__(self) -> "IntervalValue":
        return IntervalValue(-self.hi, -self.lo)

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi


def _check(x: float) -> None:
    if not math.isfinite(x):
        raise InvalidInputError(f"expected a finite value, got {x!r}")


def sgn_set(x: float) -> IntervalValue:
    """Filippov signum: {1}, {-1}, or [-1, 1] at the origin."""
    _check(x)
    if x > 0:
        return IntervalValue(1.0, 1.0)
    if x < 0:
        return IntervalValue(-1.0, -1.0)
    return IntervalValue(-1.0, 1.0)


def sgn_select(x: float) -> float:
    # midpoint of [-1, 1] at zero
    _check(x)
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def heaviside_set(x: float) -> IntervalValue:
    """Modified Heaviside inclusion: 0 above zero, -1 below, [-1, 0] at zero."""
    _check(x)
    if x > 0:
        return IntervalValue(0.0, 0.0)
    if x < 0:
        return IntervalValue(-1.0, -1.0)
    return IntervalValue(-1.0, 0.0)


def heaviside_select(x: float) -> float:
    _check(x)
    if x > 0:
        return 0.0
    if x < 0:
        return -1.0
    return -0.5


def signed_power(x: float, p: float) -> float:
    """|x|**p * sign(x); odd and continuous for p > 0."""
    if not p > 0:
        raise InvalidInputError(f"exponent must be positive, got {p!r}")
    _check(x)
    if x > 0:
        return x**p
    if x < 0:
        return -((-x) ** p)
    return 0.0
