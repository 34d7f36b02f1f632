"""Super-twisting right-hand side and the perturbation signals that drive it."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .errors import InvalidInputError
from .inclusions import sgn_select, signed_power


class StaState(NamedTuple):
    z1: float
    z2: float


@dataclass(frozen=True, slots=True)
class GainState:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidInputError(f"gains must be positive, got alpha={self.alpha!r}, beta={self.beta!r}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InvalidInputError("gains must be finite")


def sta_rhs(s: StaState, g: GainState, rho0: float) -> tuple[float, float]:
    """Vector field of the perturbed super-twisting loop.

    The discontinuous term uses the zero selection of the signum at ``z1 == 0``.
    """
    dz1 = -g.alpha * signed_power(s.z1, 0.5) + s.z2
    dz2 = -g.beta * sgn_select(s.z1) + rho0
    return dz1, dz2


PERTURBATION_KINDS = ("sin-cos", "constant", "tabulated")


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation rho0(t) entering at the z2 level, with bounds L1 >= |rho0|, L2 >= |rho1|.

    ``sin-cos``: rho0 = a1 sin(w1 t) + a2 cos(w2 t), derivatives analytic.
    ``constant``: rho0 = c.
    ``tabulated``: piecewise-linear through (times, values); rho1 is the segment slope.

    When L1/L2 are left as None they are filled with the tightest bound that
    follows from the parameters (exact for constant/tabulated, triangle
    inequality for sin-cos).
    """

    kind: str = "sin-cos"
    a1: float = 10.0
    w1: float = 2.0 * math.pi
    a2: float = 5.0
    w2: float = 5.0 * math.pi
    c: float = 0.0
    times: Sequence[float] = field(default_factory=tuple)
    values: Sequence[float] = field(default_factory=tuple)
    L1: float | None = None
    L2: float | None = None

    def __post_init__(self):
        if self.kind not in PERTURBATION_KINDS:
            raise InvalidInputError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "tabulated":
            ts, vs = tuple(map(float, self.times)), tuple(map(float, self.values))
            if len(ts) < 2 or len(ts) != len(vs):
                raise InvalidInputError("tabulated perturbation needs >= 2 matching samples")
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise InvalidInputError("tabulated times must be strictly increasing")
            object.__setattr__(self, "times", ts)
            object.__setattr__(self, "values", vs)
        if self.L1 is None:
            object.__setattr__(self, "L1", self._default_L1())
        if self.L2 is None:
            object.__setattr__(self, "L2", self._default_L2())
        if self.L1 < 0 or self.L2 < 0:
            raise InvalidInputError("perturbation bounds must be non-negative")

    def _default_L1(self) -> float:
        if self.kind == "sin-cos":
            return abs(self.a1) + abs(self.a2)
        if self.kind == "constant":
            return abs(self.c)
        return max(abs(v) for v in self.values)

    def _default_L2(self) -> float:
        if self.kind == "sin-cos":
            return abs(self.a1 * self.w1) + abs(self.a2 * self.w2)
        if self.kind == "constant":
            return 0.0
        ts, vs = self.times, self.values
        return max(abs((vs[k + 1] - vs[k]) / (ts[k + 1] - ts[k])) for k in range(len(ts) - 1))

    def __call__(self, t: float) -> tuple[float, float]:
        return eval_perturbation(self, t)

    def check_bounds(self, t_end: float, dt: float) -> tuple[bool, float, float]:
        """Sample rho0, rho1 on [0, t_end] at step dt; returns (ok, max|rho0|, max|rho1|)."""
        n = int(round(t_end / dt))
        m0 = m1 = 0.0
        for i in range(n + 1):
            r0, r1 = eval_perturbation(self, min(i * dt, t_end))
            m0, m1 = max(m0, abs(r0)), max(m1, abs(r1))
        tol = 1e-12 * max(1.0, self.L1, self.L2)
        return (m0 <= self.L1 + tol and m1 <= self.L2 + tol), m0, m1


def eval_perturbation(spec: PerturbationSpec, t: float) -> tuple[float, float]:
    """Return (rho0(t), rho1(t))."""
    if not (t >= 0 and math.isfinite(t)):
        raise InvalidInputError(f"time must be finite and non-negative, got {t!r}")
    if spec.kind == "sin-cos":
        r0 = spec.a1 * math.sin(spec.w1 * t) + spec.a2 * math.cos(spec.w2 * t)
        r1 = spec.a1 * spec.w1 * math.cos(spec.w1 * t) - spec.a2 * spec.w2 * math.sin(spec.w2 * t)
        return r0, r1
    if spec.kind == "constant":
        return spec.c, 0.0
    ts, vs = spec.times, spec.values
    if t < ts[0] or t > ts[-1]:
        raise InvalidInputError(f"t={t} outside tabulated range [{ts[0]}, {ts[-1]}]")
    k = min(bisect.bisect_right(ts, t) - 1, len(ts) - 2)
    slope = (vs[k + 1] - vs[k]) / (ts[k + 1] - ts[k])
    return vs[k] + slope * (t - ts[k]), slope
