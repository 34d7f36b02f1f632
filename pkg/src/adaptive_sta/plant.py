"""Electromechanical LTI benchmark with equivalent-control-based STA.

x = (drive angle, drive rate, load angle, load rate). The perturbation enters
as D*phi with G*D*phi' = rho0, so that on the sliding variable s = G x the
closed loop reduces to the super-twisting form with s2 = sigma + G D phi.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import InvalidInputError, SingularSurfaceError
from .inclusions import signed_power
from .sta import GainState

Vector = tuple[float, ...]

_A = (
    (0.0, 1.0, 0.0, 0.0),
    (-209.6, -2.0, 838.4, 1.7),
    (0.0, 0.0, 0.0, 1.0),
    (77.9, 0.15, -311.8, -2.47),
)
_B = (0.0, 2306.0, 0.0, 0.0)
_D = (0.0, 0.0, 0.0, 1.0)
_G = (1.0, 1.0 / 2306.0, 1.0, 1.0)


def _vec(v, n, name) -> Vector:
    out = tuple(float(e) for e in v)
    if len(out) != n:
        raise InvalidInputError(f"{name} must have {n} entries, got {len(out)}")
    return out


@dataclass(frozen=True)
class LtiPlant:
    A: tuple[Vector, ...] = _A
    B: Vector = _B
    D: Vector = _D

    def __post_init__(self):
        A = tuple(_vec(row, 4, "A row") for row in self.A)
        if len(A) != 4:
            raise InvalidInputError(f"A must be 4x4, got {len(A)} rows")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _vec(self.B, 4, "B"))
        object.__setattr__(self, "D", _vec(self.D, 4, "D"))


@dataclass(frozen=True)
class SlidingSurface:
    G: Vector = _G

    def __post_init__(self):
        object.__setattr__(self, "G", _vec(self.G, 4, "G"))


def default_plant() -> LtiPlant:
    return LtiPlant()


def default_surface() -> SlidingSurface:
    return SlidingSurface()


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]


@lru_cache(maxsize=64)
def ecb_terms(plant: LtiPlant, surface: SlidingSurface) -> tuple[Vector, float, float]:
    """(G A, G B, G D) for a plant/surface pair; raises if G B == 0."""
    G = surface.G
    GA = tuple(sum(G[i] * plant.A[i][j] for i in range(4)) for j in range(4))
    GB = _dot(G, plant.B)
    if GB == 0:
        raise SingularSurfaceError("G*B is zero; the surface has relative degree > 1")
    return GA, GB, _dot(G, plant.D)


def surface_value(G: Sequence[float], x: Sequence[float]) -> float:
    if len(G) != len(x):
        raise InvalidInputError(f"surface has {len(G)} entries, state has {len(x)}")
    return sum(g * xi for g, xi in zip(G, x))


def control(
    x: Sequence[float], s: float, gains: GainState, sigma: float, plant: LtiPlant, surface: SlidingSurface
) -> tuple[float, float, float]:
    """Return (u_c, u_s, u): equivalent control plus the super-twisting term.

    sigma is the integral state, advanced outside by sigma' = -beta sgn(s).
    """
    GA, GB, _ = ecb_terms(plant, surface)
    u_c = -_dot(GA, x) / GB
    u_s = (-gains.alpha * signed_power(s, 0.5) + sigma) / GB
    return u_c, u_s, u_c + u_s


def plant_rhs(plant: LtiPlant, x: Sequence[float], u: float, phi: float) -> Vector:
    """x' = A x + B u + D phi."""
    A, B, D = plant.A, plant.B, plant.D
    return (
        A[0][0] * x[0] + A[0][1] * x[1] + A[0][2] * x[2] + A[0][3] * x[3] + B[0] * u + D[0] * phi,
        A[1][0] * x[0] + A[1][1] * x[1] + A[1][2] * x[2] + A[1][3] * x[3] + B[1] * u + D[1] * phi,
        A[2][0] * x[0] + A[2][1] * x[1] + A[2][2] * x[2] + A[2][3] * x[3] + B[2] * u + D[2] * phi,
        A[3][0] * x[0] + A[3][1] * x[1] + A[3][2] * x[2] + A[3][3] * x[3] + B[3] * u + D[3] * phi,
    )


def phi_rate(rho0: float, plant: LtiPlant, surface: SlidingSurface) -> float:
    """phi' such that G D phi' = rho0."""
    GD = ecb_terms(plant, surface)[2]
    if GD == 0:
        raise InvalidInputError("G*D is zero; the perturbation does not reach the sliding variable")
    return rho0 / GD
