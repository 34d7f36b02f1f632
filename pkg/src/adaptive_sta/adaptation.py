"""On-line update of beta (and, through the schedule, alpha).

The continuous law is a differential inclusion. Forward Euler on it chatters
around the switching surfaces; the implicit step below instead solves the
backward-Euler inclusion exactly by enumerating its five piecewise-affine
branches, and :func:`adapt_step_oracle` re-solves the same inclusion by brute
force so the two can be cross-checked.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import InvalidInputError, OracleFailure
from .gains import AdaptationParams
from .inclusions import heaviside_select, heaviside_set, sgn_select, sgn_set


def adapt_rhs_explicit(beta: float, zhat3_mag: float, ap: AdaptationParams) -> float:
    """Single-valued selection of beta' (sgn(0) -> 0, H(0) -> -1/2)."""
    return -ap.L * sgn_select(ap.eta * beta - zhat3_mag) - (ap.L / ap.eta) * heaviside_select(beta - ap.beta_m)


def adapt_step_explicit(beta_prev: float, zhat3_mag: float, ap: AdaptationParams, T: float) -> float:
    if not T > 0:
        raise InvalidInputError(f"step size must be positive, got {T!r}")
    return max(0.0, beta_prev + T * adapt_rhs_explicit(beta_prev, zhat3_mag, ap))


def _check_step_args(beta_prev, zhat3_mag, T):
    if not (T > 0 and math.isfinite(T)):
        raise InvalidInputError(f"step size must be positive, got {T!r}")
    if not (beta_prev >= 0 and math.isfinite(beta_prev)):
        raise InvalidInputError(f"previous beta must be finite and non-negative, got {beta_prev!r}")
    if not (zhat3_mag >= 0 and math.isfinite(zhat3_mag)):
        raise InvalidInputError(f"|zhat3| must be finite and non-negative, got {zhat3_mag!r}")


def implicit_case(beta_prev: float, zhat3_mag: float, ap: AdaptationParams, T: float) -> tuple[float, int, bool]:
    """Closed-form implicit step; returns (beta_i, branch number 1..5, swapped).

    With a = |zhat3| and b = eta*beta_m, the branches for a <= b are
    1 rise at (1+eta)TL/eta, 2 stick at a/eta, 3 rise at (1-eta)TL/eta,
    4 stick at beta_m, 5 fall at TL. When b < a the two thresholds trade
    places: 2 sticks at beta_m, 3 rises at TL, 4 sticks at a/eta, and the
    sticking band around a/eta is +-eta*TL wide since only the signum is
    set-valued there.
    """
    _check_step_args(beta_prev, zhat3_mag, T)
    eta, TL = ap.eta, T * ap.L
    x0 = eta * beta_prev
    a, b = zhat3_mag, eta * ap.beta_m
    if a <= b:
        if x0 < a - (1 + eta) * TL:
            return beta_prev + (1 + eta) * TL / eta, 1, False
        if x0 < a - (1 - eta) * TL:
            return a / eta, 2, False
        if x0 < b - (1 - eta) * TL:
            return beta_prev + (1 - eta) * TL / eta, 3, False
        if x0 < b + eta * TL:
            return ap.beta_m, 4, False
        if x0 >= b + eta * TL:
            return beta_prev - TL, 5, False
    else:
        if x0 < b - (1 + eta) * TL:
            return beta_prev + (1 + eta) * TL / eta, 1, True
        if x0 < b - eta * TL:
            return ap.beta_m, 2, True
        if x0 < a - eta * TL:
            return beta_prev + TL, 3, True
        if x0 < a + eta * TL:
            return a / eta, 4, True
        if x0 >= a + eta * TL:
            return beta_prev - TL, 5, True
    raise AssertionError("implicit adaptation branches failed to partition the line")


def adapt_step_implicit(beta_prev: float, zhat3_mag: float, ap: AdaptationParams, T: float) -> float:
    """Backward-Euler step of the beta inclusion, solved exactly (chattering free)."""
    return implicit_case(beta_prev, zhat3_mag, ap, T)[0]


def swap_rule_literal(beta_prev: float, zhat3_mag: float, ap: AdaptationParams, T: float) -> float:
    """Five-branch formula with thresholds and band widths exchanged token by token.

    Kept only to quantify where the textual exchange rule disagrees with the
    exact solution when eta*beta_m < |zhat3|; never used for simulation.
    """
    _check_step_args(beta_prev, zhat3_mag, T)
    eta, TL = ap.eta, T * ap.L
    x0 = eta * beta_prev
    a, b = zhat3_mag, eta * ap.beta_m
    if a <= b:
        return adapt_step_implicit(beta_prev, zhat3_mag, ap, T)
    if x0 < b - (1 + eta) * TL:
        return beta_prev + (1 + eta) * TL / eta
    if x0 < b - eta * TL:
        return ap.beta_m
    if x0 < a - eta * TL:
        return beta_prev + eta * TL / eta
    if x0 < a + (1 - eta) * TL:
        return a / eta
    return beta_prev - TL


def adapt_step_oracle(beta_prev: float, zhat3_mag: float, ap: AdaptationParams, T: float) -> float:
    """Brute-force solution of the same implicit inclusion.

    Unknown x = eta*beta_i. Inside each open interval between the breakpoints
    x = |zhat3| and x = eta*beta_m both set-valued maps are single valued, so
    x follows from one affine equation and is kept if it lands in the interval.
    At each breakpoint x is fixed and we test whether some selection of the
    two sets closes the equation. Exactly one candidate must survive.
    """
    _check_step_args(beta_prev, zhat3_mag, T)
    eta, TL = ap.eta, T * ap.L
    x0 = eta * beta_prev
    a, b = zhat3_mag, eta * ap.beta_m
    tol = 1e-12 * (1.0 + abs(x0) + TL)
    pts = sorted({a, b})
    edges = [-math.inf, *pts, math.inf]

    found = []
    for lo, hi in zip(edges, edges[1:]):
        if math.isinf(lo):
            probe = hi - 1.0
        elif math.isinf(hi):
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        sig = sgn_set(probe - a).lo
        hv = heaviside_set(probe - b).lo
        x = x0 - eta * TL * sig - TL * hv
        if lo < x < hi:
            found.append(x)
    for p in pts:
        s, hv = sgn_set(p - a), heaviside_set(p - b)
        # need x0 - p = eta*TL*sigma + TL*varsigma for some sigma in s, varsigma in hv
        need = x0 - p
        if eta * TL * s.lo + TL * hv.lo - tol <= need <= eta * TL * s.hi + TL * hv.hi + tol:
            found.append(p)

    found.sort()
    if not found:
        raise OracleFailure(f"no solution for beta_prev={beta_prev!r}, |zhat3|={zhat3_mag!r}")
    if found[-1] - found[0] > 1e3 * tol:
        raise OracleFailure(f"multiple solutions {found} for beta_prev={beta_prev!r}, |zhat3|={zhat3_mag!r}")
    # a breakpoint hit is exact; prefer it over a rounded interval candidate
    for p in pts:
        if p in found:
            return ap.beta_m if p == b else p / eta
    return found[0] / eta


def run_adaptation(
    zhat3_mags: Iterable[float], beta0: float, ap: AdaptationParams, T: float, method: str = "implicit"
) -> list[float]:
    """Iterate a step rule over a sequence of |zhat3| samples; returns beta_1..beta_n."""
    step = {"implicit": adapt_step_implicit, "explicit": adapt_step_explicit, "oracle": adapt_step_oracle}[method]
    out, beta = [], beta0
    for m in zhat3_mags:
        beta = step(beta, m, ap, T)
        out.append(beta)
    return out
