"""Fixed-step closed-loop simulation.

Per step i the order is fixed: evaluate s and the control from the current
(x, sigma, alpha, beta); advance plant, integral state, perturbation channel
and observer by forward Euler; update beta with the implicit (or explicit)
adaptation step using the freshly advanced |zhat3|; recompute alpha from the
schedule. Row i of the trace holds the state at t_i before the update.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .adaptation import adapt_step_explicit, adapt_step_implicit
from .errors import DivergenceError, InfeasibleDesignError, InvalidInputError
from .gains import AdaptationParams, LyapunovCertificate, thm1_beta, thm1_certificate, thm1_schedule
from .inclusions import sgn_select
from .observer import LowPassState, ObserverGains, ObserverState, lowpass_step, observer_gains_from_L, observer_rhs
from .plant import LtiPlant, SlidingSurface, control, ecb_terms, phi_rate, plant_rhs, surface_value
from .sta import GainState, PerturbationSpec, StaState, eval_perturbation, sta_rhs

COLUMNS = (
    "t", "x1", "x2", "x3", "x4", "s1", "sigma", "u", "u_c", "u_s",
    "beta", "alpha", "zhat1", "zhat2", "zhat3", "e1", "e2", "e3", "rho0", "V",
)

ADAPTATION_MODES = ("implicit", "explicit", "frozen")
ESTIMATORS = ("hosm-observer", "lowpass-baseline")
DIVERGENCE_LIMIT = 1e9

TraceRow = NamedTuple("TraceRow", [(c, float) for c in COLUMNS])


@dataclass(frozen=True)
class Tolerances:
    tol_e: float = 1e-2
    tol_delta: float | None = None  # None: 5 (1+eta) T L / eta
    tol_s: float = 1e-2
    window: float = 0.05


@dataclass(frozen=True)
class Scenario:
    """Complete closed-loop configuration. ``plant=None`` selects the bare STA loop on z0."""

    plant: LtiPlant | None = field(default_factory=LtiPlant)
    surface: SlidingSurface = field(default_factory=SlidingSurface)
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    adaptation: AdaptationParams = field(default_factory=AdaptationParams)
    adaptation_mode: str = "implicit"
    estimator: str = "hosm-observer"
    observer_L: float = 200.0
    observer_k: tuple[float, float, float] | None = None
    lowpass_tau: float = 0.005
    T: float = 1e-4
    t_end: float = 10.0
    x0: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0)
    z0: tuple[float, float] = (1.0, 0.0)
    beta0: float | None = None
    frozen_alpha: float | None = None
    observer_init: tuple[float, float, float] | None = None
    decimation: int = 100
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise InvalidInputError(f"T must be positive, got {self.T!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise InvalidInputError(f"t_end must be positive, got {self.t_end!r}")
        if self.adaptation_mode not in ADAPTATION_MODES:
            raise InvalidInputError(f"adaptation mode must be one of {ADAPTATION_MODES}")
        if self.estimator not in ESTIMATORS:
            raise InvalidInputError(f"estimator must be one of {ESTIMATORS}")
        if self.beta0 is not None and self.beta0 < self.adaptation.beta_m:
            raise InvalidInputError(f"beta0={self.beta0} is below beta_m={self.adaptation.beta_m}")
        if int(self.decimation) != self.decimation or self.decimation < 1:
            raise InvalidInputError(f"decimation must be a positive integer, got {self.decimation!r}")
        if self.plant is not None:
            ecb_terms(self.plant, self.surface)
            if len(self.x0) != 4:
                raise InvalidInputError("x0 must have 4 entries")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.T))

    @property
    def initial_beta(self) -> float:
        return self.adaptation.beta_m if self.beta0 is None else self.beta0

    @cached_property
    def observer_gains(self) -> ObserverGains:
        if self.observer_k is not None:
            k1, k2, k3 = self.observer_k
            return ObserverGains(self.observer_L, k1, k2, k3)
        return observer_gains_from_L(self.observer_L, self.perturbation.L2)

    @cached_property
    def tol_delta(self) -> float:
        if self.tolerances.tol_delta is not None:
            return self.tolerances.tol_delta
        eta = self.adaptation.eta
        return 5.0 * (1.0 + eta) * self.T * self.adaptation.L / eta

    def initial_sliding(self) -> tuple[float, float]:
        """(s1, s2) at t = 0."""
        if self.plant is None:
            return float(self.z0[0]), float(self.z0[1])
        return surface_value(self.surface.G, self.x0), 0.0


class SimState(NamedTuple):
    i: int
    x: tuple[float, ...]  # plant state, or (z1, z2) for the bare loop
    sigma: float
    phi: float
    zhat: ObserverState
    w: float
    beta: float
    alpha: float


def initial_state(scn: Scenario) -> SimState:
    beta = scn.initial_beta
    if scn.adaptation_mode == "frozen" and scn.frozen_alpha is not None:
        alpha = scn.frozen_alpha
    else:
        alpha = thm1_schedule(beta, scn.adaptation).alpha
    s1, _ = scn.initial_sliding()
    zhat = ObserverState(*scn.observer_init) if scn.observer_init is not None else ObserverState(s1, 0.0, 0.0)
    x = tuple(map(float, scn.x0)) if scn.plant is not None else (float(scn.z0[0]), float(scn.z0[1]))
    return SimState(0, x, 0.0, 0.0, zhat, 0.0, beta, alpha)


def lyapunov_matrix(scn: Scenario) -> LyapunovCertificate:
    """Certificate of the variable-gain design at the worst-case beta, anchored at the initial (s1, s2)."""
    ap = scn.adaptation
    beta = scn.initial_beta if scn.adaptation_mode == "frozen" else thm1_beta(scn.perturbation.L1, ap)
    return thm1_certificate(beta, ap, z0=scn.initial_sliding())


def step(scn: Scenario, st: SimState, cert: LyapunovCertificate | None = None) -> tuple[SimState, TraceRow]:
    T = scn.T
    t = st.i * T
    r0, _ = eval_perturbation(scn.perturbation, t)
    g = GainState(st.alpha, st.beta)
    nan = math.nan

    if scn.plant is None:
        s, s2 = st.x
        x_cols = (nan, nan, nan, nan)
        u_c = u_s = u = nan
        dz1, dz2 = sta_rhs(StaState(s, s2), g, r0)
        x_new = (s + T * dz1, s2 + T * dz2)
        sigma_new, phi_new = st.sigma, st.phi
        sigma_col = s2
    else:
        x = st.x
        s = surface_value(scn.surface.G, x)
        GD = ecb_terms(scn.plant, scn.surface)[2]
        s2 = st.sigma + GD * st.phi
        u_c, u_s, u = control(x, s, g, st.sigma, scn.plant, scn.surface)
        dx = plant_rhs(scn.plant, x, u, st.phi)
        x_new = (x[0] + T * dx[0], x[1] + T * dx[1], x[2] + T * dx[2], x[3] + T * dx[3])
        sigma_new = st.sigma - T * st.beta * sgn_select(s)
        phi_new = st.phi + T * phi_rate(r0, scn.plant, scn.surface)
        x_cols = x
        sigma_col = st.sigma

    zh = st.zhat
    d1, d2, d3 = observer_rhs(zh, s, g, scn.observer_gains)
    zhat_new = ObserverState(zh.zhat1 + T * d1, zh.zhat2 + T * d2, zh.zhat3 + T * d3)

    if scn.estimator == "lowpass-baseline":
        w_new = lowpass_step(LowPassState(scn.lowpass_tau, st.w), st.beta, s, T).w
        est3 = st.w
    else:
        w_new = st.w
        est3 = zh.zhat3

    mode = scn.adaptation_mode
    if mode == "implicit":
        beta_new = adapt_step_implicit(st.beta, abs(zhat_new.zhat3), scn.adaptation, T)
    elif mode == "explicit":
        beta_new = adapt_step_explicit(st.beta, abs(zhat_new.zhat3), scn.adaptation, T)
    else:
        beta_new = st.beta
    if mode == "frozen":
        alpha_new = st.alpha
    elif beta_new <= 0:
        # only the explicit rule can reach zero; the schedule has no design there
        raise InfeasibleDesignError(f"adaptive gain collapsed to beta=0 at t={t + T:g}")
    else:
        alpha_new = thm1_schedule(beta_new, scn.adaptation).alpha

    V = cert.V(s, s2) if cert is not None else nan
    row = TraceRow(
        t, *x_cols, s, sigma_col, u, u_c, u_s, st.beta, st.alpha,
        zh.zhat1, zh.zhat2, est3, s - zh.zhat1, s2 - zh.zhat2, r0 - est3, r0, V,
    )
    new = SimState(st.i + 1, x_new, sigma_new, phi_new, zhat_new, w_new, beta_new, alpha_new)
    if not _healthy(new):
        raise DivergenceError(f"state diverged at t={t + T:g}", t=t + T, last_row=row)
    return new, row


def _healthy(st: SimState) -> bool:
    vals = (*st.x, st.sigma, st.phi, *st.zhat, st.w, st.beta, st.alpha)
    return all(math.isfinite(v) for v in vals) and max(abs(v) for v in st.x) <= DIVERGENCE_LIMIT


@dataclass
class Trace:
    data: np.ndarray
    dt: float  # spacing between rows
    eta: float
    beta_m: float

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    def row(self, k: int) -> TraceRow:
        return TraceRow(*map(float, self.data[k]))


@dataclass(frozen=True)
class ConvergenceReport:
    t_e_detected: float | None
    t_delta_detected: float | None
    t_z_detected: float | None
    t_z_bound: float | None
    tol_e: float
    tol_delta: float
    tol_s: float
    window: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _first_sustained(cond: np.ndarray, t: np.ndarray, window: float) -> float | None:
    """First t_k such that cond holds on every sample in [t_k, t_k + window].

    The whole window must lie inside the trace, so a condition that only
    holds over the last few samples is not reported as reached.
    """
    n = len(cond)
    if n == 0:
        return None
    # index of the next False at or after each k (n if none)
    nxt = np.full(n + 1, n)
    bad = np.flatnonzero(~cond)
    if bad.size:
        idx = np.searchsorted(bad, np.arange(n))
        nxt[:n] = np.where(idx < bad.size, bad[np.minimum(idx, bad.size - 1)], n)
    else:
        nxt[:n] = n
    end_t = np.concatenate([t, [np.inf]])
    fits = t + window <= t[-1] * (1 + 1e-12)
    ok = cond & fits & ((nxt[:n] == n) | (end_t[nxt[:n]] > t + window))
    hits = np.flatnonzero(ok)
    return float(t[hits[0]]) if hits.size else None


def detect_convergence(trace: Trace, tol: Tolerances, tol_delta: float, t_z_bound: float | None = None) -> ConvergenceReport:
    t = trace["t"]
    e = np.max(np.abs(np.stack([trace["e1"], trace["e2"], trace["e3"]])), axis=0)
    delta = np.abs(trace.eta * trace["beta"] - np.maximum(np.abs(trace["rho0"]), trace.eta * trace.beta_m))
    s = np.abs(trace["s1"])
    return ConvergenceReport(
        t_e_detected=_first_sustained(e < tol.tol_e, t, tol.window),
        t_delta_detected=_first_sustained(delta < tol_delta, t, tol.window),
        t_z_detected=_first_sustained(s < tol.tol_s, t, tol.window),
        t_z_bound=t_z_bound,
        tol_e=tol.tol_e,
        tol_delta=tol_delta,
        tol_s=tol.tol_s,
        window=tol.window,
    )


@dataclass
class SimResult:
    scenario: Scenario
    trace: Trace
    certificate: LyapunovCertificate
    report: ConvergenceReport
    wall_time: float


def simulate(scn: Scenario, decimation: int | None = None) -> SimResult:
    """Run a scenario to t_end. ``decimation`` overrides the scenario's row stride."""
    dec = int(decimation or scn.decimation)
    n = scn.n_steps
    cert = lyapunov_matrix(scn)
    data = np.empty(((n + dec - 1) // dec, len(COLUMNS)))
    st = initial_state(scn)
    t0 = time.perf_counter()
    k = 0
    for i in range(n):
        try:
            st, row = step(scn, st, cert)
        except DivergenceError as exc:
            exc.partial = Trace(data[:k].copy(), scn.T * dec, scn.adaptation.eta, scn.adaptation.beta_m)
            raise
        if i % dec == 0:
            data[k] = row
            k += 1
    trace = Trace(data[:k], scn.T * dec, scn.adaptation.eta, scn.adaptation.beta_m)
    report = detect_convergence(trace, scn.tolerances, scn.tol_delta, cert.t_z_bound)
    return SimResult(scn, trace, cert, report, time.perf_counter() - t0)


def with_overrides(scn: Scenario, **kw) -> Scenario:
    return replace(scn, **kw)
