"""Adaptive-gain super-twisting sliding mode control.

Third-order perturbation observer, Lyapunov-based gain scheduling, an exact
implicit-Euler gain adaptation step and a closed-loop LTI benchmark.
"""

from .inclusions import (
    IntervalValue,
    heaviside_select,
    heaviside_set,
    sgn_select,
    sgn_set,
    signed_power,
)
from .sta import GainState, PerturbationSpec, StaState, eval_perturbation, sta_rhs
from .observer import (
    LowPassState,
    ObserverError,
    ObserverGains,
    ObserverState,
    error_rhs,
    lowpass_step,
    observer_gains_from_L,
    observer_rhs,
)
from .gains import (
    AdaptationParams,
    EllipseParams,
    LyapunovCertificate,
    ellipse_residual,
    lemma1_center,
    lemma1_certificate,
    lemma1_gains,
    thm1_beta,
    thm1_certificate,
    thm1_schedule,
)
from .adaptation import (
    adapt_rhs_explicit,
    adapt_step_explicit,
    adapt_step_implicit,
    adapt_step_oracle,
)
from .plant import LtiPlant, SlidingSurface, control, default_plant, default_surface, plant_rhs, surface_value
from .engine import Scenario, SimResult, detect_convergence, simulate

__version__ = "0.1.0"
