"""Scenario files: YAML with fixed sections, defaults equal to the fig2 preset."""

from __future__ import annotations

import copy
import math
from pathlib import Path

import yaml

from .engine import Scenario, Tolerances
from .errors import InfeasibleDesignError
from .gains import AdaptationParams
from .plant import LtiPlant, SlidingSurface
from .sta import PerturbationSpec


class ConfigError(ValueError):
    pass


_FIG2 = {
    "plant": {
        "enabled": True,
        "A": [list(r) for r in LtiPlant().A],
        "B": list(LtiPlant().B),
        "D": list(LtiPlant().D),
        "G": list(SlidingSurface().G),
    },
    "perturbation": {
        "kind": "sin-cos",
        "a1": 10.0,
        "w1": 2.0 * math.pi,
        "a2": 5.0,
        "w2": 5.0 * math.pi,
        "c": 0.0,
        "times": [],
        "values": [],
        "L1": None,
        "L2": None,
    },
    "adaptation": {"eta": 0.99, "h": 1.01, "p": 0.01, "beta_m": 1.0, "L": 200.0, "mode": "implicit", "alpha_frozen": None},
    "observer": {"L": 200.0, "k": None, "estimator": "hosm-observer", "tau": 0.005, "init": None},
    "sim": {"T": 1e-4, "t_end": 10.0, "x0": [1.0, 1.0, 1.0, 1.0], "z0": [1.0, 0.0], "beta0": None, "decimation": 100},
    "detect": {"tol_e": 1e-2, "tol_delta": None, "tol_s": 1e-2, "window": 0.05},
    "output": {"trace": "trace.csv", "report": "report.json"},
}

PRESETS = {
    "fig2": {},
    "pure-sta": {"plant": {"enabled": False}},
    "lowpass-baseline": {"observer": {"estimator": "lowpass-baseline"}},
}


def _merge(base: dict, over: dict, path: str = "") -> dict:
    for key, val in over.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"'{where}' must be a mapping")
            _merge(base[key], val, where)
        else:
            base[key] = val
    return base


def default_config() -> dict:
    return copy.deepcopy(_FIG2)


def load_config(source: str) -> dict:
    """Preset name or path to a YAML scenario file, merged over the defaults."""
    cfg = default_config()
    if source in PRESETS:
        return _merge(cfg, copy.deepcopy(PRESETS[source]))
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"'{source}' is neither a preset ({', '.join(PRESETS)}) nor a readable file")
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {source}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    return _merge(cfg, data)


def apply_override(cfg: dict, assignment: str) -> dict:
    """Apply one ``section.key=value`` override; the value is parsed as YAML."""
    if "=" not in assignment:
        raise ConfigError(f"override '{assignment}' is not of the form key.path=value")
    key, raw = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = cfg
    for i, part in enumerate(parts):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown key '{'.'.join(parts[: i + 1])}'")
        if i == len(parts) - 1:
            try:
                node[part] = yaml.safe_load(raw)
            except yaml.YAMLError as exc:
                raise ConfigError(f"cannot parse value for '{key}': {exc}") from exc
        else:
            node = node[part]
    return cfg


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=False)


def _as_number(v):
    # YAML 1.1 reads "1e12" (no dot) as a string
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            return v
    return v


def _num(cfg, path, allow_none=False):
    sec, key = path.split(".")
    v = _as_number(cfg[sec][key])
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{path}' must be a number, got {v!r}")
    return float(v)


def _vec(cfg, path, n=None, allow_none=False):
    sec, key = path.split(".")
    v = cfg[sec][key]
    if v is None and allow_none:
        return None
    if isinstance(v, (list, tuple)):
        v = [_as_number(e) for e in v]
    if not isinstance(v, (list, tuple)) or any(isinstance(e, bool) or not isinstance(e, (int, float)) for e in v):
        raise ConfigError(f"'{path}' must be a list of numbers")
    if n is not None and len(v) != n:
        raise ConfigError(f"'{path}' must have {n} entries")
    return tuple(float(e) for e in v)


def to_scenario(cfg: dict) -> Scenario:
    """Validate a merged config and build the Scenario; errors carry the key path."""
    try:
        pl = cfg["plant"]
        A = pl["A"]
        if not isinstance(A, list) or len(A) != 4 or any(not isinstance(r, list) or len(r) != 4 for r in A):
            raise ConfigError("'plant.A' must be a 4x4 nested list")
        plant = (
            LtiPlant(A=tuple(tuple(float(e) for e in r) for r in A), B=_vec(cfg, "plant.B", 4), D=_vec(cfg, "plant.D", 4))
            if pl["enabled"]
            else None
        )
        pc = cfg["perturbation"]
        pert = PerturbationSpec(
            kind=pc["kind"],
            a1=_num(cfg, "perturbation.a1"),
            w1=_num(cfg, "perturbation.w1"),
            a2=_num(cfg, "perturbation.a2"),
            w2=_num(cfg, "perturbation.w2"),
            c=_num(cfg, "perturbation.c"),
            times=_vec(cfg, "perturbation.times"),
            values=_vec(cfg, "perturbation.values"),
            L1=_num(cfg, "perturbation.L1", True),
            L2=_num(cfg, "perturbation.L2", True),
        )
        ad = cfg["adaptation"]
        ap = AdaptationParams(
            eta=_num(cfg, "adaptation.eta"),
            h=_num(cfg, "adaptation.h"),
            p=_num(cfg, "adaptation.p"),
            beta_m=_num(cfg, "adaptation.beta_m"),
            L=_num(cfg, "adaptation.L"),
        )
        ob = cfg["observer"]
        dec = cfg["sim"]["decimation"]
        if isinstance(dec, bool) or not isinstance(dec, int):
            raise ConfigError("'sim.decimation' must be an integer")
        return Scenario(
            plant=plant,
            surface=SlidingSurface(_vec(cfg, "plant.G", 4)),
            perturbation=pert,
            adaptation=ap,
            adaptation_mode=ad["mode"],
            estimator=ob["estimator"],
            observer_L=_num(cfg, "observer.L"),
            observer_k=_vec(cfg, "observer.k", 3, True),
            lowpass_tau=_num(cfg, "observer.tau"),
            T=_num(cfg, "sim.T"),
            t_end=_num(cfg, "sim.t_end"),
            x0=_vec(cfg, "sim.x0", 4),
            z0=_vec(cfg, "sim.z0", 2),
            beta0=_num(cfg, "sim.beta0", True),
            frozen_alpha=_num(cfg, "adaptation.alpha_frozen", True),
            observer_init=_vec(cfg, "observer.init", 3, True),
            decimation=dec,
            tolerances=Tolerances(
                tol_e=_num(cfg, "detect.tol_e"),
                tol_delta=_num(cfg, "detect.tol_delta", True),
                tol_s=_num(cfg, "detect.tol_s"),
                window=_num(cfg, "detect.window"),
            ),
        )
    except (ConfigError, InfeasibleDesignError):
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
