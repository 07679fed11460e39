"""Experiment configuration: JSON loading, validation, and system building.

Configs are single JSON objects whose keys are the snake_case field names
below.  Validation is strict: unknown keys, inconsistent dimensions, or a
horizon that is not an integer number of steps (up to floating-point
wobble of a few ulp) are rejected before any output is written.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .integrators import (HEUN, HEUN_FULL, STORMER_VERLET, THREE_TERM, TWO_TERM,
                          Scheme, composed, rk_split, rk_split_b)
from .problems import ElasticPendulumParams, elastic_pendulum, planar_pendulum

ALLOWED_KEYS = {
    "problem", "m", "k", "ell", "gravity", "scheme", "schemes", "epsilon",
    "h", "t_final", "initial_q", "initial_p", "outputs", "mu",
}

ALLOWED_OUTPUTS = ("states", "energy", "momentum", "defect", "drift",
                   "phase_svg", "energy_svg")

_SHORTHAND = {
    "3s": lambda: THREE_TERM,
    "2s": lambda: TWO_TERM,
    "rks": rk_split,
    "sv": lambda: STORMER_VERLET,
    "heun": lambda: HEUN_FULL,
    "rksb": rk_split_b,
}

_TABLEAUS = {"heun": HEUN}


@dataclass(frozen=True)
class ExperimentConfig:
    stem: str
    command: str
    problem: str
    epsilon: float
    h_values: tuple
    t_final: float
    scheme: Optional[Scheme]
    schemes: tuple
    initial_q: Optional[np.ndarray]
    initial_p: Optional[np.ndarray]
    outputs: tuple
    params: Optional[ElasticPendulumParams]
    mu: Optional[float]


def parse_scheme(spec) -> Scheme:
    """Scheme from a shorthand string or a {kind, ...} object."""
    if isinstance(spec, str):
        maker = _SHORTHAND.get(spec)
        if maker is None:
            raise ConfigError(f"unknown scheme {spec!r}")
        return maker()
    if isinstance(spec, dict):
        extra = set(spec) - {"kind", "tableau", "base", "coefficients"}
        if extra:
            raise ConfigError(f"unknown scheme keys {sorted(extra)}")
        kind = spec.get("kind")
        if kind == "composed":
            if "base" not in spec:
                raise ConfigError("composed scheme needs a base")
            base = parse_scheme(spec["base"])
            coefficients = spec.get("coefficients")
            try:
                if coefficients is None:
                    return composed(base)
                return composed(base, tuple(float(g) for g in coefficients))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad composition: {exc}") from exc
        if kind in ("rks", "rksb"):
            name = spec.get("tableau", "heun")
            tableau = _TABLEAUS.get(name)
            if tableau is None:
                raise ConfigError(f"unknown tableau {name!r}")
            return rk_split(tableau) if kind == "rks" else rk_split_b(tableau)
        if kind in _SHORTHAND:
            return _SHORTHAND[kind]()
        raise ConfigError(f"unknown scheme kind {kind!r}")
    raise ConfigError(f"scheme must be a string or object, got {type(spec).__name__}")


def _number(raw, key, positive=False, nonnegative=False):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{key} must be a number")
    value = float(raw)
    if not np.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    if positive and value <= 0.0:
        raise ConfigError(f"{key} must be > 0")
    if nonnegative and value < 0.0:
        raise ConfigError(f"{key} must be >= 0")
    return value


def _vector(raw, key, dim):
    if not isinstance(raw, (list, tuple)) or len(raw) != dim:
        raise ConfigError(f"{key} must be a list of {dim} numbers")
    return np.array([_number(v, key) for v in raw])


def steps_for(t_final: float, h: float) -> int:
    """Integer step count, requiring t_final/h integral up to a few ulp."""
    ratio = t_final / h
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 8.0 * np.spacing(max(abs(ratio), 1.0)):
        raise ConfigError(
            f"t_final={t_final:g} is not an integer number of steps of h={h:g}")
    return n


def load_config(path, command: str) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")

    problem = raw.get("problem")
    if problem not in ("planar", "elastic"):
        raise ConfigError("problem must be 'planar' or 'elastic'")
    dim = 1 if problem == "planar" else 3

    params = None
    if problem == "elastic":
        try:
            params = ElasticPendulumParams(
                m=_number(raw.get("m", 1.0), "m", positive=True),
                k=_number(raw.get("k", 1.0), "k", positive=True),
                ell=_number(raw.get("ell", 1.0), "ell", positive=True),
                gravity=tuple(_vector(raw.get("gravity", (0.0, 0.0, -1.0)),
                                      "gravity", 3)),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    elif any(key in raw for key in ("m", "k", "ell", "gravity", "mu")):
        raise ConfigError("m/k/ell/gravity/mu apply to the elastic problem only")

    epsilon = _number(raw.get("epsilon", 0.0), "epsilon", nonnegative=True)
    t_final = _number(raw.get("t_final"), "t_final", positive=True) \
        if "t_final" in raw else None
    if t_final is None:
        raise ConfigError("t_final is required")

    h_raw = raw.get("h")
    if h_raw is None:
        raise ConfigError("h is required")
    if isinstance(h_raw, (list, tuple)):
        h_values = tuple(_number(v, "h", positive=True) for v in h_raw)
    else:
        h_values = (_number(h_raw, "h", positive=True),)
    if not h_values:
        raise ConfigError("h must not be empty")
    for h in h_values:
        steps_for(t_final, h)

    scheme = parse_scheme(raw["scheme"]) if "scheme" in raw else None
    schemes = tuple(parse_scheme(s) for s in raw.get("schemes", ()))

    initial_q = _vector(raw["initial_q"], "initial_q", dim) \
        if "initial_q" in raw else None
    initial_p = _vector(raw["initial_p"], "initial_p", dim) \
        if "initial_p" in raw else None
    if (initial_q is None) != (initial_p is None):
        raise ConfigError("initial_q and initial_p must be given together")

    outputs = raw.get("outputs", ["states"])
    if not isinstance(outputs, (list, tuple)) or not outputs:
        raise ConfigError("outputs must be a non-empty list")
    for name in outputs:
        if name not in ALLOWED_OUTPUTS:
            raise ConfigError(f"unknown output {name!r}")
    outputs = tuple(outputs)
    if "momentum" in outputs and problem != "elastic":
        raise ConfigError("momentum output needs the elastic problem")
    if "drift" in outputs and command != "releq":
        raise ConfigError("drift output is produced by the releq command")

    mu = _number(raw["mu"], "mu") if "mu" in raw else None

    # command-specific shape checks
    if command in ("run", "phase"):
        if scheme is None:
            raise ConfigError(f"{command} needs a scheme")
        if initial_q is None:
            raise ConfigError(f"{command} needs initial_q/initial_p")
    elif command == "converge":
        if scheme is None and not schemes:
            raise ConfigError("converge needs a scheme (or schemes)")
        if initial_q is None:
            raise ConfigError("converge needs initial_q/initial_p")
        if len(h_values) < 3:
            raise ConfigError("converge needs at least 3 step sizes in h")
    elif command == "compare":
        if len(schemes) < 2:
            raise ConfigError("compare needs at least 2 schemes")
        if len(h_values) != 1:
            raise ConfigError("compare runs at a single h")
        if initial_q is None:
            raise ConfigError("compare needs initial_q/initial_p")
    elif command == "releq":
        if problem != "elastic":
            raise ConfigError("releq needs the elastic problem")
        if scheme is None:
            raise ConfigError("releq needs a scheme")
        if mu is None and initial_q is None:
            raise ConfigError("releq needs mu or explicit initial data")
        if mu is not None and mu == 0.0:
            raise ConfigError("releq needs mu != 0")
    else:
        raise ConfigError(f"unknown command {command!r}")

    return ExperimentConfig(
        stem=path.stem, command=command, problem=problem, epsilon=epsilon,
        h_values=h_values, t_final=t_final, scheme=scheme, schemes=schemes,
        initial_q=initial_q, initial_p=initial_p, outputs=outputs,
        params=params, mu=mu)


def build_system(cfg: ExperimentConfig):
    if cfg.problem == "planar":
        return planar_pendulum(epsilon=cfg.epsilon)
    return elastic_pendulum(cfg.params, epsilon=cfg.epsilon)
