"""JSON run configuration (``schema: 1``) shared by every CLI command."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema

from .kinematics import Event
from .polarization import MeasurementBasis
from .scenario import ConfigError, PrimedDetector, Scenario, StationDetector, WavepacketMode, locate_events

SCHEMA_VERSION = 1

_number = {"type": "number"}
_beta = {"type": "number", "exclusiveMinimum": -1, "exclusiveMaximum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "x_o": _number,
        "ct_d": {"type": "number", "exclusiveMinimum": 0},
        "x_d": _number,
        "basis_theta": _number,
        "betas": {"type": "array", "items": _beta},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "trials": {"type": "integer", "minimum": 1},
        "wavepacket": {
            "type": "object",
            "additionalProperties": False,
            "required": ["p0", "sigma_p"],
            "properties": {
                "p0": {"type": "number", "exclusiveMinimum": 0},
                "sigma_p": {"type": "number", "exclusiveMinimum": 0},
                "grid_span": {"type": "number", "exclusiveMinimum": 0},
                "grid_points": {"type": "integer", "minimum": 2},
                "half_width": {"type": "number", "exclusiveMinimum": 0},
                "threshold": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "dt": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "detector_sprime": {
            "type": "object",
            "additionalProperties": False,
            "required": ["beta"],
            "properties": {
                "beta": _beta,
                "rest_x": _number,
                "fraction": {"type": "number"},
                "theta": _number,
            },
        },
        "diagram": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "betas": {"type": "array", "items": _beta},
                "events": {"type": "array", "items": {"enum": ["d", "b", "a", "e", "f"]}},
                "range": {"type": "array", "items": _number, "minItems": 4, "maxItems": 4},
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "file": {"type": "string", "minLength": 1},
            },
        },
    },
}

DEFAULTS = {
    "x_o": 0.0,
    "basis_theta": math.pi / 2,
    "betas": [0.6, -0.6],
    "seed": 0,
    "trials": 100_000,
}


@dataclass(frozen=True)
class Config:
    raw: dict  # normalized config, valid input in its own right

    @property
    def seed(self) -> int:
        return self.raw["seed"]

    @property
    def trials(self) -> int:
        return self.raw["trials"]

    @property
    def x_o(self) -> float:
        return float(self.raw["x_o"])

    @property
    def x_d(self) -> float:
        return float(self.raw["x_d"]) if "x_d" in self.raw else self.x_o + float(self.raw["ct_d"])

    @property
    def ct_d(self) -> float:
        return float(self.raw["ct_d"]) if "ct_d" in self.raw else self.x_d - self.x_o

    @property
    def betas(self) -> list[float]:
        return [float(b) for b in self.raw["betas"]]

    @property
    def basis(self) -> MeasurementBasis:
        return MeasurementBasis(float(self.raw["basis_theta"]))

    @property
    def wavepacket(self) -> Optional[dict]:
        return self.raw.get("wavepacket")

    @property
    def diagram(self) -> dict:
        return self.raw.get("diagram", {})

    def scenario(self) -> Scenario:
        wp = self.wavepacket
        mode = None
        if wp is not None:
            mode = WavepacketMode(
                p0=float(wp["p0"]),
                sigma_p=float(wp["sigma_p"]),
                half_width=float(wp.get("half_width", 0.05)),
                threshold=float(wp.get("threshold", 0.5)),
                dt=float(wp.get("dt", 0.005)),
            )
        sc = Scenario(Event(self.x_o, 0.0), StationDetector(self.x_d, self.basis), None, tuple(self.betas), mode)
        sp = self.raw.get("detector_sprime")
        if sp is not None:
            theta = float(sp["theta"]) if "theta" in sp else self.basis.aligned().theta
            basis = MeasurementBasis(theta)
            beta = float(sp["beta"])
            if "rest_x" in sp:
                det = PrimedDetector(float(sp["rest_x"]), beta, basis)
                sc = Scenario(sc.source, sc.detector_s, det, sc.analysis_betas, sc.wavepacket)
            else:
                sc = sc.place_sprime(float(sp.get("fraction", 0.5)), beta, basis)
        return sc

    def derived(self) -> dict:
        """Quantities computed from the config, echoed for audit."""
        sc = self.scenario()
        ev = locate_events(sc)
        out = {
            "x_d": self.x_d,
            "ct_d": self.ct_d,
            "gamma": {repr(b): 1.0 / math.sqrt((1 - b) * (1 + b)) for b in self.betas},
        }
        if sc.detector_sprime is not None:
            out["detector_sprime_rest_x"] = sc.detector_sprime.rest_x
            out["e_event"] = list(ev.e.as_tuple()) if ev.e is not None else None
        return out


def _field_path(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "config"


def parse_config(data: Any) -> Config:
    """Validate a decoded JSON object and fill in defaults."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"{_field_path(err)}: {err.message}")
    if "ct_d" in data and "x_d" in data:
        raise ConfigError("ct_d: give either ct_d or x_d, not both")
    raw = dict(data)
    for key, value in DEFAULTS.items():
        raw.setdefault(key, list(value) if isinstance(value, list) else value)
    if "ct_d" not in raw and "x_d" not in raw:
        raw["ct_d"] = 1.0
    for key in ("x_o", "ct_d", "x_d", "basis_theta"):
        if key in raw:
            raw[key] = float(raw[key])
    raw["betas"] = [float(b) for b in raw["betas"]]
    cfg = Config(raw)
    if "x_d" in raw and not cfg.x_d > cfg.x_o:
        raise ConfigError(f"x_d: must exceed x_o ({cfg.x_d} <= {cfg.x_o})")
    cfg.scenario()  # surface scenario-level errors now
    return cfg


def load_config(path: Union[str, Path]) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_config(data)
