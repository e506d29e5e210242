"""JSON run configuration: schema, validation and conversion to model objects."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

from .belt import BeltConfig
from .counting import CountingConfig
from .engine import ScanGrid
from .errors import ConfigError
from .model import MediumConfig, ProtocolConfig, SpectralDensity

SCHEMA_VERSION = 1

_number = {"type": "number"}
_coeffs = {"type": "array", "items": _number, "maxItems": 9}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "protocol": {
            "type": "object",
            "additionalProperties": False,
            "required": ["omega0", "v", "t0a", "t0b", "spectrum"],
            "properties": {
                "omega0": _number,
                "v": _number,
                "t0a": _number,
                "t0b": _number,
                "L": _number,
                "L_prime": _number,
                "x0": _number,
                "spectrum": {
                    "oneOf": [
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["kind", "delta_omega"],
                            "properties": {"kind": {"const": "gaussian"}, "delta_omega": _number},
                        },
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["kind", "samples"],
                            "properties": {
                                "kind": {"const": "tabulated"},
                                "samples": {
                                    "type": "array",
                                    "minItems": 3,
                                    "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
                                },
                            },
                        },
                    ]
                },
                "medium": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kappa_to_signal": _coeffs,
                        "kappa_from_signal": _coeffs,
                        "kappa_to_idler": _coeffs,
                        "kappa_from_idler": _coeffs,
                    },
                },
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dl_min", "dl_max", "n_points"],
            "properties": {"dl_min": _number, "dl_max": _number, "n_points": {"type": "integer", "minimum": 3}},
        },
        "counting": {
            "type": "object",
            "additionalProperties": False,
            "required": ["baseline_counts"],
            "properties": {
                "baseline_counts": _number,
                "master_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
            },
        },
        "estimate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"delta_v": {"type": "number", "minimum": 0}},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["parameter", "values"],
            "properties": {"parameter": {"type": "string"}, "values": {"type": "array", "items": _number}},
        },
        "belt": {
            "type": "object",
            "additionalProperties": False,
            "required": ["k", "t0a", "t0b", "T_ab", "T_ba"],
            "properties": {
                "k": _number,
                "t0a": _number,
                "t0b": _number,
                "T_ab": _number,
                "T_ba": _number,
                "period": {"type": ["number", "null"]},
                "times": {"type": "array", "items": _number, "minItems": 1},
            },
        },
        "output": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
    },
}


@dataclass(frozen=True)
class RunConfig:
    protocol: ProtocolConfig | None = None
    grid: ScanGrid | None = None
    counting: CountingConfig | None = None
    delta_v: float = 0.0
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    belt: BeltConfig | None = None
    belt_times: tuple = ()
    output: str | None = None
    workers: int = 1
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def _path(err) -> str:
    parts = [str(p) for p in err.absolute_path]
    return ".".join(parts) if parts else "<root>"


def protocol_from_dict(d: dict) -> ProtocolConfig:
    omega0 = float(d["omega0"])
    med = d.get("medium")
    medium = None
    if med is not None:
        medium = MediumConfig.from_coeffs(
            omega0,
            med.get("kappa_to_signal", ()),
            med.get("kappa_from_signal", ()),
            med.get("kappa_to_idler", ()),
            med.get("kappa_from_idler", ()),
        )
    return ProtocolConfig(
        omega0=omega0,
        v=float(d["v"]),
        t0a=float(d["t0a"]),
        t0b=float(d["t0b"]),
        spectrum=SpectralDensity.from_dict(d["spectrum"]),
        medium=medium,
        L=float(d.get("L", 0.0)),
        L_prime=float(d.get("L_prime", 0.0)),
        x0=float(d.get("x0", 0.0)),
    )


def protocol_to_dict(cfg: ProtocolConfig) -> dict:
    return {
        "omega0": cfg.omega0,
        "v": cfg.v,
        "t0a": cfg.t0a,
        "t0b": cfg.t0b,
        "L": cfg.L,
        "L_prime": cfg.L_prime,
        "x0": cfg.x0,
        "spectrum": cfg.spectrum.to_dict(),
        "medium": cfg.medium.to_dict(),
    }


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded JSON document and build the run configuration."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"config field {_path(err)}: {err.message}")
    try:
        protocol = protocol_from_dict(data["protocol"]) if "protocol" in data else None
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"config field protocol: {exc}") from exc
    try:
        grid = ScanGrid(**data["grid"]) if "grid" in data else None
    except ValueError as exc:
        raise ConfigError(f"config field grid: {exc}") from exc
    try:
        counting = CountingConfig(**data["counting"]) if "counting" in data else None
    except ValueError as exc:
        raise ConfigError(f"config field counting: {exc}") from exc
    belt = None
    times = ()
    if "belt" in data:
        b = dict(data["belt"])
        times = tuple(float(t) for t in b.pop("times", ()))
        try:
            belt = BeltConfig(**b)
        except ValueError as exc:
            raise ConfigError(f"config field belt: {exc}") from exc
    sweep = data.get("sweep", {})
    return RunConfig(
        protocol=protocol,
        grid=grid,
        counting=counting,
        delta_v=float(data.get("estimate", {}).get("delta_v", 0.0)),
        sweep_parameter=sweep.get("parameter"),
        sweep_values=tuple(float(x) for x in sweep.get("values", ())),
        belt=belt,
        belt_times=times,
        output=data.get("output"),
        workers=int(data.get("workers", 1)),
        raw=data,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)
