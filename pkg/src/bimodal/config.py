"""JSON run configuration: schema, validation and conversion to model objects.

Every physical quantity carries its unit in the key name. A minimal file::

    {"antenna": {"table1_delta_l_nm": 0},
     "emitter": {"pump_per_s": 1e9, "theta_deg": 90, "omega_qe_thz_over_2pi": "midpoint"}}
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .errors import ConfigError
from .model import THZ, AntennaModel, EmitterModel, antenna_from_dict, table1_antenna
from .qspace import SpaceDescriptor

OBSERVABLES = (
    "rate",
    "rate_1",
    "rate_2",
    "n_1",
    "n_2",
    "p_0",
    "p_1",
    "p_2",
    "log10_p2_over_p1",
    "e_n",
    "p_bell",
    "phi_star",
    "p_10",
    "p_01",
    "p_e",
    "residual",
    "discarded_weight",
)

_MODE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["omega_thz_over_2pi", "gamma_scat_thz_over_2pi", "gamma_abs_thz_over_2pi", "kappa_thz_over_2pi"],
    "properties": {
        "omega_thz_over_2pi": {"type": "number", "exclusiveMinimum": 0},
        "gamma_scat_thz_over_2pi": {"type": "number", "exclusiveMinimum": 0},
        "gamma_abs_thz_over_2pi": {"type": "number", "minimum": 0},
        "kappa_thz_over_2pi": {"type": "number", "minimum": 0},
        "purcell_f": {"type": "number", "exclusiveMinimum": 0},
        "efficiency": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    },
}

ANTENNA_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["modes"],
    "properties": {
        "label": {"type": "string"},
        "modes": {"type": "array", "minItems": 2, "maxItems": 2, "items": _MODE_SCHEMA},
        "mode_axes_deg": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
        "reference_dipole_cm": {"type": "number", "exclusiveMinimum": 0},
        "source": {"type": "object"},
    },
}

_TABLE_REF_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["table1_delta_l_nm"],
    "properties": {"table1_delta_l_nm": {"enum": [0, 12, 24, 81, 93, 105]}},
}

_EMITTER_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "omega_qe_thz_over_2pi": {
            "oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"enum": ["midpoint", "optimal"]}]
        },
        "dipole_cm": {"type": "number", "exclusiveMinimum": 0},
        "theta_deg": {"type": "number"},
        "gamma_d_per_s": {"type": "number", "minimum": 0},
        "pump_per_s": {"type": "number", "minimum": 0},
        "epsilon_host": {"type": "number", "minimum": 1},
    },
}

_AXIS_NAMES = ["pump_per_s", "omega_qe_thz_over_2pi", "dipole_cm", "theta_deg", "table1_delta_l_nm"]

_AXIS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name"],
    "properties": {
        "name": {"enum": _AXIS_NAMES},
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "num": {"type": "integer", "minimum": 2},
        "scale": {"enum": ["log", "linear"]},
        "values": {"type": "array", "minItems": 1, "items": {"type": "number"}},
    },
}

RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["antenna"],
    "properties": {
        "antenna": {"oneOf": [{"type": "string"}, _TABLE_REF_SCHEMA, ANTENNA_SCHEMA]},
        "emitter": _EMITTER_SCHEMA,
        "truncation": {
            "oneOf": [
                {"type": "integer", "minimum": 2},
                {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "integer", "minimum": 2}},
            ]
        },
        "outputs": {"type": "array", "items": {"enum": list(OBSERVABLES)}, "uniqueItems": True},
        "log_base": {"enum": [2, 10, "2", "10", "e"]},
        "rate_convention": {"enum": ["plain", "angular"]},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["axes"],
            "properties": {
                "name": {"type": "string"},
                "axes": {"type": "array", "minItems": 1, "maxItems": 2, "items": _AXIS_SCHEMA},
            },
        },
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration.

    ``omega_qe_mode`` is ``"value"``, ``"midpoint"`` or ``"optimal"``; in the
    last two cases ``emitter.omega_qe`` holds the midpoint placeholder and the
    caller resolves the final frequency.
    """

    antenna: AntennaModel
    emitter: EmitterModel
    space: SpaceDescriptor = SpaceDescriptor()
    outputs: tuple[str, ...] = OBSERVABLES
    log_base: object = 2
    omega_qe_mode: str = "midpoint"
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def sha256(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def validate(raw: dict) -> None:
    try:
        jsonschema.validate(raw, RUN_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {where}: {exc.message}") from None


def load_antenna_file(path) -> AntennaModel:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read antenna file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    try:
        jsonschema.validate(raw, ANTENNA_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"{path}: invalid antenna description: {exc.message}") from None
    return antenna_from_dict(raw)


def _antenna(entry, base_dir: Path) -> AntennaModel:
    if isinstance(entry, str):
        path = Path(entry)
        return load_antenna_file(path if path.is_absolute() else base_dir / path)
    if "table1_delta_l_nm" in entry:
        return table1_antenna(entry["table1_delta_l_nm"])
    return antenna_from_dict(entry)


def _space(entry) -> SpaceDescriptor:
    if entry is None:
        return SpaceDescriptor()
    if isinstance(entry, int):
        return SpaceDescriptor.uniform(entry)
    return SpaceDescriptor(tuple(entry))


def build_emitter(antenna: AntennaModel, em: dict, rate_convention: str = "plain") -> tuple[EmitterModel, str]:
    """Emitter from the ``emitter`` block; returns it with the frequency mode."""
    scale = 2.0 * math.pi if rate_convention == "angular" else 1.0
    omega = em.get("omega_qe_thz_over_2pi", "midpoint")
    if isinstance(omega, str):
        mode, omega_qe = omega, antenna.midpoint
    else:
        mode, omega_qe = "value", omega * THZ
    defaults = EmitterModel(omega_qe=omega_qe)
    emitter = EmitterModel(
        omega_qe=omega_qe,
        dipole_d=em.get("dipole_cm", defaults.dipole_d),
        theta_deg=em.get("theta_deg", defaults.theta_deg),
        gamma_d=em.get("gamma_d_per_s", defaults.gamma_d) * scale,
        pump=em.get("pump_per_s", defaults.pump) * scale,
        epsilon_host=em.get("epsilon_host", defaults.epsilon_host),
    )
    return emitter, mode


def from_dict(raw: dict, base_dir=".", truncation=None, log_base=None) -> RunConfig:
    """Validate ``raw`` and build a RunConfig; CLI overrides win over file values."""
    raw = copy.deepcopy(raw)
    if truncation is not None:
        raw["truncation"] = truncation
    if log_base is not None:
        raw["log_base"] = log_base
    validate(raw)
    try:
        antenna = _antenna(raw["antenna"], Path(base_dir))
        emitter, mode = build_emitter(antenna, raw.get("emitter", {}), raw.get("rate_convention", "plain"))
        space = _space(raw.get("truncation"))
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc).strip("'\"")) from None
    base = raw.get("log_base", 2)
    base = {"2": 2, "10": 10}.get(base, base)
    return RunConfig(
        antenna=antenna,
        emitter=emitter,
        space=space,
        outputs=tuple(raw.get("outputs", OBSERVABLES)),
        log_base=base,
        omega_qe_mode=mode,
        raw=raw,
    )


def load(path, truncation=None, log_base=None) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return from_dict(raw, base_dir=path.parent, truncation=truncation, log_base=log_base)
