"""Run configuration: JSON schema, defaults, and conversion to model objects.

Lengths at this boundary are in microns, angles in degrees, temperatures in
kelvin. Infinite radii are written as ``null`` (or the string ``"inf"``).
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import jsonschema

from .particle import (
    MATERIAL_PRESETS,
    Orientation,
    Spheroid,
    SpheroidGeometry,
    TwoOscillatorDielectric,
)
from .potential import (
    DEFAULT_QUAD_TOL,
    DEFAULT_REL_TOL,
    DEFAULT_VALIDITY_THRESHOLD,
    SurfacePatch,
    ThermalState,
)
from .stability import AXIS_NAMES, GridAxis

UM = 1e-6
DEFAULT_VOLUME_UM3 = 4.0 * math.pi / 3.0 * 0.01**3  # sphere of radius 10 nm


class ConfigError(ValueError):
    """Configuration does not satisfy the schema or is inconsistent."""


_radius = {"oneOf": [{"type": "number"}, {"type": "null"}, {"enum": ["inf", "-inf"]}]}
_axis = {
    "type": "object",
    "required": ["name", "start", "stop", "count"],
    "additionalProperties": False,
    "properties": {
        "name": {"enum": list(AXIS_NAMES)},
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "count": {"type": "integer", "minimum": 1},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "casimir-orient run configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": ["beta", "potential", "scan"]},
        "particle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n3": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "volume_um3": {"type": "number", "exclusiveMinimum": 0},
                "R_um": {"type": "number", "exclusiveMinimum": 0},
                "L_um": {"type": "number", "exclusiveMinimum": 0},
                "material": {
                    "oneOf": [
                        {"enum": sorted(MATERIAL_PRESETS)},
                        {
                            "type": "object",
                            "required": ["C_uv", "C_ir", "omega_uv", "omega_ir"],
                            "additionalProperties": False,
                            "properties": {
                                "C_uv": {"type": "number", "minimum": 0},
                                "C_ir": {"type": "number", "minimum": 0},
                                "omega_uv": {"type": "number", "exclusiveMinimum": 0},
                                "omega_ir": {"type": "number", "exclusiveMinimum": 0},
                            },
                        },
                    ]
                },
            },
        },
        "patch": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "d_um": {"type": "number", "exclusiveMinimum": 0},
                "R1_um": _radius,
                "R2_um": _radius,
                "third_deriv": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "orientation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"theta_deg": {"type": "number"}, "phi_deg": {"type": "number"}},
        },
        "temperature_K": {"type": "number", "minimum": 0},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "axis1": _axis,
                "axis2": _axis,
                "fixed": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "d_um": {"type": "number", "exclusiveMinimum": 0},
                        "R1_um": _radius,
                        "R2_um": _radius,
                        "d_over_R1": {"type": "number"},
                        "R1_over_R2": {"type": "number"},
                        "T": {"type": "number", "minimum": 0},
                    },
                },
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": ["string", "null"]},
                "format": {"enum": ["csv", "json", "text"]},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "matsubara_rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "quad_tol": {"type": "number", "exclusiveMinimum": 0},
                "validity_threshold": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}

DEFAULTS = {
    "particle": {"material": "gold-PC"},
    "patch": {"d_um": 1.0, "R1_um": None, "R2_um": None, "third_deriv": [0.0, 0.0]},
    "orientation": {"theta_deg": 0.0, "phi_deg": 0.0},
    "temperature_K": 0.0,
    "output": {"path": None},
    "tolerances": {
        "matsubara_rel_tol": DEFAULT_REL_TOL,
        "quad_tol": DEFAULT_QUAD_TOL,
        "validity_threshold": DEFAULT_VALIDITY_THRESHOLD,
    },
}


def deep_merge(base: dict, override: dict) -> dict:
    """Recursively merge ``override`` into a copy of ``base``; ``None`` leaves are kept."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _radius_m(value) -> float:
    if value is None or value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    if value == 0:
        raise ConfigError("radius of curvature cannot be zero")
    return float(value) * UM


@dataclass
class RunConfig:
    """Validated, defaults-filled configuration document."""

    data: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> RunConfig:
        if "config" in doc and isinstance(doc["config"], dict):
            # output documents embed the config that produced them
            doc = doc["config"]
        try:
            jsonschema.validate(doc, SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{path}: {exc.message}") from None
        data = deep_merge(DEFAULTS, doc)
        particle = data["particle"]
        has_n3 = "n3" in particle
        has_axes = "R_um" in particle or "L_um" in particle
        if has_n3 and has_axes:
            raise ConfigError("particle: give either n3 (+ volume_um3) or R_um and L_um, not both")
        if has_axes and not ("R_um" in particle and "L_um" in particle):
            raise ConfigError("particle: R_um and L_um must be given together")
        if not has_n3 and not has_axes:
            raise ConfigError("particle: n3 or R_um/L_um is required")
        return cls(data)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    @property
    def command(self) -> Optional[str]:
        return self.data.get("command")

    @property
    def tolerances(self) -> dict:
        t = self.data["tolerances"]
        return {
            "rel_tol": t["matsubara_rel_tol"],
            "quad_tol": t["quad_tol"],
            "validity_threshold": t["validity_threshold"],
        }

    def particle(self) -> Spheroid:
        spec = self.data["particle"]
        material = spec["material"]
        if isinstance(material, str):
            material = MATERIAL_PRESETS[material]
        else:
            material = TwoOscillatorDielectric(**material, name="custom")
        if "n3" in spec:
            volume = spec.get("volume_um3", DEFAULT_VOLUME_UM3) * UM**3
            geom = SpheroidGeometry(spec["n3"], volume)
        else:
            geom = SpheroidGeometry.from_axes(spec["R_um"] * UM, spec["L_um"] * UM)
        return Spheroid(geom, material)

    def patch(self) -> SurfacePatch:
        spec = self.data["patch"]
        return SurfacePatch.from_radii(
            spec["d_um"] * UM,
            _radius_m(spec["R1_um"]),
            _radius_m(spec["R2_um"]),
            tuple(spec["third_deriv"]),
        )

    def orientation(self) -> Orientation:
        o = self.data["orientation"]
        return Orientation.from_degrees(o["theta_deg"], o["phi_deg"])

    def thermal(self) -> ThermalState:
        return ThermalState(self.data["temperature_K"])

    def grid(self) -> tuple[GridAxis, GridAxis, dict]:
        """Scan axes and fixed parameters, converted to SI."""
        spec = self.data.get("grid")
        if not spec or "axis1" not in spec or "axis2" not in spec:
            raise ConfigError("grid: axis1 and axis2 are required for a scan")
        axes = []
        for key in ("axis1", "axis2"):
            a = spec[key]
            scale = UM if a["name"] == "d" else 1.0
            axes.append(GridAxis(a["name"], a["start"] * scale, a["stop"] * scale, a["count"]))
        fixed: dict[str, Any] = {}
        for key, value in spec.get("fixed", {}).items():
            if key == "d_um":
                fixed["d"] = value * UM
            elif key in ("R1_um", "R2_um"):
                fixed[key[:2]] = _radius_m(value)
            else:
                fixed[key] = value
        fixed.setdefault("T", self.data["temperature_K"])
        return axes[0], axes[1], fixed
