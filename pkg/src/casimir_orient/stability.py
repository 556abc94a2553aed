"""Stable orientations and stability diagrams.

The angular form ``A + B cos 2t + D cos 2p sin^2 t`` (maximised, since the
potential carries an overall minus sign) always peaks on a coordinate axis,
so a particle's preferred orientation is one of x, y, z.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .particle import AXIS_ORIENTATIONS, Spheroid
from .potential import (
    DEFAULT_QUAD_TOL,
    DEFAULT_REL_TOL,
    DEFAULT_VALIDITY_THRESHOLD,
    PotentialBreakdown,
    SurfacePatch,
    ThermalState,
    breakdown_from_moments,
    response_moments,
)

CSV_SCHEMA_VERSION = 1
THREADS_ENV = "CASIMIR_ORIENT_THREADS"
DEFAULT_SEPARATION = 1e-6
MARGIN_RTOL = 1e-12
# B and D below this fraction of |A| are rounding noise (e.g. a sphere whose n_perp is 1 ulp off 1/3)
NOISE_RTOL = 1e-13


class StableAxis(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"

    def __str__(self):
        return self.value


def classify(B: float, D: float) -> StableAxis:
    """Preferred axis from the angular coefficients; exact ties fall to ``Z``."""
    if not (math.isfinite(B) and math.isfinite(D)):
        raise ValueError("B and D must be finite")
    if D > max(0.0, 2.0 * B):
        return StableAxis.X
    if D < min(0.0, -2.0 * B):
        return StableAxis.Y
    return StableAxis.Z


def is_marginal(B: float, D: float, rtol: float = MARGIN_RTOL) -> bool:
    """True when ``(B, D)`` sits on a decision boundary within ``rtol``."""
    scale = abs(B) + abs(D)
    if scale == 0.0:
        return True
    tol = rtol * scale
    return abs(D - max(0.0, 2.0 * B)) <= tol or abs(D - min(0.0, -2.0 * B)) <= tol


def denoised(coeffs: dict, rtol: float = NOISE_RTOL) -> tuple[float, float]:
    """``(B, D)`` with values indistinguishable from rounding noise set to zero."""
    floor = rtol * abs(coeffs["A"])
    B, D = coeffs["B"], coeffs["D"]
    return (0.0 if abs(B) <= floor else B), (0.0 if abs(D) <= floor else D)


def stable_orientation(
    particle: Spheroid,
    patch: SurfacePatch,
    thermal: ThermalState,
    rel_tol: float = DEFAULT_REL_TOL,
    quad_tol: float = DEFAULT_QUAD_TOL,
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD,
    moments=None,
) -> tuple[StableAxis, PotentialBreakdown]:
    """Classify the preferred axis; the breakdown is evaluated at that axis."""
    if not patch.symmetric:
        raise ValueError("axis classification assumes a reflection-symmetric surface")
    if moments is None:
        moments = response_moments(particle, patch.d, thermal, rel_tol, quad_tol)
    coeffs = moments.coefficients(patch.d_over_R1, patch.d_over_R2)
    axis = classify(*denoised(coeffs))
    bd = breakdown_from_moments(moments, particle, patch, AXIS_ORIENTATIONS[axis.value], validity_threshold)
    return axis, bd


AXIS_NAMES = ("d_over_R1", "R1_over_R2", "d", "T")


@dataclass(frozen=True)
class GridAxis:
    """One scan axis; lengths (``d``) in metres."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown scan axis {self.name!r}; choose from {AXIS_NAMES}")
        if self.count < 1:
            raise ValueError("axis count must be >= 1")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


def resolve_cell(params: dict) -> tuple[SurfacePatch, ThermalState]:
    """Turn one set of scan parameters into a surface patch and temperature.

    Recognised keys: ``d_over_R1``, ``R1_over_R2``, ``d`` (m), ``R1`` (m),
    ``R2`` (m), ``T`` (K). When ``d_over_R1`` is given together with a fixed
    ``R1`` and no ``d``, ``|R1|`` sets the scale and the sign of ``d_over_R1``
    sets the sign of ``R1``, so ``d = |d_over_R1| * |R1|``. Without either,
    ``d`` defaults to 1 micron, which is immaterial at ``T = 0`` for perfect
    conductors.
    """
    thermal = ThermalState(params.get("T", 0.0))
    if "d_over_R1" in params:
        x = params["d_over_R1"]
        if "d" in params:
            d = params["d"]
            inv_R1 = x / d
        elif "R1" in params:
            R1 = abs(params["R1"])
            d = abs(x) * R1
            inv_R1 = math.copysign(1.0 / R1, x)
        else:
            d = DEFAULT_SEPARATION
            inv_R1 = x / d
    else:
        if "d" not in params:
            raise ValueError("scan needs either d or d_over_R1")
        d = params["d"]
        R1 = params.get("R1", math.inf)
        inv_R1 = 0.0 if math.isinf(R1) else 1.0 / R1
    if "R1_over_R2" in params:
        inv_R2 = params["R1_over_R2"] * inv_R1
    else:
        R2 = params.get("R2", math.inf)
        inv_R2 = 0.0 if math.isinf(R2) else 1.0 / R2
    return SurfacePatch(d, inv_R1, inv_R2), thermal


@dataclass
class StabilityGrid:
    """Stable-axis labels on a 2D grid, row-major over ``(axis2, axis1)``.

    ``labels[j, i]`` belongs to ``axis2.values[j]`` and ``axis1.values[i]``,
    so ``axis1`` runs horizontally as in the published diagrams.
    """

    axis1: GridAxis
    axis2: GridAxis
    labels: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    marginal: np.ndarray
    errors: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def fractions(self) -> dict:
        """Fraction of successfully evaluated cells per axis label."""
        ok = self.labels != ""
        total = int(ok.sum())
        return {a.value: (float((self.labels == a.value).sum()) / total if total else 0.0) for a in StableAxis}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# casimir-orient stability grid, csv schema v{CSV_SCHEMA_VERSION}\n")
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {json.dumps(value)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.axis1.name, self.axis2.name, "axis_label", "A", "B", "C", "D", "marginal"])
        for j, y in enumerate(self.axis2.values):
            for i, x in enumerate(self.axis1.values):
                writer.writerow(
                    [
                        repr(float(x)),
                        repr(float(y)),
                        self.labels[j, i],
                        repr(float(self.A[j, i])),
                        repr(float(self.B[j, i])),
                        repr(float(self.C[j, i])),
                        repr(float(self.D[j, i])),
                        int(self.marginal[j, i]),
                    ]
                )
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "schema_version": CSV_SCHEMA_VERSION,
            "axis1": asdict(self.axis1),
            "axis2": asdict(self.axis2),
            "metadata": self.metadata,
            "cells": [
                {
                    "label": str(self.labels[j, i]),
                    "A": float(self.A[j, i]),
                    "B": float(self.B[j, i]),
                    "C": float(self.C[j, i]),
                    "D": float(self.D[j, i]),
                    "marginal": bool(self.marginal[j, i]),
                    "error": self.errors.get((j, i)),
                }
                for j in range(self.axis2.count)
                for i in range(self.axis1.count)
            ],
        }


def _thread_count(n_jobs: Optional[int]) -> int:
    if n_jobs is not None:
        return max(1, int(n_jobs))
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else 1


def scan(
    axis1: GridAxis,
    axis2: GridAxis,
    particle: Spheroid,
    fixed: Optional[dict] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    quad_tol: float = DEFAULT_QUAD_TOL,
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD,
    n_jobs: Optional[int] = None,
) -> StabilityGrid:
    """Fill a stability diagram cell by cell.

    ``fixed`` supplies every parameter not swept (see :func:`resolve_cell`).
    Cells that fail (e.g. ``|d/R| >= 1``) get an empty label and an entry in
    ``errors``; the scan carries on. Frequency moments are shared between
    cells with equal separation and temperature.
    """
    if axis1.name == axis2.name:
        raise ValueError("scan axes must differ")
    fixed = dict(fixed or {})
    shape = (axis2.count, axis1.count)
    labels = np.full(shape, "", dtype="<U1")
    out = {k: np.full(shape, np.nan) for k in "ABCD"}
    marginal = np.zeros(shape, dtype=bool)
    errors: dict = {}

    cells = {}
    for j, y in enumerate(axis2.values):
        for i, x in enumerate(axis1.values):
            params = {**fixed, axis1.name: float(x), axis2.name: float(y)}
            try:
                cells[j, i] = resolve_cell(params)
            except ValueError as exc:
                errors[j, i] = str(exc)

    keys = sorted({(patch.d, thermal.T) for patch, thermal in cells.values()})

    def compute(key):
        d, T = key
        try:
            return response_moments(particle, d, ThermalState(T), rel_tol, quad_tol)
        except (ValueError, ArithmeticError) as exc:
            return exc

    workers = _thread_count(n_jobs)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            moments = dict(zip(keys, pool.map(compute, keys)))
    else:
        moments = {key: compute(key) for key in keys}

    beyond = 0
    for (j, i), (patch, thermal) in cells.items():
        if max(abs(patch.d_over_R1), abs(patch.d_over_R2)) > validity_threshold:
            beyond += 1
        m = moments[patch.d, thermal.T]
        if isinstance(m, Exception):
            errors[j, i] = str(m)
            continue
        c = m.coefficients(patch.d_over_R1, patch.d_over_R2)
        B, D = denoised(c)
        labels[j, i] = classify(B, D).value
        marginal[j, i] = is_marginal(B, D)
        for k in "ABCD":
            out[k][j, i] = c[k]

    metadata = {
        "particle": {
            "n3": particle.geometry.n3,
            "volume_m3": particle.volume,
            "material": particle.material.name,
        },
        "fixed": {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in fixed.items()},
        "rel_tol": rel_tol,
        "quad_tol": quad_tol,
        "validity_threshold": validity_threshold,
        "cells_beyond_validity": beyond,
    }
    return StabilityGrid(axis1, axis2, labels, out["A"], out["B"], out["C"], out["D"], marginal, errors, metadata)
