"""scikit-learn style wrapper around the orientation model.

Rows of ``X`` are surface configurations ``(d, 1/R1, 1/R2)`` with ``d`` in
microns and curvatures in 1/micron, so flat directions are plain zeros.
``transform`` yields the angular coefficients ``(A, B, C, D)``; ``predict``
yields the stable axis label per row.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .particle import MATERIAL_PRESETS, Orientation, Spheroid, SpheroidGeometry
from .potential import (
    DEFAULT_QUAD_TOL,
    DEFAULT_REL_TOL,
    SurfacePatch,
    ThermalState,
    angular_bracket,
    response_moments,
)
from .stability import classify, denoised

UM = 1e-6


class OrientationModel(TransformerMixin, BaseEstimator):
    """Casimir-Polder orientation model for one spheroidal particle.

    Parameters
    ----------
    n3 : float
        Axial depolarizing factor, ``0 < n3 < 1``.
    volume_um3 : float
        Particle volume in cubic microns.
    material : str
        Material preset name (``"gold-PC"`` or ``"SiO2-hough"``).
    temperature : float
        Temperature in kelvin; 0 selects the frequency integral.
    rel_tol, quad_tol : float
        Matsubara truncation and quadrature tolerances.
    """

    def __init__(
        self,
        n3=1.0 / 3.0,
        volume_um3=4.18879e-6,
        material="gold-PC",
        temperature=0.0,
        rel_tol=DEFAULT_REL_TOL,
        quad_tol=DEFAULT_QUAD_TOL,
    ):
        self.n3 = n3
        self.volume_um3 = volume_um3
        self.material = material
        self.temperature = temperature
        self.rel_tol = rel_tol
        self.quad_tol = quad_tol

    def fit(self, X=None, y=None):
        """Validate hyper-parameters and build the particle; ``X`` and ``y`` are ignored."""
        if self.material not in MATERIAL_PRESETS:
            raise ValueError(f"unknown material {self.material!r}; choose from {sorted(MATERIAL_PRESETS)}")
        geom = SpheroidGeometry(float(self.n3), float(self.volume_um3) * UM**3)
        self.particle_ = Spheroid(geom, MATERIAL_PRESETS[self.material])
        self.thermal_ = ThermalState(float(self.temperature))
        self.classes_ = np.array(["x", "y", "z"])
        self.n_features_in_ = 3
        self._moment_cache = {}
        return self

    def _validate(self, X):
        check_is_fitted(self, "particle_")
        X = check_array(X, dtype=float, ensure_min_features=3)
        if X.shape[1] != 3:
            raise ValueError(f"X must have 3 columns (d, 1/R1, 1/R2), got {X.shape[1]}")
        if np.any(X[:, 0] <= 0):
            raise ValueError("separations (first column) must be positive")
        return X

    def _coefficients(self, row):
        d = row[0] * UM
        patch = SurfacePatch(d, row[1] / UM, row[2] / UM)
        key = d
        if key not in self._moment_cache:
            self._moment_cache[key] = response_moments(
                self.particle_, d, self.thermal_, self.rel_tol, self.quad_tol
            )
        return self._moment_cache[key].coefficients(patch.d_over_R1, patch.d_over_R2)

    def transform(self, X):
        """Angular coefficients ``(A, B, C, D)`` per row."""
        X = self._validate(X)
        out = np.empty((X.shape[0], 4))
        for n, row in enumerate(X):
            c = self._coefficients(row)
            out[n] = c["A"], c["B"], c["C"], c["D"]
        return out

    def predict(self, X):
        """Stable axis label (``'x'``, ``'y'`` or ``'z'``) per row."""
        coeffs = self.transform(X)
        return np.array([classify(*denoised({"A": A, "B": B, "D": D})).value for A, B, _, D in coeffs])

    def reduced_potential(self, X, theta, phi):
        """Reduced potential per row for the axis direction ``(theta, phi)`` in radians."""
        X = self._validate(X)
        o = Orientation(theta, phi)
        return np.array([-angular_bracket({**self._coefficients(row), "E_x": 0.0, "E_y": 0.0}, o) for row in X])
