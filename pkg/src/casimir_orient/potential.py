"""Curvature-expanded Casimir-Polder potential of a spheroid near a curved conductor.

All quantities are SI internally (metres, kelvin, joules). Two reduced forms
are used:

* ``T > 0``:  ``U = -(k_B T V / d^3) * bracket``
* ``T = 0``:  ``U = -(hbar c V / d^4) * bracket``

where ``bracket = A + B cos(2 theta) + D cos(2 phi) sin^2(theta)
+ sin(2 theta) (E_x cos(phi) + E_y sin(phi))`` and ``D = C (d/R1 - d/R2)``.
The ``E_x, E_y`` terms come from the third-derivative coefficient and
vanish for surfaces symmetric under ``x -> -x`` and ``y -> -y``.
The reduced potential reported everywhere is ``-bracket``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import constants
from scipy.integrate import quad, quad_vec
from scipy.optimize import brentq

from . import coefficients as betamod
from .coefficients import BetaIndex
from .particle import AxialTensor, Orientation, Spheroid, rotate_tensor

HBAR = constants.hbar
C_LIGHT = constants.c
K_B = constants.k

XI_CAP = 60.0
DEFAULT_REL_TOL = 1e-12
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_VALIDITY_THRESHOLD = 0.5


class ExpansionValidityWarning(UserWarning):
    """Separation is not small compared with a curvature radius."""


class QuadratureWarning(UserWarning):
    """Adaptive frequency integral did not reach the requested tolerance."""


@dataclass(frozen=True)
class SurfacePatch:
    """Local description of the surface at the point closest to the particle.

    Parameters
    ----------
    d : float
        Particle-surface separation in metres.
    inv_R1, inv_R2 : float
        Signed principal curvatures ``1/R1``, ``1/R2`` in 1/m. Positive when the
        surface curves away from the particle; zero for a flat direction.
    third_deriv : (float, float)
        Dimensionless ``d^2 * d_i (1/R1 + 1/R2)`` for ``i = x, y``.
    """

    d: float
    inv_R1: float = 0.0
    inv_R2: float = 0.0
    third_deriv: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"separation must be positive, got {self.d}")
        object.__setattr__(self, "third_deriv", tuple(float(g) for g in self.third_deriv))
        if len(self.third_deriv) != 2:
            raise ValueError("third_deriv must have two components")
        for ratio in (self.d_over_R1, self.d_over_R2):
            if not abs(ratio) < 1.0:
                raise ValueError(
                    f"|d/R| = {abs(ratio):.3g} >= 1: the curvature expansion does not apply"
                )

    @classmethod
    def from_radii(cls, d: float, R1: float = math.inf, R2: float = math.inf, third_deriv=(0.0, 0.0)):
        return cls(d, _inverse(R1), _inverse(R2), third_deriv)

    @property
    def d_over_R1(self) -> float:
        return self.d * self.inv_R1

    @property
    def d_over_R2(self) -> float:
        return self.d * self.inv_R2

    @property
    def symmetric(self) -> bool:
        return self.third_deriv == (0.0, 0.0)

    def check_validity(self, threshold: float = DEFAULT_VALIDITY_THRESHOLD) -> list[str]:
        """Emit and return warnings for curvature ratios above ``threshold``."""
        messages = []
        for name, ratio in (("d/R1", self.d_over_R1), ("d/R2", self.d_over_R2)):
            if abs(ratio) > threshold:
                msg = f"{name} = {ratio:.3g} exceeds validity threshold {threshold}"
                warnings.warn(msg, ExpansionValidityWarning, stacklevel=3)
                messages.append(msg)
        return messages


def _inverse(R: float) -> float:
    if R == 0:
        raise ValueError("radius of curvature cannot be zero")
    return 0.0 if math.isinf(R) else 1.0 / R


@dataclass(frozen=True)
class ThermalState:
    T: float = 0.0

    def __post_init__(self):
        if not self.T >= 0:
            raise ValueError(f"temperature must be >= 0 K, got {self.T}")

    @property
    def is_zero(self) -> bool:
        return self.T == 0.0


def matsubara_xi(n: int, thermal: ThermalState, d: float) -> float:
    """Dimensionless Matsubara frequency ``xi_n = 2 pi n k_B T d / (hbar c)``."""
    if thermal.is_zero:
        raise ValueError("Matsubara frequencies require T > 0")
    if n < 0:
        raise ValueError("Matsubara index must be non-negative")
    return 2.0 * math.pi * n * K_B * thermal.T * d / (HBAR * C_LIGHT)


def xi_cutoff(rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Frequency beyond which every coefficient is below ``rel_tol``.

    Uses the envelope ``(1 + xi)^6 exp(-2 xi)`` dominating all tabulated
    coefficients; capped at ``XI_CAP``.
    """
    if rel_tol <= 0:
        return XI_CAP
    g = lambda x: 6.0 * math.log1p(x) - 2.0 * x - math.log(rel_tol)
    if g(XI_CAP) > 0:
        return XI_CAP
    return min(XI_CAP, brentq(g, 3.0, XI_CAP))


def _matsubara_grid(thermal: ThermalState, d: float, rel_tol: float):
    xi1 = matsubara_xi(1, thermal, d)
    n_max = int(math.floor(xi_cutoff(rel_tol) / xi1))
    xi = xi1 * np.arange(n_max + 1)
    weights = np.ones_like(xi)
    weights[0] = 0.5
    return xi, weights


def _omega(xi, d):
    return C_LIGHT * np.asarray(xi) / d


# which tensor combination each (p, q) multiplies
_PERP_TERMS = {(0, 1): "one", (2, 1): "s", (4, 1): "s2", (4, 3): "q2"}
_ZZ_TERMS = {(0, 2): "one", (2, 2): "s", (4, 2): "s2", (4, 4): "q2"}


def _geometry_weights(a: float, b: float) -> dict:
    s = a + b
    return {"one": 1.0, "s": s, "s2": s * s, "q2": a * a + b * b}


def summand(particle: Spheroid, patch: SurfacePatch, orientation: Orientation, xi: float) -> float:
    """Curly-bracket content of the expansion at one frequency, divided by ``V``.

    Evaluated term by term from the full rotated tensors; polarizabilities are
    taken at ``omega = c xi / d``.
    """
    a, b = patch.d_over_R1, patch.d_over_R2
    s = a + b
    q2 = a * a + b * b
    gx, gy = patch.third_deriv
    vals = betamod.evaluate_all(xi)
    pp = particle.reduced_polarizabilities(_omega(xi, patch.d))
    total = 0.0
    for P in ("E", "M"):
        tensor = pp[P]
        alpha = rotate_tensor(_scalar_tensor(tensor), orientation)
        a_perp = alpha[0, 0] + alpha[1, 1]
        a_zz = alpha[2, 2]
        a_diff = alpha[0, 0] - alpha[1, 1]
        bt = {(idx.p, idx.q): float(v[0]) for idx, v in vals.items() if idx.P == P}
        total += (
            bt[0, 1] * a_perp
            + bt[0, 2] * a_zz
            + s * (bt[2, 1] * a_perp + bt[2, 2] * a_zz)
            + 0.5 * bt[2, 3] * (a - b) * a_diff
            + bt[3, None] * (alpha[2, 0] * gx + alpha[2, 1] * gy)
            + s * s * (bt[4, 1] * a_perp + bt[4, 2] * a_zz)
            + q2 * (bt[4, 3] * a_perp + bt[4, 4] * a_zz)
            + 0.5 * bt[4, 5] * (a * a - b * b) * a_diff
        )
    return total


def _scalar_tensor(tensor):
    return AxialTensor(float(np.squeeze(tensor.perp)), float(np.squeeze(tensor.axial)))


@dataclass(frozen=True)
class ResponseMoments:
    """Frequency sums (or integrals) of each coefficient times each reduced polarizability.

    ``values[idx] = (m_perp, m_axial)`` with
    ``m_perp = sum' beta_idx(xi_n) * alpha_perp(xi_n) / V`` at ``T > 0`` and
    ``(1 / 2 pi) int beta_idx(xi) alpha_perp(xi) / V dxi`` at ``T = 0``.
    Everything orientation- and curvature-independent lives here.
    """

    values: dict
    d: float
    T: float
    n_terms: int = 0
    quad_error: Optional[float] = None

    def coefficients(self, d_over_R1: float, d_over_R2: float, third_deriv=(0.0, 0.0)) -> dict:
        """Angular coefficients ``A, B, C, D, E_x, E_y`` for one curvature pair."""
        w = _geometry_weights(d_over_R1, d_over_R2)
        s = d_over_R1 + d_over_R2
        A = B = C = E3 = 0.0
        for P in ("E", "M"):
            for key, tag in _PERP_TERMS.items():
                mp, ma = self.values[BetaIndex(P, *key)]
                A += w[tag] * (3.0 * mp + 2.0 * ma) / 4.0
                B -= w[tag] * (2.0 * ma - mp) / 4.0
            for key, tag in _ZZ_TERMS.items():
                mp, ma = self.values[BetaIndex(P, *key)]
                A += w[tag] * (mp + 2.0 * ma) / 4.0
                B += w[tag] * (2.0 * ma - mp) / 4.0
            mp, ma = self.values[BetaIndex(P, 2, 3)]
            C += (2.0 * ma - mp) / 4.0
            mp, ma = self.values[BetaIndex(P, 4, 5)]
            C += s * (2.0 * ma - mp) / 4.0
            mp, ma = self.values[BetaIndex(P, 3)]
            E3 += (2.0 * ma - mp) / 4.0
        gx, gy = third_deriv
        return {
            "A": A,
            "B": B,
            "C": C,
            "D": C * (d_over_R1 - d_over_R2),
            "E_x": E3 * gx,
            "E_y": E3 * gy,
        }


def response_moments(
    particle: Spheroid,
    d: float,
    thermal: ThermalState,
    rel_tol: float = DEFAULT_REL_TOL,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> ResponseMoments:
    """Orientation-independent frequency moments for separation ``d``."""
    if not d > 0:
        raise ValueError("separation must be positive")
    indices = betamod.INDEX_ORDER
    is_electric = np.array([idx.P == "E" for idx in indices])
    if not thermal.is_zero:
        xi, weights = _matsubara_grid(thermal, d, rel_tol)
        table = betamod.evaluate_matrix(xi) * weights
        pp = particle.reduced_polarizabilities(_omega(xi, d))
        perp = np.where(is_electric[:, None], pp.electric.perp, pp.magnetic.perp)
        axial = np.where(is_electric[:, None], pp.electric.axial, pp.magnetic.axial)
        m_perp = np.sum(table * perp, axis=1)
        m_axial = np.sum(table * axial, axis=1)
        values = {idx: (float(m_perp[k]), float(m_axial[k])) for k, idx in enumerate(indices)}
        return ResponseMoments(values, d, thermal.T, n_terms=len(xi))

    if particle.frequency_independent:
        pp = particle.reduced_polarizabilities()
        values = {}
        for idx in indices:
            t = pp[idx.P]
            m = betamod.beta_integral(idx) / (2.0 * math.pi)
            values[idx] = (m * t.perp, m * t.axial)
        return ResponseMoments(values, d, 0.0, quad_error=0.0)

    def integrand(x):
        column = betamod.evaluate_matrix(x)[:, 0]
        pp = particle.reduced_polarizabilities(_omega(x, d))
        perp = np.where(is_electric, pp.electric.perp, pp.magnetic.perp)
        axial = np.where(is_electric, pp.electric.axial, pp.magnetic.axial)
        return np.concatenate([column * perp, column * axial])

    res, err = quad_vec(integrand, 0.0, XI_CAP, epsabs=quad_tol, epsrel=quad_tol, limit=2000)
    scale = max(1.0, float(np.max(np.abs(res))))
    if err > quad_tol * scale:
        warnings.warn(
            f"frequency quadrature reached error {err:.3g} (requested {quad_tol:.3g})",
            QuadratureWarning,
            stacklevel=2,
        )
    res = res / (2.0 * math.pi)
    n = len(indices)
    values = {idx: (float(res[k]), float(res[n + k])) for k, idx in enumerate(indices)}
    return ResponseMoments(values, d, 0.0, quad_error=float(err) / (2.0 * math.pi))


def angular_bracket(coeffs: dict, orientation: Orientation) -> float:
    """``A + B cos 2t + D cos 2p sin^2 t + sin 2t (E_x cos p + E_y sin p)``."""
    t, p = orientation.theta, orientation.phi
    return (
        coeffs["A"]
        + coeffs["B"] * math.cos(2.0 * t)
        + coeffs["D"] * math.cos(2.0 * p) * math.sin(t) ** 2
        + math.sin(2.0 * t) * (coeffs["E_x"] * math.cos(p) + coeffs["E_y"] * math.sin(p))
    )


def energy_scale(volume: float, d: float, thermal: ThermalState) -> float:
    """Energy unit of the reduced potential, in joules."""
    if thermal.is_zero:
        return HBAR * C_LIGHT * volume / d**4
    return K_B * thermal.T * volume / d**3


def si_energy(reduced: float, volume: float, d: float, thermal: ThermalState) -> float:
    """Convert a reduced potential to joules.

    Multiplies by ``k_B T V / d^3`` for ``T > 0`` and by ``hbar c V / d^4`` at
    ``T = 0``; ``V`` in m^3 and ``d`` in m.
    """
    return reduced * energy_scale(volume, d, thermal)


@dataclass(frozen=True)
class PotentialBreakdown:
    """Potential at one configuration together with its angular decomposition."""

    A: float
    B: float
    C: float
    D: float
    U_reduced: float
    U_SI: float
    T: float
    d: float
    orientation: Orientation
    E_x: float = 0.0
    E_y: float = 0.0
    n_terms: int = 0
    quad_error: Optional[float] = None
    warnings: tuple = field(default=())

    @property
    def coefficients(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D, "E_x": self.E_x, "E_y": self.E_y}

    def reduced_at(self, orientation: Orientation) -> float:
        """Reduced potential for another orientation, same particle and surface."""
        return -angular_bracket(self.coefficients, orientation)

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "D": self.D,
            "E_x": self.E_x,
            "E_y": self.E_y,
            "U_reduced": self.U_reduced,
            "U_SI": self.U_SI,
            "T": self.T,
            "d": self.d,
            "theta": self.orientation.theta,
            "phi": self.orientation.phi,
            "n_terms": self.n_terms,
            "quad_error": self.quad_error,
            "warnings": list(self.warnings),
        }


def breakdown_from_moments(
    moments: ResponseMoments,
    particle: Spheroid,
    patch: SurfacePatch,
    orientation: Orientation,
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD,
) -> PotentialBreakdown:
    if moments.d != patch.d:
        raise ValueError("moments were computed for a different separation")
    msgs = tuple(patch.check_validity(validity_threshold))
    coeffs = moments.coefficients(patch.d_over_R1, patch.d_over_R2, patch.third_deriv)
    reduced = -angular_bracket(coeffs, orientation)
    thermal = ThermalState(moments.T)
    return PotentialBreakdown(
        U_reduced=reduced,
        U_SI=si_energy(reduced, particle.volume, patch.d, thermal),
        T=moments.T,
        d=patch.d,
        orientation=orientation,
        n_terms=moments.n_terms,
        quad_error=moments.quad_error,
        warnings=msgs,
        **coeffs,
    )


def potential(
    particle: Spheroid,
    patch: SurfacePatch,
    orientation: Orientation,
    thermal: ThermalState,
    rel_tol: float = DEFAULT_REL_TOL,
    quad_tol: float = DEFAULT_QUAD_TOL,
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD,
) -> PotentialBreakdown:
    """Casimir-Polder potential with its angular coefficients.

    At ``T > 0`` the Matsubara sum (``n = 0`` weighted 1/2) runs to the
    frequency where all coefficients fall below ``rel_tol``, never past
    ``xi = 60``. At ``T = 0`` the frequency integral is done adaptively on
    ``[0, 60]``, or exactly for perfect-conductor particles.
    """
    moments = response_moments(particle, patch.d, thermal, rel_tol, quad_tol)
    return breakdown_from_moments(moments, particle, patch, orientation, validity_threshold)


def direct_reduced_potential(
    particle: Spheroid,
    patch: SurfacePatch,
    orientation: Orientation,
    thermal: ThermalState,
    rel_tol: float = DEFAULT_REL_TOL,
    quad_tol: float = 1e-12,
) -> float:
    """Reduced potential by summing :func:`summand` directly.

    Independent of the moment/coefficient route used by :func:`potential`;
    meant for cross-checks.
    """
    if not thermal.is_zero:
        xi, weights = _matsubara_grid(thermal, patch.d, rel_tol)
        terms = [summand(particle, patch, orientation, x) for x in xi]
        return -float(np.dot(weights, terms))
    f = lambda x: summand(particle, patch, orientation, x)
    total, _ = quad(f, 0.0, XI_CAP, epsabs=quad_tol, epsrel=quad_tol, limit=500)
    return -total / (2.0 * math.pi)


def gold_closed_form_t0(n3: float, volume: float, patch: SurfacePatch, orientation: Orientation) -> float:
    """Zero-temperature energy (J) of a perfectly conducting spheroid, explicit form.

    Independent of the coefficient tables; valid for symmetric surfaces only.
    """
    if not patch.symmetric:
        raise ValueError("closed form assumes a reflection-symmetric surface (third_deriv = 0)")
    a, b = patch.d_over_R1, patch.d_over_R2
    s, q2, ab = a + b, a * a + b * b, a * b
    c2t = math.cos(2.0 * orientation.theta)
    azim = math.cos(2.0 * orientation.phi) * math.sin(orientation.theta) ** 2
    bracket = (
        1.0
        + 9.0 * n3
        - (17.0 + 183.0 * n3 - 14.0 * n3**2) / 30.0 * s
        + (215.0 + 2457.0 * n3 - 434.0 * n3**2) / 420.0 * q2
        + (11.0 + 693.0 * n3 - 266.0 * n3**2) / 210.0 * ab
        + (1.0 - 3.0 * n3)
        / 30.0
        * (
            ((1.0 + 2.0 * n3) * s + (23.0 + 82.0 * n3) / 14.0 * q2 - (25.0 + 38.0 * n3) / 7.0 * ab) * c2t
            + (b - a) * (6.0 * (1.0 + 2.0 * n3) - (27.0 + 62.0 * n3) / 7.0 * s) * azim
        )
    )
    prefactor = HBAR * C_LIGHT * volume / (32.0 * math.pi**2 * n3 * (1.0 - n3**2) * patch.d**4)
    return -prefactor * bracket
