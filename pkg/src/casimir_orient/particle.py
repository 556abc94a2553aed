"""Spheroidal particles: geometry, material response and polarizability tensors.

Polarizabilities are in Gaussian units (length^3) and are evaluated on the
imaginary frequency axis, ``omega`` meaning ``i * omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

# below this |e^2| the closed forms lose digits to cancellation
_SERIES_THRESHOLD = 1e-2


def _n3_series(u: float) -> float:
    # n3 = (1 - u) * sum_k u^k / (2k + 3) with u = e^2, valid for either sign of u
    total = 0.0
    power = 1.0
    for k in range(40):
        total += power / (2 * k + 3)
        power *= u
        if abs(power) < 1e-18:
            break
    return (1.0 - u) * total


def depolarizing_factor_axial(aspect: float) -> float:
    """Depolarizing factor along the symmetry axis for ``aspect = L / (2 R)``."""
    if not aspect > 0:
        raise ValueError("aspect ratio must be positive")
    u = 1.0 - 1.0 / aspect**2  # squared eccentricity, negative when oblate
    if abs(u) < _SERIES_THRESHOLD:
        return _n3_series(u)
    if u > 0:
        e = math.sqrt(u)
        return (1.0 - u) / e**3 * (math.atanh(e) - e)
    eb = math.sqrt(-u)
    return (1.0 + eb**2) / eb**3 * (eb - math.atan(eb))


def depolarizing_factors(R: float, L: float) -> tuple[float, float, float]:
    """Depolarizing factors ``(n1, n2, n3)`` of a spheroid.

    Parameters
    ----------
    R : float
        Equatorial semi-axis.
    L : float
        Full length along the symmetry axis (polar semi-axis is ``L / 2``).
    """
    if R <= 0 or L <= 0:
        raise ValueError("spheroid dimensions must be positive")
    n3 = depolarizing_factor_axial(L / (2.0 * R))
    n1 = (1.0 - n3) / 2.0
    return n1, n1, n3


@dataclass(frozen=True)
class SpheroidGeometry:
    """Axially symmetric ellipsoid described by its axial depolarizing factor and volume."""

    n3: float
    volume: float

    def __post_init__(self):
        if not 0.0 < self.n3 < 1.0:
            raise ValueError(f"n3 must lie in (0, 1), got {self.n3}")
        if not self.volume > 0:
            raise ValueError(f"volume must be positive, got {self.volume}")

    @classmethod
    def from_axes(cls, R: float, L: float) -> SpheroidGeometry:
        _, _, n3 = depolarizing_factors(R, L)
        return cls(n3=n3, volume=4.0 * math.pi * R * R * (L / 2.0) / 3.0)

    @classmethod
    def sphere(cls, radius: float) -> SpheroidGeometry:
        return cls(n3=1.0 / 3.0, volume=4.0 * math.pi * radius**3 / 3.0)

    @property
    def n_perp(self) -> float:
        return (1.0 - self.n3) / 2.0

    @property
    def factors(self) -> tuple[float, float, float]:
        return self.n_perp, self.n_perp, self.n3

    @property
    def shape(self) -> str:
        if math.isclose(self.n3, 1.0 / 3.0, rel_tol=0, abs_tol=1e-15):
            return "sphere"
        return "prolate" if self.n3 < 1.0 / 3.0 else "oblate"


@dataclass(frozen=True)
class PerfectConductor:
    """Ideal conductor: ``eps -> inf`` and ``mu = 0``; frequency independent."""

    name: str = "perfect-conductor"


@dataclass(frozen=True)
class TwoOscillatorDielectric:
    """Two-Lorentzian permittivity on the imaginary axis; frequencies in rad/s."""

    C_uv: float
    C_ir: float
    omega_uv: float
    omega_ir: float
    name: str = "two-oscillator"

    def __post_init__(self):
        for key in ("C_uv", "C_ir", "omega_uv", "omega_ir"):
            if getattr(self, key) < 0:
                raise ValueError(f"{key} must be non-negative")
        if self.omega_uv <= 0 or self.omega_ir <= 0:
            raise ValueError("oscillator frequencies must be positive")


Material = Union[PerfectConductor, TwoOscillatorDielectric]

GOLD_PC = PerfectConductor(name="gold-PC")
SIO2_HOUGH = TwoOscillatorDielectric(
    C_uv=1.098, C_ir=1.703, omega_uv=2.033e16, omega_ir=1.88e14, name="SiO2-hough"
)
MATERIAL_PRESETS = {m.name: m for m in (GOLD_PC, SIO2_HOUGH)}


def permittivity(material: Material, omega):
    """Permittivity ``eps(i omega)`` of a dielectric model at ``omega >= 0``."""
    if isinstance(material, PerfectConductor):
        raise TypeError("a perfect conductor has no finite permittivity; use its closed forms")
    w2 = np.square(omega)
    return (
        1.0
        + material.C_uv * material.omega_uv**2 / (w2 + material.omega_uv**2)
        + material.C_ir * material.omega_ir**2 / (w2 + material.omega_ir**2)
    )


@dataclass(frozen=True)
class AxialTensor:
    """Principal values of an axially symmetric tensor.

    ``perp`` is the sum of the two equal transverse entries, ``axial`` the
    entry along the symmetry axis.
    """

    perp: float
    axial: float

    @property
    def sigma(self):
        return 2.0 * self.axial - self.perp

    @property
    def trace(self):
        return self.perp + self.axial

    def scaled(self, factor: float) -> AxialTensor:
        return AxialTensor(self.perp * factor, self.axial * factor)


@dataclass(frozen=True)
class PrincipalPolarizabilities:
    electric: AxialTensor
    magnetic: AxialTensor

    def __getitem__(self, P: str) -> AxialTensor:
        if P == "E":
            return self.electric
        if P == "M":
            return self.magnetic
        raise KeyError(P)


def _lorentz_depolarized(volume, chi, n):
    # V/(4 pi) * chi / (1 + chi n)
    return volume / (4.0 * math.pi) * chi / (1.0 + chi * n)


def principal_polarizabilities(
    geom: SpheroidGeometry, material: Material, omega=0.0
) -> PrincipalPolarizabilities:
    """Principal-axis polarizabilities at imaginary frequency ``omega`` (rad/s).

    ``omega`` may be an array, in which case tensor entries are arrays too.
    """
    n_perp, n3 = geom.n_perp, geom.n3
    V = geom.volume
    if isinstance(material, PerfectConductor):
        electric = AxialTensor(
            perp=2.0 * V / (4.0 * math.pi * n_perp), axial=V / (4.0 * math.pi * n3)
        )
        magnetic = AxialTensor(
            perp=-2.0 * V / (4.0 * math.pi * (1.0 - n_perp)),
            axial=-V / (4.0 * math.pi * (1.0 - n3)),
        )
        return PrincipalPolarizabilities(electric, magnetic)
    chi = permittivity(material, omega) - 1.0
    electric = AxialTensor(
        perp=2.0 * _lorentz_depolarized(V, chi, n_perp),
        axial=_lorentz_depolarized(V, chi, n3),
    )
    zero = np.zeros_like(chi) if np.ndim(chi) else 0.0
    return PrincipalPolarizabilities(electric, AxialTensor(zero, zero))


@dataclass(frozen=True)
class Spheroid:
    """A spheroidal particle: geometry plus material."""

    geometry: SpheroidGeometry
    material: Material = field(default=GOLD_PC)

    @classmethod
    def from_axes(cls, R: float, L: float, material: Material = GOLD_PC) -> Spheroid:
        return cls(SpheroidGeometry.from_axes(R, L), material)

    @property
    def volume(self) -> float:
        return self.geometry.volume

    @property
    def frequency_independent(self) -> bool:
        return isinstance(self.material, PerfectConductor)

    def polarizabilities(self, omega=0.0) -> PrincipalPolarizabilities:
        return principal_polarizabilities(self.geometry, self.material, omega)

    def reduced_polarizabilities(self, omega=0.0) -> PrincipalPolarizabilities:
        """Polarizabilities divided by the particle volume (dimensionless)."""
        pp = self.polarizabilities(omega)
        inv = 1.0 / self.volume
        return PrincipalPolarizabilities(pp.electric.scaled(inv), pp.magnetic.scaled(inv))


@dataclass(frozen=True)
class Orientation:
    """Direction of the particle's symmetry axis in the surface frame.

    ``theta`` is measured from the surface normal ``z``; ``phi`` from the
    ``x`` principal direction. Radians.
    """

    theta: float = 0.0
    phi: float = 0.0

    @classmethod
    def from_degrees(cls, theta: float, phi: float) -> Orientation:
        return cls(math.radians(theta), math.radians(phi))

    @property
    def axis(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


AXIS_ORIENTATIONS = {
    "x": Orientation(math.pi / 2, 0.0),
    "y": Orientation(math.pi / 2, math.pi / 2),
    "z": Orientation(0.0, 0.0),
}


def rotate_tensor(tensor: AxialTensor, o: Orientation) -> np.ndarray:
    """Full 3x3 tensor in the surface frame ``(x, y, z)``.

    With ``u`` the symmetry axis, ``alpha = (perp/2) I + (axial - perp/2) u u^T``,
    which equals ``R^{-1} diag(perp/2, perp/2, axial) R`` for any rotation
    ``R`` taking the particle axes to the surface axes.
    """
    u = o.axis
    return 0.5 * tensor.perp * np.eye(3) + (tensor.axial - 0.5 * tensor.perp) * np.outer(u, u)


@dataclass(frozen=True)
class AngularCombos:
    perp: float
    zz: float
    xx_minus_yy: float
    zx: float
    zy: float


def angular_combos(tensor: AxialTensor, o: Orientation) -> AngularCombos:
    """Tensor combinations entering the expansion, in closed trigonometric form."""
    s = tensor.sigma
    c2t = math.cos(2.0 * o.theta)
    s2t = math.sin(2.0 * o.theta)
    return AngularCombos(
        perp=0.25 * (3.0 * tensor.perp + 2.0 * tensor.axial - s * c2t),
        zz=0.25 * (tensor.perp + 2.0 * tensor.axial + s * c2t),
        xx_minus_yy=0.5 * s * math.cos(2.0 * o.phi) * math.sin(o.theta) ** 2,
        zx=0.25 * s * s2t * math.cos(o.phi),
        zy=0.25 * s * s2t * math.sin(o.phi),
    )
