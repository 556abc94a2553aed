"""Orientation-dependent Casimir-Polder interaction of spheroidal nanoparticles
with gently curved perfectly reflecting surfaces."""

from .coefficients import BetaCoefficient, BetaIndex, all_indices, beta, beta_integral
from .estimator import OrientationModel
from .particle import (
    GOLD_PC,
    SIO2_HOUGH,
    AxialTensor,
    Orientation,
    PerfectConductor,
    PrincipalPolarizabilities,
    Spheroid,
    SpheroidGeometry,
    TwoOscillatorDielectric,
    angular_combos,
    depolarizing_factors,
    permittivity,
    principal_polarizabilities,
    rotate_tensor,
)
from .potential import (
    ExpansionValidityWarning,
    PotentialBreakdown,
    QuadratureWarning,
    SurfacePatch,
    ThermalState,
    gold_closed_form_t0,
    matsubara_xi,
    potential,
    si_energy,
    summand,
)
from .special import e1, paper_ei
from .stability import GridAxis, StabilityGrid, StableAxis, classify, scan, stable_orientation

__version__ = "0.1.0"
