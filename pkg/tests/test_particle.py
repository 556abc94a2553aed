import math

import numpy as np
import pytest
from scipy.integrate import quad

from casimir_orient.particle import (
    AXIS_ORIENTATIONS,
    GOLD_PC,
    SIO2_HOUGH,
    AxialTensor,
    Orientation,
    PerfectConductor,
    Spheroid,
    SpheroidGeometry,
    TwoOscillatorDielectric,
    angular_combos,
    depolarizing_factor_axial,
    depolarizing_factors,
    permittivity,
    principal_polarizabilities,
    rotate_tensor,
)


def n3_oracle(R, L):
    """Axial depolarizing factor from the ellipsoidal integral, by quadrature."""
    a, c = R, L / 2.0
    f = lambda s: 1.0 / ((s + c * c) ** 1.5 * (s + a * a))
    # integrate in t = s / (1 + s) style pieces to keep quad happy on [0, inf)
    scale = max(a, c) ** 2
    head, _ = quad(f, 0.0, scale, epsabs=0.0, epsrel=1e-13, limit=500)
    tail, _ = quad(f, scale, np.inf, epsabs=0.0, epsrel=1e-13, limit=500)
    return a * a * c / 2.0 * (head + tail)


def test_sphere():
    n1, n2, n3 = depolarizing_factors(1.0, 2.0)
    assert n3 == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert n1 == n2 and n1 + n2 + n3 == pytest.approx(1.0, abs=1e-15)


def test_frozen_factors():
    # 30-digit values of the integral above
    assert depolarizing_factors(1.0, 4.0)[2] == pytest.approx(0.17356399753396423169, rel=1e-12, abs=0)
    assert depolarizing_factors(1.0, 1.0)[2] == pytest.approx(0.52720028256256984418, rel=1e-12, abs=0)


@pytest.mark.parametrize("aspect", np.geomspace(0.05, 20.0, 40))
def test_against_integral_oracle(aspect):
    R = 1.0
    L = 2.0 * aspect * R
    n1, n2, n3 = depolarizing_factors(R, L)
    assert n3 == pytest.approx(n3_oracle(R, L), abs=1e-10)
    assert n1 + n2 + n3 == pytest.approx(1.0, abs=1e-15)


def test_branch_continuity_and_monotonicity():
    # dense across the series/closed-form switch points on both sides of the sphere
    aspects = np.concatenate([np.linspace(0.9, 1.1, 4001), np.geomspace(0.05, 20.0, 500)])
    aspects.sort()
    vals = np.array([depolarizing_factor_axial(a) for a in aspects])
    assert np.all(np.diff(vals) < 0)
    # no jump where the series hands over to the closed forms (|e^2| = 1e-2)
    for a in (1 / math.sqrt(1.01), 1 / math.sqrt(0.99)):
        lo, hi = depolarizing_factor_axial(a * (1 - 1e-12)), depolarizing_factor_axial(a * (1 + 1e-12))
        assert abs(lo - hi) < 1e-11


def test_shape_labels():
    assert SpheroidGeometry.from_axes(1.0, 4.0).shape == "prolate"
    assert SpheroidGeometry.from_axes(1.0, 1.0).shape == "oblate"
    assert SpheroidGeometry.sphere(1.0).shape == "sphere"


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, -1.0)])
def test_bad_dimensions(bad):
    with pytest.raises(ValueError):
        depolarizing_factors(*bad)


@pytest.mark.parametrize("n3, V", [(0.0, 1.0), (1.0, 1.0), (0.3, 0.0)])
def test_bad_geometry(n3, V):
    with pytest.raises(ValueError):
        SpheroidGeometry(n3, V)


def test_permittivity_examples():
    assert permittivity(SIO2_HOUGH, 0.0) == pytest.approx(3.801, abs=1e-12)
    assert permittivity(SIO2_HOUGH, 1e30) == pytest.approx(1.0, abs=1e-20)
    single = TwoOscillatorDielectric(1.098, 0.0, 2.033e16, 1.88e14)
    assert permittivity(single, 2.033e16) == pytest.approx(1.0 + 1.098 / 2, rel=1e-15, abs=0)


def test_permittivity_monotone_and_bounded():
    w = np.geomspace(1e10, 1e20, 400)
    eps = permittivity(SIO2_HOUGH, w)
    assert np.all(np.diff(eps) < 0)
    assert np.all((eps >= 1.0) & (eps <= permittivity(SIO2_HOUGH, 0.0)))


def test_permittivity_rejects_conductor():
    with pytest.raises(TypeError):
        permittivity(GOLD_PC, 1.0)


def test_material_validation():
    with pytest.raises(ValueError):
        TwoOscillatorDielectric(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        TwoOscillatorDielectric(1.0, 1.0, 0.0, 1.0)


def test_conducting_sphere_polarizabilities():
    a = 0.37
    pp = principal_polarizabilities(SpheroidGeometry.sphere(a), PerfectConductor())
    assert pp.electric.perp / 2 == pytest.approx(a**3, rel=1e-14, abs=0)
    assert pp.electric.axial == pytest.approx(a**3, rel=1e-14, abs=0)
    assert pp.magnetic.perp / 2 == pytest.approx(-(a**3) / 2, rel=1e-14, abs=0)
    assert pp.magnetic.axial == pytest.approx(-(a**3) / 2, rel=1e-14, abs=0)
    assert pp["E"] is pp.electric
    with pytest.raises(KeyError):
        pp["Q"]


def test_dielectric_sphere_clausius_mossotti():
    a = 2.0
    eps = permittivity(SIO2_HOUGH, 0.0)
    pp = principal_polarizabilities(SpheroidGeometry.sphere(a), SIO2_HOUGH, 0.0)
    assert pp.electric.axial == pytest.approx(a**3 * (eps - 1) / (eps + 2), rel=1e-14, abs=0)
    assert pp.magnetic.perp == 0.0 and pp.magnetic.axial == 0.0


def test_conductor_sigma_sign():
    V = 1.0
    prolate = principal_polarizabilities(SpheroidGeometry(0.2, V), GOLD_PC)
    oblate = principal_polarizabilities(SpheroidGeometry(0.7, V), GOLD_PC)
    assert prolate.electric.sigma > 0 > oblate.electric.sigma
    assert prolate.electric.axial > 0 and prolate.magnetic.axial < 0


def test_reduced_polarizabilities_scale_out_volume():
    p = Spheroid(SpheroidGeometry(0.2, 3.5e-20), SIO2_HOUGH)
    q = Spheroid(SpheroidGeometry(0.2, 1.0), SIO2_HOUGH)
    w = np.array([0.0, 1e15])
    np.testing.assert_allclose(p.reduced_polarizabilities(w).electric.axial, q.reduced_polarizabilities(w).electric.axial, rtol=1e-14)


def test_rotate_tensor_examples():
    t = AxialTensor(perp=2.0, axial=5.0)
    z = rotate_tensor(t, AXIS_ORIENTATIONS["z"])
    np.testing.assert_allclose(z, np.diag([1.0, 1.0, 5.0]), atol=1e-15)
    x = rotate_tensor(t, AXIS_ORIENTATIONS["x"])
    np.testing.assert_allclose(x, np.diag([5.0, 1.0, 1.0]), atol=1e-15)


def test_rotation_matches_explicit_matrix_product():
    # R^{-1} diag R with R built from Euler angles (phi about z, then theta about y)
    rng = np.random.default_rng(7)
    t = AxialTensor(perp=1.3, axial=-0.4)
    for _ in range(20):
        th, ph = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        Rz = np.array([[math.cos(ph), -math.sin(ph), 0], [math.sin(ph), math.cos(ph), 0], [0, 0, 1]])
        Ry = np.array([[math.cos(th), 0, math.sin(th)], [0, 1, 0], [-math.sin(th), 0, math.cos(th)]])
        M = Rz @ Ry
        expected = M @ np.diag([t.perp / 2, t.perp / 2, t.axial]) @ M.T
        np.testing.assert_allclose(rotate_tensor(t, Orientation(th, ph)), expected, atol=1e-14)


def test_angular_combos_match_rotation():
    rng = np.random.default_rng(2024)
    t = AxialTensor(perp=0.83, axial=2.17)
    for _ in range(100):
        o = Orientation(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        m = rotate_tensor(t, o)
        c = angular_combos(t, o)
        assert c.perp == pytest.approx(m[0, 0] + m[1, 1], abs=1e-14)
        assert c.zz == pytest.approx(m[2, 2], abs=1e-14)
        assert c.xx_minus_yy == pytest.approx(m[0, 0] - m[1, 1], abs=1e-14)
        assert c.zx == pytest.approx(m[2, 0], abs=1e-14)
        assert c.zy == pytest.approx(m[2, 1], abs=1e-14)
        assert np.trace(m) == pytest.approx(t.trace, abs=1e-14)
        np.testing.assert_allclose(m, m.T, atol=0)


def test_angular_combos_examples():
    t = AxialTensor(perp=1.0, axial=3.0)
    assert angular_combos(t, Orientation(0.0, 0.3)).zz == pytest.approx(3.0, abs=1e-15)
    assert angular_combos(t, Orientation(math.pi / 2, math.pi / 4)).xx_minus_yy == pytest.approx(0.0, abs=1e-15)
    sphere = AxialTensor(perp=2.0, axial=1.0)
    a = angular_combos(sphere, Orientation(0.1, 0.2))
    b = angular_combos(sphere, Orientation(2.0, 5.0))
    assert a == b


def test_orientation_degrees():
    o = Orientation.from_degrees(90.0, 90.0)
    np.testing.assert_allclose(o.axis, [0.0, 1.0, 0.0], atol=1e-15)
