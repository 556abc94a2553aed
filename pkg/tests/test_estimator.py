import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from casimir_orient import OrientationModel
from casimir_orient.particle import GOLD_PC, SIO2_HOUGH, Orientation, Spheroid, SpheroidGeometry
from casimir_orient.potential import SurfacePatch, ThermalState, potential
from casimir_orient.stability import stable_orientation

UM = 1e-6
X = np.array([[1.0, 0.05, 0.05], [1.0, -0.02, 0.01], [2.0, 0.0, 0.0], [0.5, 0.1, -0.3]])


def test_params_and_clone():
    m = OrientationModel(n3=0.2, material="SiO2-hough", temperature=300.0)
    p = m.get_params()
    assert p["n3"] == 0.2 and p["material"] == "SiO2-hough"
    c = clone(m)
    assert c.get_params() == p
    m.set_params(n3=0.7)
    assert m.n3 == 0.7 and c.n3 == 0.2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        OrientationModel().predict(X)


def test_fit_validates():
    with pytest.raises(ValueError):
        OrientationModel(material="lead").fit()
    with pytest.raises(ValueError):
        OrientationModel(n3=1.2).fit()


@pytest.mark.parametrize("material, mat, T", [("gold-PC", GOLD_PC, 0.0), ("SiO2-hough", SIO2_HOUGH, 300.0)])
def test_transform_and_predict_match_functional_core(material, mat, T):
    m = OrientationModel(n3=0.2, volume_um3=4.18879e-6, material=material, temperature=T).fit()
    coeffs = m.transform(X)
    labels = m.predict(X)
    assert coeffs.shape == (4, 4)
    particle = Spheroid(SpheroidGeometry(0.2, 4.18879e-6 * UM**3), mat)
    for row, c, lab in zip(X, coeffs, labels):
        patch = SurfacePatch(row[0] * UM, row[1] / UM, row[2] / UM)
        axis, _ = stable_orientation(particle, patch, ThermalState(T))
        bd = potential(particle, patch, Orientation(), ThermalState(T))
        np.testing.assert_allclose(c, [bd.A, bd.B, bd.C, bd.D], rtol=1e-14, atol=0)
        assert lab == axis.value
    assert set(labels) <= set(m.classes_)


def test_reduced_potential():
    m = OrientationModel(n3=0.7, temperature=300.0).fit()
    u = m.reduced_potential(X, 0.4, 1.0)
    A, B, C, D = m.transform(X).T
    expected = -(A + B * math.cos(0.8) + D * math.cos(2.0) * math.sin(0.4) ** 2)
    np.testing.assert_allclose(u, expected, rtol=1e-15)


def test_input_validation():
    m = OrientationModel().fit()
    with pytest.raises(ValueError):
        m.transform(np.ones((2, 2)))
    with pytest.raises(ValueError):
        m.transform([[0.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        m.transform([[1.0, 2.0, 0.0]])


def test_in_pipeline():
    to_um = FunctionTransformer(lambda Z: Z * np.array([1e6, 1e-6, 1e-6]))
    Xsi = X * np.array([1e-6, 1e6, 1e6])
    pipe = make_pipeline(to_um, OrientationModel(n3=0.2)).fit(Xsi)
    direct = OrientationModel(n3=0.2).fit().predict(X)
    np.testing.assert_allclose(pipe.transform(Xsi), OrientationModel(n3=0.2).fit().transform(X), rtol=1e-12)
    np.testing.assert_array_equal(pipe.predict(Xsi), direct)
