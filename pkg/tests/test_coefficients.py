import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.integrate import quad

from casimir_orient.coefficients import (
    COEFFICIENTS,
    INDEX_ORDER,
    BetaIndex,
    all_indices,
    beta,
    beta_integral,
    evaluate_all,
    evaluate_matrix,
    get,
)

# constant terms of the tabulated exp-polynomials, typed in separately from the table module
AT_ZERO = {
    ("E", 0, 1): F(1, 8),
    ("E", 0, 2): F(1, 4),
    ("E", 2, 1): F(-3, 32),
    ("E", 2, 2): F(-1, 16),
    ("E", 2, 3): F(-3, 32),
    ("E", 3, None): F(1, 32),
    ("E", 4, 1): F(3, 384),
    ("E", 4, 2): F(-15, 960),
    ("E", 4, 3): F(15, 192),
    ("E", 4, 4): F(45, 480),
    ("E", 4, 5): F(9, 96),
    ("M", 0, 1): F(-1, 8),
    ("M", 0, 2): F(-1, 4),
    ("M", 2, 1): F(5, 32),
    ("M", 2, 2): F(3, 16),
    ("M", 2, 3): F(1, 32),
    ("M", 3, None): F(5, 32),
    ("M", 4, 1): F(-165, 960),
    ("M", 4, 2): F(-15, 192),
    ("M", 4, 3): F(-105, 960),
    ("M", 4, 4): F(-3, 96),
    ("M", 4, 5): F(-15, 480),
}


def test_all_indices_enumerated():
    idx = list(all_indices())
    assert len(idx) == 22
    assert {(i.P, i.p, i.q) for i in idx} == set(AT_ZERO)
    assert idx[0] == BetaIndex("E", 0, 1)
    assert all(i.P == "E" for i in idx[:11])


@pytest.mark.parametrize("key", sorted(AT_ZERO, key=str))
def test_exact_value_at_zero(key):
    idx = BetaIndex(*key)
    assert get(idx).value_at_zero == AT_ZERO[key]
    assert beta(idx, 0.0) == float(AT_ZERO[key])


def test_examples():
    assert beta(BetaIndex("E", 0, 1), 0.0) == 0.125
    assert beta(BetaIndex("M", 0, 2), 0.0) == -0.25
    # (1/8)(1 + 2 + 4) e^-2
    assert beta(BetaIndex("E", 0, 1), 1.0) == pytest.approx(0.118418372832036105407, rel=1e-14, abs=0)


@pytest.mark.parametrize("p, q", [(0, 1), (0, 2)])
def test_magnetic_negates_electric_at_order_zero(p, q):
    xs = np.linspace(0, 10, 41)
    np.testing.assert_array_equal(beta(BetaIndex("M", p, q), xs), -beta(BetaIndex("E", p, q), xs))


def test_equal_order_zero_integrals():
    assert beta_integral(BetaIndex("E", 0, 1)) == pytest.approx(0.25, abs=1e-12)
    assert beta_integral(BetaIndex("E", 0, 2)) == pytest.approx(0.25, abs=1e-12)
    assert beta_integral(BetaIndex("M", 0, 1)) == pytest.approx(-0.25, abs=1e-12)
    assert get(BetaIndex("E", 0, 1)).exact_integral() == F(1, 4)


@pytest.mark.parametrize("idx", list(COEFFICIENTS), ids=lambda i: i.label)
def test_moments_match_quadrature(idx):
    f = lambda x: float(beta(idx, x))
    # log-singular second derivative near 0 is harmless; split for robustness
    a, _ = quad(f, 0.0, 5.0, epsabs=1e-14, epsrel=1e-13, limit=400)
    b, _ = quad(f, 5.0, 80.0, epsabs=1e-15, epsrel=1e-13, limit=400)
    assert beta_integral(idx) == pytest.approx(a + b, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("q", [1, 2])
def test_order_zero_positive_and_decreasing(q):
    xs = np.linspace(1.0, 30.0, 300)
    vals = beta(BetaIndex("E", 0, q), xs)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) < 0)


def test_large_xi_envelope():
    xs = np.linspace(10.5, 60.0, 100)
    env = 2.0 * xs**5 * np.exp(-2.0 * xs)
    for idx in COEFFICIENTS:
        assert np.all(np.abs(beta(idx, xs)) < env), idx.label


def test_matrix_and_dict_agree_with_scalar():
    xs = np.array([0.0, 0.3, 1.0, 7.5, 40.0])
    mat = evaluate_matrix(xs)
    assert mat.shape == (22, xs.size)
    d = evaluate_all(xs)
    for k, idx in enumerate(INDEX_ORDER):
        for n, x in enumerate(xs):
            # the two terms cancel at large xi; compare against their magnitude
            scale = (1.0 + x) ** 6 * math.exp(-2.0 * x)
            assert mat[k, n] == pytest.approx(float(beta(idx, x)), rel=1e-14, abs=1e-14 * scale)
        np.testing.assert_array_equal(d[idx], mat[k])


def test_ei_polynomial_structure():
    for c in COEFFICIENTS.values():
        assert len(c.exp_poly) <= 6
        ei = list(c.ei_poly) + [F(0)] * 2
        assert ei[0] == 0 and ei[1] == 0


@pytest.mark.parametrize(
    "args",
    [("X", 0, 1), ("E", 1, 1), ("E", 0, 3), ("E", 3, 1), ("M", 4, 6), ("E", 2, None)],
)
def test_invalid_index(args):
    with pytest.raises(ValueError):
        BetaIndex(*args)


def test_negative_xi_rejected():
    with pytest.raises(ValueError):
        beta(BetaIndex("E", 0, 1), -0.1)


def test_exact_integral_matches_moment_formula():
    # int xi^n e^{-2xi} = n!/2^{n+1};  int xi^n Ei(2xi) = -n!/((n+1) 2^{n+1})
    for c in COEFFICIENTS.values():
        total = sum(a * F(math.factorial(n), 2 ** (n + 1)) for n, a in enumerate(c.exp_poly))
        total -= sum(a * F(math.factorial(n), (n + 1) * 2 ** (n + 1)) for n, a in enumerate(c.ei_poly))
        assert c.exact_integral() == total
