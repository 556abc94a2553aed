"""Curvature-expansion coefficient functions for a perfectly reflecting surface.

Each coefficient is ``exp_poly(xi) * exp(-2 xi) + ei_poly(xi) * Ei(2 xi)`` with
``Ei(x) = -E1(x)``. Polynomials are stored as exact rationals in ascending
powers of ``xi`` so that values at ``xi = 0`` and the integrals over
``[0, inf)`` are available exactly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction as F
from typing import Iterator, Optional

import numpy as np

from .special import paper_ei

POLARIZATIONS = ("E", "M")

# derivative order -> allowed branch labels
VALID_BRANCHES = {0: (1, 2), 2: (1, 2, 3), 3: (None,), 4: (1, 2, 3, 4, 5)}


@dataclass(frozen=True, order=True)
class BetaIndex:
    """Label of one coefficient: polarization ``P``, derivative order ``p``, branch ``q``.

    ``q`` is ``None`` for the single third-order coefficient.
    """

    P: str
    p: int
    q: Optional[int] = None

    def __post_init__(self):
        if self.P not in POLARIZATIONS:
            raise ValueError(f"polarization must be 'E' or 'M', got {self.P!r}")
        if self.p not in VALID_BRANCHES:
            raise ValueError(f"derivative order must be one of 0, 2, 3, 4, got {self.p!r}")
        if self.q not in VALID_BRANCHES[self.p]:
            allowed = ", ".join(str(q) for q in VALID_BRANCHES[self.p])
            raise ValueError(f"branch q={self.q!r} invalid for p={self.p}; allowed: {allowed}")

    @property
    def label(self) -> str:
        q = "" if self.q is None else str(self.q)
        return f"beta({self.p})_{self.P}|{q}"


def _scaled(factor, coeffs):
    return tuple(F(factor) * F(c) for c in coeffs)


def _poly(*coeffs):
    return tuple(F(c) for c in coeffs)


# Ascending powers of xi. The exp column carries the printed prefactor folded in.
_TABLE = {
    # electric dipole
    BetaIndex("E", 0, 1): (_scaled(F(1, 8), (1, 2, 4)), ()),
    BetaIndex("E", 0, 2): (_scaled(F(1, 4), (1, 2)), ()),
    BetaIndex("E", 2, 1): (_scaled(F(-1, 32), (3, 6, 6, 4)), _poly(0, 0, 0, 0, F(-1, 4))),
    BetaIndex("E", 2, 2): (_scaled(F(-1, 16), (1, 2, -2, 4)), _poly(0, 0, 1, 0, F(-1, 2))),
    BetaIndex("E", 2, 3): (_scaled(F(-1, 32), (3, 6, 2, -4)), _poly(0, 0, 0, 0, F(1, 4))),
    BetaIndex("E", 3): (_scaled(F(1, 32), (1, 2, -2, 4)), _poly(0, 0, F(-1, 2), 0, F(1, 4))),
    BetaIndex("E", 4, 1): (
        _scaled(F(1, 384), (3, 6, 15, 22, 2, -4)),
        _poly(0, 0, 0, 0, F(1, 8), 0, F(-1, 48)),
    ),
    BetaIndex("E", 4, 2): (
        _scaled(F(-1, 960), (15, 542, 259, -546, -14, 28)),
        _poly(0, 0, -2, 0, F(7, 6), 0, F(-7, 120)),
    ),
    BetaIndex("E", 4, 3): (
        _scaled(F(1, 192), (15, 30, -9, 70, 2, -4)),
        _poly(0, 0, 0, 0, F(3, 4), 0, F(-1, 24)),
    ),
    BetaIndex("E", 4, 4): (
        _scaled(F(1, 480), (45, 218, -59, 146, 14, -28)),
        _poly(0, 0, 0, 0, F(2, 3), 0, F(-7, 60)),
    ),
    BetaIndex("E", 4, 5): (
        _scaled(F(1, 96), (9, 18, -27, 50, -2, 4)),
        _poly(0, 0, 0, 0, 1, 0, F(1, 12)),
    ),
    # magnetic dipole
    BetaIndex("M", 0, 1): (_scaled(F(-1, 8), (1, 2, 4)), ()),
    BetaIndex("M", 0, 2): (_scaled(F(-1, 4), (1, 2)), ()),
    BetaIndex("M", 2, 1): (_scaled(F(1, 32), (5, 10, 10, -4)), _poly(0, 0, F(1, 2), 0, F(-1, 4))),
    BetaIndex("M", 2, 2): (_scaled(F(1, 16), (3, 6, 2, -4)), _poly(0, 0, 0, 0, F(-1, 2))),
    BetaIndex("M", 2, 3): (_scaled(F(1, 32), (1, 2, -2, 4)), _poly(0, 0, F(3, 2), 0, F(1, 4))),
    BetaIndex("M", 3): (_scaled(F(1, 32), (5, 10, -2, 4)), _poly(0, 0, 1, 0, F(1, 4))),
    BetaIndex("M", 4, 1): (
        _scaled(F(-1, 960), (165, -438, 339, -466, -14, 28)),
        _poly(0, 0, F(1, 2), 0, 1, 0, F(-7, 120)),
    ),
    BetaIndex("M", 4, 2): (
        _scaled(F(-1, 192), (15, 30, 9, -22, -2, 4)),
        _poly(0, 0, 0, 0, F(1, 4), 0, F(-1, 24)),
    ),
    BetaIndex("M", 4, 3): (
        _scaled(F(-1, 960), (105, 722, 139, -66, -14, 28)),
        _poly(0, 0, F(-3, 2), 0, F(1, 6), 0, F(-7, 120)),
    ),
    BetaIndex("M", 4, 4): (
        _scaled(F(-1, 96), (3, 6, 33, -70, -2, 4)),
        _poly(0, 0, 0, 0, F(3, 2), 0, F(-1, 12)),
    ),
    BetaIndex("M", 4, 5): (
        _scaled(F(-1, 480), (15, 158, 121, -214, 14, -28)),
        _poly(0, 0, F(-5, 2), 0, F(5, 6), 0, F(7, 60)),
    ),
}


@dataclass(frozen=True)
class BetaCoefficient:
    """One tabulated coefficient function.

    ``exp_poly`` multiplies ``exp(-2 xi)``; ``ei_poly`` multiplies ``Ei(2 xi)``.
    Both are tuples of :class:`fractions.Fraction` in ascending powers.
    """

    index: BetaIndex
    exp_poly: tuple
    ei_poly: tuple

    def __post_init__(self):
        if len(self.exp_poly) > 6:
            raise ValueError("exp polynomial degree must be <= 5")
        if len(self.ei_poly) > 7:
            raise ValueError("Ei polynomial degree must be <= 6")
        if any(c != 0 for c in self.ei_poly[:2]):
            raise ValueError("Ei polynomial must have no constant or linear term")

    def __call__(self, xi):
        return _evaluate(self.exp_poly, self.ei_poly, xi)

    @property
    def value_at_zero(self) -> F:
        """Exact value at ``xi = 0``."""
        return self.exp_poly[0] if self.exp_poly else F(0)

    def exact_integral(self) -> F:
        """Exact ``int_0^inf beta(xi) dxi`` as a rational number."""
        total = F(0)
        for n, c in enumerate(self.exp_poly):
            total += c * F(math.factorial(n), 2 ** (n + 1))
        for n, c in enumerate(self.ei_poly):
            total -= c * F(math.factorial(n), (n + 1) * 2 ** (n + 1))
        return total


def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + float(c)
    return acc


def _evaluate(exp_poly, ei_poly, xi):
    scalar = np.ndim(xi) == 0
    x = np.asarray(xi, dtype=float)
    if np.any(x < 0):
        raise ValueError("xi must be non-negative")
    value = _horner(exp_poly, x) * np.exp(-2.0 * x)
    if ei_poly:
        positive = x > 0
        ei_term = np.zeros_like(x)
        if np.any(positive):
            xp = x[positive]
            ei_term[positive] = _horner(ei_poly, xp) * paper_ei(2.0 * xp)
        value = value + ei_term
    return float(value) if scalar else value


COEFFICIENTS = {idx: BetaCoefficient(idx, *polys) for idx, polys in _TABLE.items()}


def all_indices() -> Iterator[BetaIndex]:
    """All 22 valid indices, electric first, ordered by ``(p, q)``."""
    for P in POLARIZATIONS:
        for p, branches in VALID_BRANCHES.items():
            for q in branches:
                yield BetaIndex(P, p, q)


def get(index: BetaIndex) -> BetaCoefficient:
    return COEFFICIENTS[index]


def beta(index: BetaIndex, xi):
    """Evaluate the coefficient ``index`` at ``xi >= 0`` (scalar or array)."""
    return COEFFICIENTS[index](xi)


_integral_cache: dict = {}
_cache_lock = threading.Lock()


def beta_integral(index: BetaIndex) -> float:
    """``int_0^inf beta(xi) dxi`` from the closed-form moments of the two columns.

    Uses ``int xi^n e^{-2 xi} = n!/2^{n+1}`` and
    ``int xi^n Ei(2 xi) = -n!/((n+1) 2^{n+1})``. Results are cached.
    """
    try:
        return _integral_cache[index]
    except KeyError:
        pass
    value = float(COEFFICIENTS[index].exact_integral())
    with _cache_lock:
        _integral_cache.setdefault(index, value)
    return value


INDEX_ORDER = tuple(COEFFICIENTS)
_EXP_MATRIX = np.array([[float(c) for c in COEFFICIENTS[k].exp_poly] + [0.0] * (6 - len(COEFFICIENTS[k].exp_poly)) for k in INDEX_ORDER])
_EI_MATRIX = np.array([[float(c) for c in COEFFICIENTS[k].ei_poly] + [0.0] * (7 - len(COEFFICIENTS[k].ei_poly)) for k in INDEX_ORDER])


def evaluate_matrix(xi) -> np.ndarray:
    """All coefficients on an array of ``xi`` as a ``(22, len(xi))`` array.

    Rows follow :data:`INDEX_ORDER`; a single E1 pass is shared by all rows.
    """
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(x < 0):
        raise ValueError("xi must be non-negative")
    ei = np.zeros_like(x)
    positive = x > 0
    if np.any(positive):
        ei[positive] = paper_ei(2.0 * x[positive])
    powers = x[np.newaxis, :] ** np.arange(7)[:, np.newaxis]
    return (_EXP_MATRIX @ powers[:6]) * np.exp(-2.0 * x) + (_EI_MATRIX @ powers) * ei


def evaluate_all(xi) -> dict:
    """Mapping ``BetaIndex -> ndarray`` of every coefficient at ``xi`` (at least 1-d)."""
    table = evaluate_matrix(xi)
    return {k: table[n] for n, k in enumerate(INDEX_ORDER)}
