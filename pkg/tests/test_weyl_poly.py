import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starweyl import (
    HBAR,
    DimensionError,
    GaussianRational,
    OrderingKey,
    OrderingMismatchError,
    Polynomial,
    bumping_apply,
    commutator,
    intertwine,
    random_ordering,
    random_polynomial,
    star_mul,
    star_pow,
    w2_generators,
)

u, v = w2_generators()
WEYL = OrderingKey.weyl()
NORMAL = OrderingKey.normal()
ANTI = OrderingKey.antinormal()


def const(c):
    return Polynomial.const(c, 2)


# -- Gaussian rationals

def test_gaussian_rational_reduced_and_exact():
    g = GaussianRational(Fraction(2, 4), Fraction(-6, 8))
    assert (g.re, g.im) == (Fraction(1, 2), Fraction(-3, 4))
    assert GaussianRational.coerce(0.5j) == GaussianRational(0, Fraction(1, 2))
    assert g * g.conjugate() == GaussianRational(Fraction(13, 16))
    assert (g / g) == 1


@given(
    st.fractions(max_denominator=50), st.fractions(max_denominator=50),
    st.fractions(max_denominator=50), st.fractions(max_denominator=50),
)
def test_gaussian_rational_field_axioms(a, b, c, d):
    x, y = GaussianRational(a, b), GaussianRational(c, d)
    assert x + y - y == x
    assert complex(x * y) == pytest.approx(complex(x) * complex(y), rel=1e-12, abs=1e-12)
    if y:
        assert (x / y) * y == x


def test_gaussian_rational_rejects_negative_power():
    with pytest.raises(ValueError):
        GaussianRational(1) ** -1


# -- basic products

def test_weyl_product_of_generators():
    assert star_mul(u, v, WEYL) == u * v + const(HBAR * -0.5j)
    assert star_mul(v, u, WEYL) == u * v + const(HBAR * 0.5j)


def test_normal_and_antinormal_products():
    assert star_mul(u, v, NORMAL) == u * v
    assert star_mul(v, u, NORMAL) == u * v + const(HBAR * 1j)
    assert star_mul(v, u, ANTI) == u * v


@pytest.mark.parametrize("ordering", [WEYL, NORMAL, ANTI, OrderingKey.kappa_tau("1/3", "2")])
def test_canonical_commutator(ordering):
    assert commutator(u, v, ordering) == const(HBAR * -1j)


def test_constants_are_central():
    f = u ** 3 * v + const(2)
    assert star_mul(const(5), f, WEYL) == f * 5
    assert star_mul(f, const(5), WEYL) == f * 5


def test_star_pow():
    assert star_pow(u, 3, WEYL) == u ** 3
    assert star_pow(u * v, 0, WEYL) == const(1)
    # (uv)*(uv) in the Weyl ordering
    assert star_pow(u * v, 2, WEYL) == u ** 2 * v ** 2 + const(HBAR * HBAR * Fraction(1, 4))


def test_float_mode_matches_exact_mode():
    h = 0.3 + 0.7j
    f = u ** 2 * v + u * 3 - v ** 2
    g = v ** 3 + u * v * 2
    O = OrderingKey.kappa_tau(0.25j, -1)
    exact = star_mul(f, g, O).to_float(h)
    floaty = star_mul(f.to_float(h), g.to_float(h), O)
    assert exact.is_close(floaty)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_associativity_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    O = random_ordering(rng, n)
    f, g, h = (random_polynomial(rng, n, 4) for _ in range(3))
    assert star_mul(star_mul(f, g, O), h, O) == star_mul(f, star_mul(g, h, O), O)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_commutator_independent_of_k(seed):
    rng = np.random.default_rng(seed)
    A = random_ordering(rng, 2)
    f, g = random_polynomial(rng, 2, 4), random_polynomial(rng, 2, 4)
    # [f, g] in A, transported to the Weyl ordering, equals the Weyl commutator of the transports
    lhs = intertwine(commutator(f, g, A), A, WEYL)
    rhs = commutator(intertwine(f, A, WEYL), intertwine(g, A, WEYL), WEYL)
    assert lhs == rhs


def test_dimension_mismatch():
    p3 = Polynomial.var(0, 3)
    with pytest.raises(DimensionError):
        star_mul(u, p3, WEYL)
    with pytest.raises(DimensionError):
        star_mul(p3, p3, WEYL)


# -- intertwiners

def test_intertwine_weyl_to_normal_of_uv():
    assert intertwine(u * v, WEYL, NORMAL) == u * v + const(HBAR * 0.5j)
    assert intertwine(u * v, NORMAL, WEYL) == u * v + const(HBAR * -0.5j)


def test_intertwine_tau_shift():
    target = OrderingKey.kappa_tau(0, 2)
    assert intertwine(v ** 2, WEYL, target) == v ** 2 + const(HBAR * 1j)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_intertwiner_homomorphism_and_inverse(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    A = random_ordering(rng, n)
    B = A.with_k(random_ordering(rng, n).K)
    f, g = random_polynomial(rng, n, 4), random_polynomial(rng, n, 4)
    assert intertwine(star_mul(f, g, A), A, B) == star_mul(intertwine(f, A, B), intertwine(g, A, B), B)
    assert intertwine(intertwine(f, A, B), B, A) == f


def test_intertwine_rejects_different_skew_part():
    other = OrderingKey(2, [[0, 0], [0, 0]], [[0, -2], [2, 0]])
    with pytest.raises(OrderingMismatchError):
        intertwine(u, WEYL, other)


# -- bumping

@pytest.mark.parametrize("ordering", [WEYL, NORMAL, OrderingKey.kappa_tau("1/2", "1/3")])
@pytest.mark.parametrize("coeffs", [[1], [0, 1], [2, -1, 3], [1, 0, 0, 1]])
def test_bumping_identity(ordering, coeffs):
    lhs, rhs = bumping_apply(coeffs, ordering)
    assert lhs == rhs


# -- serialization

@pytest.mark.parametrize("p", [u * v + const(HBAR * 0.5j), u ** 3 - v * Fraction(2, 3), const(0)])
def test_polynomial_json_round_trip(p):
    assert Polynomial.from_json(json.dumps(p.to_json())) == p


def test_ordering_json_round_trip():
    O = OrderingKey.kappa_tau("1/3", 0.5j)
    assert OrderingKey.from_json(json.dumps(O.to_json())) == O


def test_evaluate_float_polynomial():
    p = (u * v + u * 2).to_float(1.0)
    assert p.evaluate(1.5, 2.0) == pytest.approx(6.0)


def test_ordering_key_validation():
    with pytest.raises(ValueError):
        OrderingKey(2, [[0, 1], [0, 0]], [[0, -1], [1, 0]])
    with pytest.raises(ValueError):
        OrderingKey(2, [[0, 0], [0, 0]], [[0, -1], [-1, 0]])
