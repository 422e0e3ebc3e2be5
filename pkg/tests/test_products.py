from fractions import Fraction

import numpy as np
import pytest

from starweyl import GaussianRational, OrderingKey, Polynomial, star_mul, star_sin, x_polynomial
from starweyl.quadrature import XPolynomial, product_sin, product_sin_converged, x_times
from starweyl.weyl_poly import intertwine

from conftest import max_abs

ORDS = [OrderingKey.kappa_tau(1), OrderingKey.kappa_tau("1/2"), OrderingKey.kappa_tau(Fraction(-1, 3) + 0j)]


def _as_poly(g: XPolynomial) -> Polynomial:
    # sum_j c_j (uv/(i hbar))^j as an exact polynomial with hbar = 1
    terms = {}
    for j in range(g.degree + 1):
        c = g.coefficient(j) * GaussianRational(0, -1) ** j
        if c:
            terms[(j, j)] = c
    return Polynomial(2, terms)


def _x_exact(O):
    u = Polynomial.var(0, 2)
    v = Polynomial.var(1, 2)
    X = intertwine(u * v, OrderingKey.weyl(), O) * GaussianRational(0, -1)
    # evaluate the hbar powers at hbar = 1, keeping exact coefficients
    terms = {}
    for e, c in X.terms.items():
        total = sum((a for a in c.terms.values()), GaussianRational(0))
        if total:
            terms[e] = total
    return Polynomial(2, terms)


def _hbar_one(p: Polynomial) -> Polynomial:
    terms = {}
    for e, c in p.terms.items():
        total = sum((a for a in c.terms.values()), GaussianRational(0)) if hasattr(c, "terms") else c
        if total:
            terms[e] = total
    return Polynomial(2, terms)


@pytest.mark.parametrize("O", ORDS, ids=["normal", "kappa=1/2", "kappa=-1/3"])
@pytest.mark.parametrize("z", [0, Fraction(1, 3), "1/2"])
def test_x_times_matches_star_product(O, z):
    g = XPolynomial((1, 0, 3), (0, 2, 0), 5, O.kappa)
    zg = GaussianRational.coerce(Fraction(z) if isinstance(z, str) else z)
    X = _x_exact(O)
    lhs = _hbar_one(star_mul(X + Polynomial.const(zg, 2), _as_poly(g), O))
    rhs = _as_poly(x_times(g, Fraction(z) if isinstance(z, str) else z, O))
    assert lhs == rhs


@pytest.mark.parametrize("N", [0, 1, 3])
def test_product_sin_small_n_exact(N):
    O = OrderingKey.kappa_tau(1)
    z = Fraction(1, 4)
    X = _x_exact(O)
    zX = X + Polynomial.const(GaussianRational.coerce(z), 2)
    acc = zX
    for k in range(1, N + 1):
        sq = _hbar_one(star_mul(zX, zX, O))
        factor = Polynomial.const(1, 2) - sq * GaussianRational(Fraction(1, k * k))
        acc = _hbar_one(star_mul(acc, factor, O))
    p = product_sin(z, N, O)
    assert _as_poly(XPolynomial(p.re, p.im, p.den, p.kappa)) == acc


def test_product_sin_scalar_limit():
    # at x = 0 in the normal ordering the product acts on the vacuum level only through z + 1/2
    O = OrderingKey.kappa_tau(1)
    p = product_sin(0.25, 200, O)
    import math
    partial = math.pi * 0.75 * np.prod([1 - 0.75 ** 2 / k ** 2 for k in range(1, 201)])
    assert p(0.0, 0.0) == pytest.approx(partial, rel=1e-12)


def test_product_sin_approaches_closed_form(grid):
    O = OrderingKey.kappa_tau(1)
    exact = star_sin(0.3, O)(*grid)
    e40 = max_abs(product_sin(0.3, 40, O)(*grid), exact)
    e80 = max_abs(product_sin(0.3, 80, O)(*grid), exact)
    # first-order convergence in N
    assert e80 < 0.6 * e40


def test_product_sin_converged_reports_n(grid):
    vals, N, ok, err = product_sin_converged(0.3, OrderingKey.kappa_tau(1), grid, N_max=32, rel_tol=1e-4)
    assert N == 32 and not ok and err > 0


def test_product_sin_rejects_degenerate_kappa():
    with pytest.raises(ValueError):
        product_sin(0.3, 4, OrderingKey.kappa_tau(0.5j))


def test_product_sin_needs_tau_zero():
    with pytest.raises(ValueError):
        product_sin(0.3, 4, OrderingKey.kappa_tau(1, 1))
