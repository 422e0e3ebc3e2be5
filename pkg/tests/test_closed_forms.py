import cmath
import json
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starweyl import (
    ConvergenceWarning,
    DivergesError,
    DomainError,
    ExpElement,
    OrderingKey,
    PoleError,
    SingularPointError,
    antivacuum,
    exp_group_mul,
    exp_series,
    intertwine_exp,
    poly_star_exp,
    singular_locus,
    star_cos,
    star_exp_linear,
    star_exp_quadratic,
    star_sin,
    theta_partial_sum,
    vacuum,
    w2_generators,
    x_polynomial,
)
from starweyl.closed_forms import vacuum_two_definitions

from conftest import max_abs

ORDERINGS = [
    OrderingKey.weyl(),
    OrderingKey.normal(),
    OrderingKey.kappa_tau(0.5j),
    OrderingKey.kappa_tau(0.5, 0.25j),
]
IDS = ["weyl", "normal", "kappa=i/2", "kappa=1/2,tau=i/4"]


def test_weyl_closed_form_literal(grid):
    u, v = grid
    t = 0.37
    expected = np.exp(math.tanh(t) * 2 * u * v / 1j) / math.cosh(t)
    assert max_abs(star_exp_quadratic(t, OrderingKey.weyl())(u, v), expected) < 1e-14


@pytest.mark.parametrize("O", ORDERINGS, ids=IDS)
def test_evolution_equation(O, grid):
    # d/dt E(t) = (2X) * E(t), by a fourth-order central difference
    h = 1e-3
    t = 0.3 + 0.1j
    X2 = x_polynomial(O) * 2
    E = lambda s: star_exp_quadratic(s, O)(*grid)  # noqa: E731
    deriv = (-E(t + 2 * h) + 8 * E(t + h) - 8 * E(t - h) + E(t - 2 * h)) / (12 * h)
    rhs = poly_star_exp(X2, star_exp_quadratic(t, O), "left")(*grid)
    assert max_abs(deriv, rhs) < 1e-9 * max(1.0, max_abs(rhs))


@pytest.mark.parametrize("O", ORDERINGS[:3], ids=IDS[:3])
@pytest.mark.parametrize("t", [-0.1, 0.05, 0.08j])
def test_series_matches_closed_form_small_t(O, t, grid):
    assert max_abs(exp_series(t, O, 12)(*grid), star_exp_quadratic(t, O)(*grid)) < 1e-8


@pytest.mark.parametrize("O", ORDERINGS, ids=IDS)
@settings(max_examples=20, deadline=None)
@given(
    s=st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False),
    t=st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False),
)
def test_group_law(O, s, t):
    u = np.array([0.3 + 0.2j, -0.5, 0.1j])
    v = np.array([0.2, 0.4 - 0.1j, -0.3])
    lhs = exp_group_mul(star_exp_quadratic(s, O), star_exp_quadratic(t, O))(u, v)
    rhs = star_exp_quadratic(s + t, O)(u, v)
    assert max_abs(lhs, rhs) < 1e-10 * max(1.0, float(np.max(np.abs(rhs))))


@pytest.mark.parametrize("O", ORDERINGS, ids=IDS)
def test_intertwine_exp_matches_direct(O, grid):
    target = O.with_k([[0, -0.25j], [-0.25j, 0.5]])
    E = star_exp_quadratic(0.45, O)
    assert max_abs(intertwine_exp(E, target)(*grid), star_exp_quadratic(0.45, target)(*grid)) < 1e-12


def test_intertwine_exp_pole():
    W = OrderingKey.weyl()
    k = 1 / math.tanh(0.5)
    with pytest.raises(PoleError):
        intertwine_exp(star_exp_quadratic(0.5, W), W.with_k([[0, k], [k, 0]]))


@pytest.mark.parametrize("kappa", [0, 0.5j, 0.5, -0.3 + 0.2j])
def test_singular_locus_points_raise(kappa):
    O = OrderingKey.kappa_tau(kappa)
    loc = singular_locus(kappa)
    for t in loc.points(-1, 1):
        with pytest.raises(SingularPointError):
            star_exp_quadratic(t, O)
    assert loc.distance(loc.base + 0.1) == pytest.approx(0.1)


def test_singular_locus_weyl_and_normal():
    pts = singular_locus(0).points(-2, 2)
    # i pi/2 + i pi Z
    assert min(abs(p - 0.5j * math.pi) for p in pts) < 1e-15
    assert all(abs(p.real) < 1e-15 and abs((p.imag / math.pi - 0.5) % 1) < 1e-12 for p in pts)
    assert singular_locus(1).empty


@pytest.mark.parametrize("k", [0, 1])
def test_linear_exponential_is_plain_exponential(k, grid):
    s = 0.7 - 0.2j
    E = star_exp_linear(s, k, OrderingKey.weyl())
    coord = grid[k]
    assert max_abs(E(*grid), np.exp(s * coord / 1j)) < 1e-14


# -- vacuum and antivacuum

@pytest.mark.parametrize("O", ORDERINGS, ids=IDS)
def test_vacuum_annihilation(O, grid):
    u, v = w2_generators(1.0)
    vac = vacuum(O)
    assert max_abs(poly_star_exp(v, vac, "left")(*grid)) < 1e-13
    assert max_abs(poly_star_exp(u, vac, "right")(*grid)) < 1e-13
    if O.kappa == 1:
        return
    anti = antivacuum(O)
    assert max_abs(poly_star_exp(u, anti, "left")(*grid)) < 1e-13
    assert max_abs(poly_star_exp(v, anti, "right")(*grid)) < 1e-13


@pytest.mark.parametrize("O", ORDERINGS, ids=IDS)
def test_vacuum_idempotent_and_eigen(O, grid):
    vac = vacuum(O)
    assert max_abs(exp_group_mul(vac, vac)(*grid), vac(*grid)) < 1e-13
    s = 0.35 - 0.2j
    # e_*^{s 2uv/(i hbar)} multiplies the vacuum by e^{s}
    lhs = exp_group_mul(star_exp_quadratic(s, O), vac)(*grid)
    assert max_abs(lhs, cmath.exp(s) * vac(*grid)) < 1e-13


def test_vacuum_weyl_literal(grid):
    u, v = grid
    assert max_abs(vacuum(OrderingKey.weyl())(u, v), 2 * np.exp(-2 * u * v / 1j)) < 1e-14


def test_vacuum_is_limit_of_exponentials(grid):
    # e^{-t} e_*^{t 2uv/(i hbar)} -> vacuum as t -> -inf (Weyl: 2 e^{-t} / (e^t + e^{-t}) ...)
    W = OrderingKey.weyl()
    t = -18.0
    approx = math.exp(-t) * star_exp_quadratic(t, W)(*grid)
    assert max_abs(approx, vacuum(W)(*grid)) < 1e-12


def test_vacuum_times_antivacuum_diverges():
    W = OrderingKey.weyl()
    with pytest.raises(DivergesError):
        exp_group_mul(vacuum(W), antivacuum(W))


def test_vacuum_domain():
    with pytest.raises(DomainError):
        vacuum(OrderingKey.antinormal())
    with pytest.raises(DomainError):
        antivacuum(OrderingKey.normal())


def test_vacuum_two_definitions_agree():
    r = vacuum_two_definitions(0.3, OrderingKey.weyl())
    assert r["max_diff"] < 1e-8


# -- sin_*, cos_*

@pytest.mark.parametrize("O", [OrderingKey.kappa_tau(0.5), OrderingKey.kappa_tau(-0.5 + 0.5j), OrderingKey.normal()])
@pytest.mark.parametrize("z", [0.5, 1.5, -0.5, -2.5])
def test_sin_vanishes_at_half_integers(O, z, grid):
    assert max_abs(star_sin(z, O)(*grid)) < 1e-12


@pytest.mark.parametrize("z", [0.0, 0.3, 1.0])
def test_sin_nonzero_elsewhere(z, grid):
    assert max_abs(star_sin(z, OrderingKey.kappa_tau(0.5))(*grid)) > 1e-2


def test_sin_cos_pythagoras_on_vacuum():
    # both act on the vacuum by their scalar values at z + 1/2
    O = OrderingKey.normal()
    z = 0.2
    vac = vacuum(O)
    s = exp_group_mul
    u = np.array([0.1, 0.4j])
    v = np.array([0.3, -0.2])
    sv = sum(s(e, vac)(u, v) for e in star_sin(z, O).terms)
    cv = sum(s(e, vac)(u, v) for e in star_cos(z, O).terms)
    assert max_abs(sv, math.sin(math.pi * (z + 0.5)) * vac(u, v)) < 1e-12
    assert max_abs(cv, math.cos(math.pi * (z + 0.5)) * vac(u, v)) < 1e-12


def test_sin_diverges_in_weyl_ordering():
    with pytest.raises(DivergesError):
        star_sin(0.3, OrderingKey.weyl())


# -- theta

THETA_POINTS = (np.array([0.1, 0.3 + 0.2j, -0.4, 0.2j, 0.5 - 0.1j]), np.array([0.2, -0.1, 0.3j, 0.4 + 0.1j, -0.2]))


@pytest.mark.parametrize("k", [0, 1])
def test_theta_matches_jacobi_theta(k):
    K = [[0, 0], [0, 0]]
    K[k][k] = -0.5j
    O = OrderingKey(2, K, OrderingKey.standard_j(2))
    u, v = THETA_POINTS
    got = theta_partial_sum(50, k, O)(u, v)
    q = mpmath.exp(-0.5)
    arg = u if k == 0 else -v
    ref = np.array([complex(mpmath.jtheta(3, a, q)) for a in arg])
    assert max_abs(got, ref) < 1e-10


def test_theta_divergence_warning():
    O = OrderingKey(2, [[0, 0], [0, 0.5j]], OrderingKey.standard_j(2))
    with pytest.warns(ConvergenceWarning):
        theta_partial_sum(5, 1, O)


def test_exp_element_json_round_trip(grid):
    E = star_exp_quadratic(0.3 - 0.1j, OrderingKey.kappa_tau(0.5j, 0.25))
    E2 = ExpElement.from_json(json.loads(json.dumps(E.to_json())))
    assert max_abs(E(*grid), E2(*grid)) < 1e-15
