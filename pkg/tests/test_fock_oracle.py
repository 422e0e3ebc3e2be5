import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starweyl import HBAR, OrderingKey, Polynomial, TruncationError, intertwine, star_mul, w2_generators
from starweyl.fock_oracle import (
    FockMatrix,
    defect_matrix,
    matrix_element_check,
    operator_dict,
    represent,
    represent_vacuum_term,
    x_eigenvalue_on_vacuum,
)

NORMAL = OrderingKey.normal()
WEYL = OrderingKey.weyl()
u, v = w2_generators()


@pytest.mark.parametrize("hbar", [1.0, 0.5 - 0.25j])
def test_operator_dictionary(hbar):
    ops = operator_dict(12, hbar)
    assert all(r == 0 for r in ops.check().values())


@pytest.mark.parametrize("p, q, expected", [(0, 0, 1), (3, 3, 6 * (1j) ** 3), (2, 1, 0), (1, 2, 0)])
def test_matrix_element_examples(p, q, expected):
    r = matrix_element_check(p, q)
    assert r["fock"] == pytest.approx(expected, abs=1e-12)
    assert r["star"] == pytest.approx(expected, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8), st.complex_numbers(min_magnitude=0.2, max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_matrix_elements_any_hbar(p, q, hbar):
    r = matrix_element_check(p, q, 24, hbar)
    scale = max(1.0, abs(r["expected"]))
    assert abs(r["fock"] - r["expected"]) <= 1e-10 * scale
    assert abs(r["star"] - r["expected"]) <= 1e-10 * scale


def test_matrix_element_truncation():
    with pytest.raises(TruncationError):
        matrix_element_check(23, 0, N=24)


def test_represent_commutator():
    c = star_mul(u, v, NORMAL) - star_mul(v, u, NORMAL)
    M = represent(c, 10)
    assert np.allclose(M.band, -1j * np.eye(M.valid + 1))


def test_represent_identity_and_vu():
    assert np.allclose(represent(Polynomial.const(1, 2), 6).matrix, np.eye(7))
    M = represent(star_mul(v, u, NORMAL), 6, hbar=1.0).matrix
    # v u e_n = i hbar (n + 1) e_n
    assert np.allclose(np.diag(M)[:6], 1j * np.arange(1, 7))


def test_represent_transports_other_orderings():
    p = star_mul(v, u, WEYL)
    a = represent(p, 8, ordering=WEYL)
    b = represent(intertwine(p, WEYL, NORMAL), 8)
    assert np.allclose(a.matrix, b.matrix)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_represent_is_multiplicative_on_band(seed):
    rng = np.random.default_rng(seed)
    from starweyl import random_polynomial

    f, g = random_polynomial(rng, 2, 3), random_polynomial(rng, 2, 3)
    N = 20
    prod = represent(star_mul(f, g, NORMAL), N)
    F, G = represent(f, N), represent(g, N)
    n = N - 6
    assert np.allclose(prod.matrix[:n, :n], (F.matrix @ G.matrix)[:n, :n], atol=1e-10)


def test_degree_overflow():
    with pytest.raises(TruncationError):
        represent(u ** 5, 4)


@pytest.mark.parametrize("n", range(6))
def test_defect_projection_structure(n):
    D = defect_matrix(n)
    expect = np.eye(D.valid + 1)
    expect[n, n] = 0
    assert np.allclose(D.band, expect, atol=1e-12)
    assert D.rank() == D.valid


def test_vacuum_term_is_projector():
    P = represent_vacuum_term(Polynomial.const(1, 2), Polynomial.const(1, 2), 8)
    assert np.allclose(P.matrix @ P.matrix, P.matrix)
    # v * vacuum = 0 and vacuum * u = 0
    V = represent(v, 8, hbar=1.0).matrix
    U = represent(u, 8, hbar=1.0).matrix
    assert np.allclose(V @ P.matrix, 0)
    assert np.allclose(P.matrix @ U, 0)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_shifted_vacuum_annihilated(n):
    # vacuum * v^n * (X - n - 1/2) = 0
    N = 12
    X = intertwine(u * v, WEYL, NORMAL).to_float(1.0) * (1 / 1j)
    P = represent_vacuum_term(Polynomial.const(1, 2, 1.0), (v ** n).to_float(1.0), N).matrix
    M = P @ (represent(X, N).matrix - (n + 0.5) * np.eye(N + 1))
    assert np.allclose(M[:, : N - n], 0)


def test_x_on_vacuum():
    assert x_eigenvalue_on_vacuum() == pytest.approx(0.5)


def test_fock_matrix_json_and_shape():
    M = represent(star_mul(u, v, NORMAL), 5, hbar=0.5)
    back = FockMatrix.from_json(json.loads(json.dumps(M.to_json())))
    assert np.array_equal(back.matrix, M.matrix) and back.valid == M.valid
    with pytest.raises(ValueError):
        FockMatrix(np.eye(3), 4, 4)
