import math

import mpmath
import numpy as np
import pytest
from scipy.special import j0

from starweyl import ContourTooCloseError, ConvergenceError, OrderingKey
from starweyl.quadrature import laguerre_psi, laguerre_series, residue_at, residue_profile

from conftest import max_abs

W = OrderingKey.weyl()


def test_residue_zero_is_bessel(grid):
    u, v = grid
    ratio = residue_at(0)(u, v) / j0(2 * (u * v).real)
    assert np.var(ratio) < 1e-20
    assert np.mean(ratio) == pytest.approx(-1j, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, -1, 3])
def test_residues_alternate(k, grid):
    assert max_abs(residue_at(k)(*grid), (-1) ** k * residue_at(0)(*grid)) < 1e-10


def test_residue_contour_clearance():
    # a radius of pi puts the circle through the neighbouring singular points
    with pytest.raises(ContourTooCloseError):
        residue_at(0, radius=math.pi)


@pytest.mark.parametrize("nu", [0.3, -0.7 + 0.2j, 2])
@pytest.mark.parametrize("x", [0.5, -1.2, 2j])
def test_laguerre_series_against_mpmath(nu, x):
    ref = complex(mpmath.laguerre(nu, 0, x))
    assert complex(laguerre_series(nu, x)) == pytest.approx(ref, rel=1e-12, abs=1e-13)


def test_laguerre_integer_degree_is_polynomial():
    x = np.linspace(-2, 2, 7)
    assert max_abs(laguerre_series(2, x), 1 - 2 * x + x * x / 2) < 1e-13


def test_laguerre_series_nonconvergence():
    with pytest.raises(ConvergenceError):
        laguerre_series(0.5, 50.0, max_terms=20)


@pytest.mark.parametrize("z", [0.0, 0.7, 1 + 0.5j, -2.0])
def test_laguerre_dual_forms_agree(z):
    w = np.linspace(-3, 3, 13)
    assert max_abs(laguerre_psi(z, w), laguerre_psi(z, w, "dual")) < 1e-10


@pytest.mark.parametrize("z", [0.0, 0.7, 1 + 0.5j])
def test_laguerre_solves_ode(z):
    w = np.linspace(0.2, 3.0, 8)
    h = 1e-2
    f = lambda x: laguerre_psi(z, x)  # noqa: E731
    d1 = (-f(w + 2 * h) + 8 * f(w + h) - 8 * f(w - h) + f(w - 2 * h)) / (12 * h)
    d2 = (-f(w + 2 * h) + 16 * f(w + h) - 30 * f(w) + 16 * f(w - h) - f(w - 2 * h)) / (12 * h * h)
    assert max_abs((1j * z + w) * f(w) + d1 + w * d2) < 1e-6


@pytest.mark.parametrize("z", [0.0, 0.7, 1.3])
def test_residue_profile_is_laguerre(z):
    w = np.linspace(0.2, 3.0, 8)
    prof = residue_profile(residue_at(0, z=z), w)
    ratio = prof / laguerre_psi(z, w)
    assert max_abs(ratio, ratio[0]) < 1e-10
    # constant -i e^{i pi z/2}
    assert ratio[0] == pytest.approx(-1j * np.exp(0.5j * math.pi * z), abs=1e-10)


def test_laguerre_form_validation():
    with pytest.raises(ValueError):
        laguerre_psi(0.0, 1.0, form="other")
