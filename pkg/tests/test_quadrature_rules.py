import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from starweyl import ContourTooCloseError
from starweyl.quadrature import ContourSpec, QuadratureSpec
from starweyl.quadrature.rules import gauss_legendre_composite, line_nodes, s_of_t, subst_nodes, t_of_s, tanh_sinh


def sech_half(t):
    e = np.exp(-np.abs(t) / 2)
    return 2 * e / (1 + e * e)


@pytest.mark.parametrize(
    "f, a, b",
    [
        (np.exp, 0.0, 1.0),
        (lambda x: 1 / np.sqrt(x), 0.0, 1.0),
        (lambda x: np.log(x), 0.0, 2.0),
        (lambda x: np.sqrt(1 - x * x), -1.0, 1.0),
    ],
    ids=["exp", "inv-sqrt", "log", "semicircle"],
)
def test_tanh_sinh_against_scipy(f, a, b):
    r = tanh_sinh(a, b, 1 / 16)
    ref = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    assert np.sum(r.w * f(r.x)) == pytest.approx(ref, rel=1e-11, abs=1e-12)


def test_tanh_sinh_endpoint_distances():
    r = tanh_sinh(2.0, 3.0, 1 / 8)
    assert np.allclose(np.where(r.d_lo <= r.d_hi, 2.0 + r.d_lo, 3.0 - r.d_hi), r.x)
    assert np.all(r.d_lo > 0) and np.all(r.d_hi > 0)
    with pytest.raises(ValueError):
        tanh_sinh(1.0, 1.0, 0.1)


@pytest.mark.parametrize("order", [8, 16])
def test_gauss_legendre_exact_for_polynomials(order):
    x, w = gauss_legendre_composite(-1.0, 2.0, 3, order)
    assert np.sum(w * x ** (2 * order - 1)) == pytest.approx((2.0 ** (2 * order) - 1) / (2 * order), rel=1e-12)


@settings(max_examples=50)
@given(st.floats(-30, 30))
def test_s_map_round_trip(t):
    s = s_of_t(t)
    back = t_of_s(np.array([s + math.pi]), np.array([-s]))[0]
    assert back == pytest.approx(t, abs=1e-9 * max(1.0, math.exp(abs(t) / 2)))


@pytest.mark.parametrize("lo, hi", [(-math.inf, math.inf), (-math.inf, 0.0), (0.0, math.inf), (-math.inf, 2.5)])
def test_substitution_integrates_sech(lo, hi):
    ln = subst_nodes(lo, hi, 1 / 16)
    f = sech_half
    ref = integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    assert np.sum(np.exp(ln.log_w) * f(ln.t)) == pytest.approx(ref, rel=1e-10)


def test_substitution_tail_accurate_near_upper_end():
    ln = subst_nodes(-math.inf, 1.0, 1 / 16)
    near = ln.tail < 1e-3
    assert np.any(near)
    assert np.all(ln.tail[near] > 0)
    # weight (1 - e^{t-1})^{-1/2} integrated against e^{t} is 2 e
    vals = np.exp(ln.log_w + ln.t) / np.sqrt(-np.expm1(-ln.tail))
    assert np.sum(vals) == pytest.approx(2 * math.e, rel=1e-9)


@pytest.mark.parametrize("scheme", ["tanh-sinh", "gauss-legendre"])
def test_line_nodes_panels(scheme):
    spec = QuadratureSpec(scheme=scheme, trunc=30)
    ln = line_nodes(-math.inf, math.inf, spec)
    assert ln.t.min() >= -30 and ln.t.max() <= 30
    # int_{-T}^{T} sech(t/2) dt = 8 atan(tanh(T/4))
    assert np.sum(np.exp(ln.log_w) * sech_half(ln.t)) == pytest.approx(8 * math.atan(math.tanh(7.5)), rel=1e-10)


def test_circle_contour_cauchy():
    c = ContourSpec.circle(0.3 + 0.2j, 0.5)
    z, lw, _ = c.nodes(QuadratureSpec())
    w = np.exp(lw)
    assert np.sum(w / (z - 0.3 - 0.2j)) == pytest.approx(2j * math.pi, abs=1e-13)
    assert abs(np.sum(w * z ** 3)) < 1e-13


def test_segment_contour():
    c = ContourSpec.segment(1 - 1j, 2 + 3j)
    z, lw, _ = c.nodes(QuadratureSpec())
    assert np.sum(np.exp(lw) * z) == pytest.approx(((2 + 3j) ** 2 - (1 - 1j) ** 2) / 2, abs=1e-12)


def test_contour_clearance():
    c = ContourSpec.circle(0, 1)
    c.check_clear([0.5, 2.0], 1e-9)
    with pytest.raises(ContourTooCloseError):
        c.check_clear([1j], 1e-9)
    assert ContourSpec.segment(0, 2).distance_to(1 + 1j) == pytest.approx(1.0)
    assert ContourSpec.line(offset=0.5j).distance_to(3) == pytest.approx(0.5)


def test_spec_validation_and_json():
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(ValueError):
        ContourSpec.line(1.0, 0.0)
    spec = QuadratureSpec()
    assert spec.coarser().nodes_per_unit == spec.nodes_per_unit // 2
    assert spec.longer().trunc == 2 * spec.trunc
    assert spec.to_json()["scheme"] == "tanh-sinh"
