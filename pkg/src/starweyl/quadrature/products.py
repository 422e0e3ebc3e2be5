"""Exact partial products for ``sin_* pi (z + X)``.

For ``tau = 0`` every function of ``X`` has an ordering expression in the
single variable ``x = uv/(i hbar)``, and left multiplication by ``X`` acts on
coefficients through the tridiagonal rule

    (X * g)_j = g_{j-1} + kappa (j + 1/2) g_j + (kappa^2 - 1)/4 (j + 1)^2 g_{j+1}.

Coefficients are kept as Gaussian-integer numerators over one common
integer denominator, so partial products of any length are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..closed_forms import kappa_tau_of, star_sin
from ..weyl_poly import GaussianRational, OrderingKey

__all__ = ["XPolynomial", "x_times", "product_sin", "product_sin_converged"]


def _gauss_fraction(c) -> tuple:
    """``(re_num, im_num, den)`` of an exact complex number."""
    g = GaussianRational.coerce(c)
    re, im = Fraction(g.re), Fraction(g.im)
    d = math.lcm(re.denominator, im.denominator)
    return re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d


@dataclass(frozen=True)
class XPolynomial:
    """``sum_j (re_j + i im_j) / den * x^j`` with ``x = uv/(i hbar)``."""

    re: tuple
    im: tuple
    den: int
    kappa: object
    hbar: complex = 1.0 + 0j

    @property
    def degree(self) -> int:
        return len(self.re) - 1

    def coefficient(self, j: int) -> GaussianRational:
        return GaussianRational._make(self.re[j], self.im[j], self.den)

    def evaluate(self, u, v) -> np.ndarray:
        """Exact Horner evaluation at the binary-rational values of ``x`` (rounded at the end)."""
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        x = (u * v / (1j * complex(self.hbar))).ravel()
        out = np.empty(x.shape, dtype=complex)
        for m, xm in enumerate(x):
            xr = Fraction(float(xm.real))
            xi = Fraction(float(xm.imag))
            L = math.lcm(xr.denominator, xi.denominator)
            a, b = xr.numerator * (L // xr.denominator), xi.numerator * (L // xi.denominator)
            # value = (P + iQ) / (den * L^(deg - j)) after step j
            P, Q = self.re[-1], self.im[-1]
            Lp = 1
            for j in range(self.degree - 1, -1, -1):
                Lp *= L
                P, Q = P * a - Q * b + self.re[j] * Lp, P * b + Q * a + self.im[j] * Lp
            scale = self.den * Lp
            out[m] = float(Fraction(P, scale)) + 1j * float(Fraction(Q, scale))
        shape = np.broadcast(u, v).shape
        out = out.reshape(shape)
        return complex(out) if out.ndim == 0 else out

    __call__ = evaluate


def _canon(re: list, im: list, den: int) -> tuple:
    g = den
    for c in re:
        g = math.gcd(g, c)
        if g == 1:
            break
    if g != 1:
        for c in im:
            g = math.gcd(g, c)
            if g == 1:
                break
    if g > 1:
        re = [c // g for c in re]
        im = [c // g for c in im]
        den //= g
    return re, im, den


def _shift_times(re, im, den, z_num, kappa_num, lam_num, common):
    """``(z + X) * g`` with ``z = z_num/common``, ``kappa/2 = kappa_num/common``, ``(kappa^2-1)/4 = lam_num/common``."""
    n = len(re)
    zr, zi = z_num
    kr, ki = kappa_num
    lr, li = lam_num
    nre = [0] * (n + 1)
    nim = [0] * (n + 1)
    for j in range(n + 1):
        ar = common * re[j - 1] if j >= 1 else 0
        ai = common * im[j - 1] if j >= 1 else 0
        if j < n:
            # (z + kappa (j + 1/2)) g_j
            cr = zr + kr * (2 * j + 1)
            ci = zi + ki * (2 * j + 1)
            ar += cr * re[j] - ci * im[j]
            ai += cr * im[j] + ci * re[j]
        if j + 1 < n:
            s = (j + 1) ** 2
            ar += s * (lr * re[j + 1] - li * im[j + 1])
            ai += s * (lr * im[j + 1] + li * re[j + 1])
        nre[j], nim[j] = ar, ai
    return nre, nim, den * common


def _constants(z, ordering: OrderingKey):
    kappa = ordering.kappa
    tau = ordering.tau
    if tau != 0:
        raise ValueError("exact products are implemented for tau = 0")
    zr, zi, zd = _gauss_fraction(z)
    k = GaussianRational.coerce(kappa) * GaussianRational._make(1, 0, 2)
    kr, ki, kd = _gauss_fraction(k)
    lam = (GaussianRational.coerce(kappa) ** 2 - 1) * GaussianRational._make(1, 0, 4)
    lr, li, ld = _gauss_fraction(lam)
    common = math.lcm(zd, kd, ld)
    return (
        (zr * (common // zd), zi * (common // zd)),
        (kr * (common // kd), ki * (common // kd)),
        (lr * (common // ld), li * (common // ld)),
        common,
    )


def x_times(g: XPolynomial, z, ordering: OrderingKey) -> XPolynomial:
    """``(z + X) * g`` exactly (``z`` must be exact or a binary float)."""
    zc, kc, lc, common = _constants(z, ordering)
    re, im, den = _shift_times(list(g.re), list(g.im), g.den, zc, kc, lc, common)
    re, im, den = _canon(re, im, den)
    return XPolynomial(tuple(re), tuple(im), den, g.kappa, g.hbar)


def product_sin(z, N: int, ordering: OrderingKey, hbar: complex = 1.0) -> XPolynomial:
    """``pi (z + X) * prod_{k=1}^{N} (1 - (z + X)^2 / k^2)`` as an exact polynomial in ``x``.

    The factor ``pi`` is applied on evaluation, so the stored polynomial is
    exact; ``z`` and ``kappa`` must be exact (``int``, ``Fraction``, decimal
    string or binary float).
    """
    kappa = complex(ordering.kappa)
    plus = (kappa + 1) / (kappa - 1) if kappa != 1 else math.inf
    if plus != math.inf and abs(abs(plus) - 1) < 1e-14:
        raise ValueError("the product needs |(kappa + 1)/(kappa - 1)| != 1")
    zc, kc, lc, common = _constants(z, ordering)
    re, im, den = [1], [0], 1
    for k in range(N, 0, -1):
        # g <- g - (z + X)^2 g / k^2, with the same common denominator
        hr, hi, hd = _shift_times(re, im, den, zc, kc, lc, common)
        hr, hi, hd = _shift_times(hr, hi, hd, zc, kc, lc, common)
        scale = hd // den  # = common^2
        k2 = k * k
        nre = [k2 * scale * a for a in re] + [0, 0]
        nim = [k2 * scale * a for a in im] + [0, 0]
        re = [a - b for a, b in zip(nre, hr)]
        im = [a - b for a, b in zip(nim, hi)]
        den = hd * k2
        if k % 16 == 0:
            re, im, den = _canon(re, im, den)
    re, im, den = _shift_times(re, im, den, zc, kc, lc, common)
    re, im, den = _canon(re, im, den)
    return _PiScaled(tuple(re), tuple(im), den, ordering.kappa, complex(hbar))


@dataclass(frozen=True)
class _PiScaled(XPolynomial):
    def evaluate(self, u, v):
        return math.pi * XPolynomial.evaluate(self, u, v)

    __call__ = evaluate


def product_sin_converged(z, ordering: OrderingKey, points, N_max: int = 512, rel_tol: float = 1e-4, hbar: complex = 1.0, start: int = 8):
    """Double ``N`` until successive partial products agree to ``rel_tol``.

    Returns
    -------
    (values, N_achieved, converged, error_vs_closed_form)
    """
    exact = star_sin(z, ordering, hbar).evaluate(*points)
    N = start
    prev = product_sin(z, N, ordering, hbar).evaluate(*points)
    while N < N_max:
        N = min(2 * N, N_max)
        cur = product_sin(z, N, ordering, hbar).evaluate(*points)
        if np.max(np.abs(cur - prev)) <= rel_tol * max(1.0, np.max(np.abs(cur))):
            return cur, N, True, float(np.max(np.abs(cur - exact)))
        prev = cur
    return prev, N, False, float(np.max(np.abs(prev - exact)))
