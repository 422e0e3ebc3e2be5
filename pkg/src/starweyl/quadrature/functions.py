"""Integral-defined star functions of ``X = uv/(i hbar)``.

Every constructor returns a :class:`StarFunctionEvaluator`.  The family
``E(t) = e_*^{tX}`` satisfies ``dE/dt = X * E``, ``E(t) * vacuum =
e^{t/2} vacuum`` and ``f(X) * u = u * f(X + 1)``.
"""
from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from ..closed_forms import (
    ExpElement,
    kappa_tau_of,
    singular_locus,
    vacuum,
    x_polynomial,
)
from ..errors import DivergesError, DomainError, SingularPointError
from ..weyl_poly import OrderingKey, Polynomial
from .evaluator import ClosedTerm, IntegralTerm, StarFunctionEvaluator, default_grid
from .rules import ContourSpec, QuadratureSpec

__all__ = [
    "inverse_plus",
    "inverse_minus",
    "linear_inverse",
    "star_delta",
    "left_right_inverses",
    "continue_inverse",
    "defect_projection",
    "star_gamma",
    "star_beta",
    "product_gamma",
    "product_gamma_converged",
    "reciprocal_gamma",
    "hankel_loop",
    "resolvent_combination",
    "associativity_failure",
    "euler_gamma",
]

euler_gamma = float(np.euler_gamma)


def _one(hbar) -> Polynomial:
    return Polynomial.const(1, 2, complex(hbar))


def _gens(hbar):
    h = complex(hbar)
    return Polynomial.var(0, 2, h), Polynomial.var(1, 2, h)


def _check_kappa(ordering: OrderingKey) -> None:
    kappa, _ = kappa_tau_of(ordering)
    if kappa.imag == 0 and abs(kappa.real) >= 1:
        raise DomainError("kappa on the excluded rays kappa >= 1 or kappa <= -1")


def _exp_weight(z: complex):
    z = complex(z)

    def log_w(t, tail):
        return z * t

    return log_w


def _evaluator(ordering, terms, spec, hbar, name, closed=()):
    return StarFunctionEvaluator(ordering, terms, closed, spec or QuadratureSpec(), hbar, name)


def _half_line_term(z, lo, hi, hbar, sign=1, coef=1.0, theta=0.0, label=""):
    rot = cmath.exp(1j * theta)
    if theta == 0:
        log_w = _exp_weight(z)
    else:
        zz = complex(z)

        def log_w(t, tail):
            return zz * rot * t + 1j * theta

    rate = complex(z) * rot
    return IntegralTerm(
        log_w,
        ContourSpec.line(lo, hi),
        _one(hbar),
        _one(hbar),
        coef=complex(coef),
        scale=sign * rot,
        rate_lo=rate if lo == -math.inf else None,
        rate_hi=rate if hi == math.inf else None,
        label=label,
    )


def inverse_plus(
    z: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    sign: int = 1,
    theta: float = 0.0,
    truncate: bool = False,
) -> StarFunctionEvaluator:
    """``(z + sign X)^{-1}_{+} = int_{-inf}^0 e^{tz} e_*^{sign t X} dt``.

    Parameters
    ----------
    z : complex
        Needs ``Re z > -1/2``.
    sign : {1, -1}
        Invert ``z - X`` when ``-1``.
    theta : float
        Rotate the integration ray to ``t e^{i theta}``; the value does not
        change while the integral converges.
    truncate : bool
        Allow ``Re z <= -1/2`` by cutting the integral at ``-spec.trunc``.
        At ``z = -1/2`` the product with ``z + X`` is then ``1 - vacuum`` up
        to ``O(e^{-trunc})``.

    Raises
    ------
    DomainError
        Outside the half-plane (unless ``truncate``) or for excluded ``kappa``.
    """
    _check_kappa(ordering)
    spec = spec or QuadratureSpec()
    z = complex(z)
    if truncate:
        term = _half_line_term(z, -spec.trunc, 0.0, hbar, sign, theta=theta, label="inv+trunc")
        return _evaluator(ordering, [term], spec, hbar, f"inverse_plus({z}, truncated)")
    if not z.real > -0.5:
        raise DomainError("the + inverse integral needs Re z > -1/2")
    term = _half_line_term(z, -math.inf, 0.0, hbar, sign, theta=theta, label="inv+")
    return _evaluator(ordering, [term], spec, hbar, f"inverse_plus({z})")


def inverse_minus(
    z: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    sign: int = 1,
    theta: float = 0.0,
) -> StarFunctionEvaluator:
    """``(z + sign X)^{-1}_{-} = -int_0^inf e^{tz} e_*^{sign t X} dt`` for ``Re z < 1/2``."""
    _check_kappa(ordering)
    z = complex(z)
    if not z.real < 0.5:
        raise DomainError("the - inverse integral needs Re z < 1/2")
    term = _half_line_term(z, 0.0, math.inf, hbar, sign, coef=-1.0, theta=theta, label="inv-")
    return _evaluator(ordering, [term], spec, hbar, f"inverse_minus({z})")


def linear_inverse(
    z: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    k: int = 1,
):
    """Both inverses of ``z + u_k/(i hbar)`` (``k = 1`` is ``v``).

    ``e_*^{t u_k/(i hbar)}`` carries the factor ``exp(t^2 K_kk / (4 i hbar))``,
    so the half-line integrals converge for every ``z`` when
    ``Re(K_kk / (i hbar)) < 0``.

    Returns
    -------
    (plus, minus) : tuple of StarFunctionEvaluator
    """
    h = complex(hbar)
    kk = complex(ordering.K[k][k])
    if not (kk / (1j * h)).real < 0:
        raise DomainError("linear inverses need Im K_kk < 0 (for real hbar > 0)")
    spec = spec or QuadratureSpec()
    z = complex(z)
    common = dict(family="linear", lin_index=k)
    plus = IntegralTerm(_exp_weight(z), ContourSpec.line(-math.inf, 0.0), _one(h), _one(h), label="lin+", **common)
    minus = IntegralTerm(
        _exp_weight(z), ContourSpec.line(0.0, math.inf), _one(h), _one(h), coef=-1.0, label="lin-", **common
    )
    return (
        _evaluator(ordering, [plus], spec, h, f"linear_inverse_plus({z})"),
        _evaluator(ordering, [minus], spec, h, f"linear_inverse_minus({z})"),
    )


def star_delta(
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    shift: complex = 0j,
    z: complex = 0.0,
) -> StarFunctionEvaluator:
    """``int_R e^{tz} e_*^{(t + shift) X} dt``; at ``z = 0, shift = 0`` the star delta.

    A nonzero ``shift`` integrates along the line ``Im t = Im shift``; the
    value is unchanged while the strip between the lines is free of
    singular points.
    """
    _check_kappa(ordering)
    shift = complex(shift)
    h = complex(hbar)
    if shift.imag != 0:
        # the pole set of e_*^{tX} is 2 log((k+1)/(k-1)) + 2 pi i Z in t
        loc = singular_locus(kappa_tau_of(ordering)[0])
        for p in loc.points(-3, 3):
            pt = 2 * p
            if min(0, shift.imag) - 1e-12 <= pt.imag <= max(0, shift.imag) + 1e-12:
                raise SingularPointError("the shifted line crosses the singular locus")
    zz = complex(z)
    term = IntegralTerm(
        _exp_weight(zz),
        ContourSpec.line(-math.inf, math.inf, offset=1j * shift.imag),
        _one(h),
        _one(h),
        shift=shift.real,
        rate_lo=zz,
        rate_hi=zz,
        label="delta",
    )
    return _evaluator(ordering, [term], spec, h, "star_delta")


def left_right_inverses(ordering: OrderingKey, spec: QuadratureSpec | None = None, hbar: complex = 1.0):
    """One-sided inverses ``v°`` and ``u•``.

    ``v° = u * (v*u)^{-1}_{+}`` with ``v*u = i hbar (X + 1/2)`` and
    ``u• = v * (u*v)^{-1}_{-}`` with ``u*v = i hbar (X - 1/2)``; then
    ``v * v° = 1``, ``v° * v = 1 - vacuum``, ``u * u• = 1`` and
    ``u• * u = 1 - vacuum``.
    """
    h = complex(hbar)
    u, v = _gens(h)
    ip = inverse_plus(0.5, ordering, spec, h).left_mul(u).scale(1 / (1j * h))
    im = inverse_minus(-0.5, ordering, spec, h).left_mul(v).scale(1 / (1j * h))
    ip.name, im.name = "v_circ", "u_bullet"
    return ip, im


def _is_neg_half_integer(z: complex, tol: float = 1e-12) -> bool:
    x = z + 0.5
    return abs(x.imag) < tol and x.real < tol and abs(x.real - round(x.real)) < tol


def continue_inverse(
    z: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    steps: int | None = None,
) -> StarFunctionEvaluator:
    """``(z + X)^{-1}_{+}`` continued in ``z`` by sliding ``steps`` times.

    With ``n`` steps the result is

        (i hbar)^{-n} u^n * (int_{-inf}^0 W(r) e_*^{rX} dr) * v^n
            + sum_{k<n} u^k * vacuum * v^k / ((i hbar)^k k! (z + k + 1/2)),

    where ``W`` is the convolution of the kernels ``e^{a r}`` over
    ``a in {1/2, ..., n - 1/2, z + n}``.  ``steps`` defaults to the least
    ``n`` with ``Re(z + n) >= 1/2`` (zero when ``Re z > -1/2``).

    Raises
    ------
    SingularPointError
        At ``z in {-1/2, -3/2, ...}``.
    """
    _check_kappa(ordering)
    z = complex(z)
    h = complex(hbar)
    if _is_neg_half_integer(z):
        raise SingularPointError(f"z = {z} is a pole of the continued inverse")
    if steps is None:
        steps = 0 if z.real > -0.5 else int(math.ceil(0.5 - z.real))
    if steps == 0:
        return inverse_plus(z, ordering, spec, h)
    n = steps
    rates = [k + 0.5 for k in range(n)] + [z + n]
    coefs = []
    for j, a in enumerate(rates):
        c = 1.0 + 0j
        for i, b in enumerate(rates):
            if i != j:
                c /= b - a
        coefs.append(c)
    rates_arr = np.array(rates, dtype=complex)
    coefs_arr = np.array(coefs, dtype=complex)

    def log_w(t, tail):
        vals = np.exp(np.multiply.outer(t, rates_arr)) @ coefs_arr
        with np.errstate(divide="ignore"):
            return np.log(vals + 0j)

    u, v = _gens(h)
    term = IntegralTerm(
        log_w,
        ContourSpec.line(-math.inf, 0.0),
        u ** n,
        v ** n,
        coef=(1j * h) ** (-n),
        rate_lo=min(rates, key=lambda a: complex(a).real),
        label=f"cont{n}",
    )
    vac = vacuum(ordering, h)
    closed = [
        ClosedTerm(vac, u ** k, v ** k, 1 / ((1j * h) ** k * math.factorial(k) * (z + k + 0.5)))
        for k in range(n)
    ]
    return _evaluator(ordering, [term], spec, h, f"continue_inverse({z}, steps={n})", closed)


def defect_projection(n: int, ordering: OrderingKey, hbar: complex = 1.0) -> StarFunctionEvaluator:
    """``1 - u^n * vacuum * v^n / (n! (i hbar)^n)`` as a closed evaluator."""
    if n < 0:
        raise ValueError("n must be non-negative")
    h = complex(hbar)
    u, v = _gens(h)
    one = ExpElement.constant(1.0, ordering, h)
    return StarFunctionEvaluator(
        ordering,
        [],
        [
            ClosedTerm(one, _one(h), _one(h)),
            ClosedTerm(vacuum(ordering, h), u ** n, v ** n, -1 / (math.factorial(n) * (1j * h) ** n)),
        ],
        None,
        h,
        f"defect_projection({n})",
    )


def _gamma_log_weight(z: complex):
    z = complex(z)

    def log_w(t, tail):
        return z * t - np.exp(t)

    return log_w


def _gamma_subtracted_weight(z: complex, m: int, terms: int = 40):
    """``e^{zt} (e^{-e^t} - sum_{k<m} (-e^t)^k / k!)`` on ``t <= 0`` without cancellation."""
    z = complex(z)
    j = np.arange(terms)
    # ratio (-x)^j m! / (m + j)!
    log_fact = np.array([math.lgamma(m + 1) - math.lgamma(m + jj + 1) for jj in j])

    def log_w(t, tail):
        x = np.exp(t.real)
        series = (np.power.outer(-x, j) * np.exp(log_fact)).sum(axis=1)
        return z * t + m * (t + 1j * math.pi) - math.lgamma(m + 1) + np.log(series + 0j)

    return log_w


def star_gamma(
    z: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    sign: int = 1,
) -> StarFunctionEvaluator:
    """``Gamma_*(z + sign X) = int_R e^{-e^t} e^{tz} e_*^{sign t X} dt``.

    For ``sign = 1`` and ``Re z <= -1/2`` the integral is continued by
    subtracting the first ``m`` Taylor terms of ``e^{-e^t}`` on ``t < 0`` and
    adding them back as continued inverses.

    Raises
    ------
    SingularPointError
        At ``z in {-1/2, -3/2, ...}``.
    DomainError
        For ``sign = -1`` with ``Re z <= -1/2``.
    """
    _check_kappa(ordering)
    z = complex(z)
    h = complex(hbar)
    spec = spec or QuadratureSpec()
    if _is_neg_half_integer(z):
        raise SingularPointError(f"Gamma_* is singular at z = {z}")
    if z.real > -0.5:
        term = IntegralTerm(
            _gamma_log_weight(z),
            ContourSpec.line(-math.inf, math.inf),
            _one(h),
            _one(h),
            scale=sign,
            rate_lo=z,
            rate_hi=complex(-math.inf),
            label="gamma",
        )
        return _evaluator(ordering, [term], spec, h, f"star_gamma({z}, sign={sign})")
    if sign != 1:
        raise DomainError("continuation of Gamma_*(z - X) is not implemented for Re z <= -1/2")
    m = int(math.ceil(-0.5 - z.real))
    if not (z.real + m > -0.5):
        m += 1
    upper = IntegralTerm(
        _gamma_log_weight(z), ContourSpec.line(0.0, math.inf), _one(h), _one(h), label="gamma_hi"
    )
    lower = IntegralTerm(
        _gamma_subtracted_weight(z, m), ContourSpec.line(-math.inf, 0.0), _one(h), _one(h), label="gamma_lo"
    )
    out = _evaluator(ordering, [upper, lower], spec, h, f"star_gamma({z})")
    for k in range(m):
        out = out + continue_inverse(z + k, ordering, spec, h).scale((-1) ** k / math.factorial(k))
    out.name = f"star_gamma({z})"
    return out


def star_beta(
    z: complex,
    y: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    sign: int = 1,
) -> StarFunctionEvaluator:
    """``B_*(z + sign X, y) = int_{-inf}^0 e^{tz} (1 - e^t)^{y-1} e_*^{sign t X} dt``."""
    _check_kappa(ordering)
    z, y = complex(z), complex(y)
    if not (z.real > -0.5 and y.real > 0):
        raise DomainError("B_* needs Re z > -1/2 and Re y > 0")

    def log_w(t, tail):
        # 1 - e^t = -expm1(-tail) on t = -tail
        return z * t + (y - 1) * np.log(-np.expm1(-np.asarray(tail, dtype=float)) + 0j)

    term = IntegralTerm(
        log_w,
        ContourSpec.line(-math.inf, 0.0),
        _one(hbar),
        _one(hbar),
        scale=sign,
        rate_lo=z,
        label="beta",
    )
    return _evaluator(ordering, [term], spec, hbar, f"star_beta({z}, {y})")


def _harmonic(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))


def product_gamma(
    z: complex,
    N: int,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
) -> StarFunctionEvaluator:
    """Partial product ``e_*^{-gamma(z+X)} (z+X)^{-1} prod_{k<=N} (1+(z+X)/k)^{-1} e_*^{(z+X)/k}``.

    The factors combine into the single integral
    ``int_{-inf}^{a} e^{zr} (1 - e^{r-a})^N e_*^{rX} dr`` with
    ``a = H_N - gamma``.
    """
    _check_kappa(ordering)
    z = complex(z)
    if _is_neg_half_integer(z):
        raise SingularPointError(f"z = {z} is a pole of the product")
    if not z.real > -0.5:
        raise DomainError("the partial product integral needs Re z > -1/2")
    a = _harmonic(N) - euler_gamma

    def log_w(t, tail):
        tl = np.asarray(tail, dtype=float)
        return z * t + N * np.log(-np.expm1(-tl) + 0j)

    term = IntegralTerm(
        log_w, ContourSpec.line(-math.inf, a), _one(hbar), _one(hbar), rate_lo=z, label="prodgamma"
    )
    return _evaluator(ordering, [term], spec, hbar, f"product_gamma({z}, N={N})")


def product_gamma_converged(
    z: complex,
    ordering: OrderingKey,
    N_max: int = 2000,
    rel_tol: float = 1e-4,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    points=None,
    start: int = 125,
):
    """Double ``N`` until successive partial products agree to ``rel_tol`` on ``points``.

    Returns
    -------
    (evaluator, N_achieved, converged)
    """
    if points is None:
        points = default_grid()
    N = start
    prev = product_gamma(z, N, ordering, spec, hbar)
    pv = prev.evaluate(*points)
    while N < N_max:
        N = min(2 * N, N_max)
        cur = product_gamma(z, N, ordering, spec, hbar)
        cv = cur.evaluate(*points)
        if np.max(np.abs(cv - pv)) <= rel_tol * max(1.0, np.max(np.abs(cv))):
            return cur, N, True
        prev, pv = cur, cv
    return prev, N, False


def reciprocal_gamma(
    z: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    cut: float = 8.0,
) -> StarFunctionEvaluator:
    """``sin_* pi(z+X) * Gamma_*(z+X)`` as a Hankel-type contour integral.

    The integrand ``exp(e^t) e^{tz} e_*^{tX}`` is integrated along
    ``Im t = pi`` minus along ``Im t = -pi`` (divided by ``2i``).  Left of
    ``Re t = -cut`` the two lines are joined by the vertical segment, which
    makes the result entire in ``z``.

    Raises
    ------
    DomainError
        If ``kappa`` is real in ``(-1, 1)``, where the lines hit singular
        points, or if a singular point lies left of ``-cut`` in the strip.
    """
    kappa, _ = kappa_tau_of(ordering)
    if kappa.imag == 0 and abs(kappa.real) < 1:
        raise DomainError("the lines Im t = +-pi meet the singular locus for real kappa in (-1, 1)")
    _check_kappa(ordering)
    loc = singular_locus(kappa)
    for p in loc.points(-2, 2):
        pt = 2 * p
        if abs(pt.imag) <= math.pi and pt.real <= -cut:
            raise DomainError("a singular point lies inside the Hankel closure; increase cut")
    z = complex(z)
    h = complex(hbar)
    spec = spec or QuadratureSpec()
    hi = math.log(800.0)

    def log_w(t, tail):
        return np.exp(t) + z * t

    top = IntegralTerm(
        log_w, ContourSpec.line(-cut, hi, offset=1j * math.pi), _one(h), _one(h), coef=1 / 2j, label="hankel+"
    )
    bottom = IntegralTerm(
        log_w, ContourSpec.line(-cut, hi, offset=-1j * math.pi), _one(h), _one(h), coef=-1 / 2j, label="hankel-"
    )
    vert = IntegralTerm(
        log_w,
        ContourSpec.segment(-cut - 1j * math.pi, -cut + 1j * math.pi),
        _one(h),
        _one(h),
        coef=1 / 2j,
        label="hankel_closure",
    )
    return _evaluator(ordering, [top, bottom, vert], spec, h, f"reciprocal_gamma({z})")


def hankel_loop(
    tau: float,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    z: complex = 1.0,
) -> StarFunctionEvaluator:
    """``(1/2pi) int_{-pi}^{pi} exp(e^{tau + i theta}) e^{z(tau + i theta)} e_*^{(tau + i theta) X} d theta``."""
    h = complex(hbar)
    z = complex(z)

    def log_w(t, tail):
        return np.exp(t) + z * t

    term = IntegralTerm(
        log_w,
        ContourSpec.segment(tau - 1j * math.pi, tau + 1j * math.pi),
        _one(h),
        _one(h),
        coef=1 / (2j * math.pi),
        label="loop",
    )
    return _evaluator(ordering, [term], spec, h, f"hankel_loop({tau})")


def resolvent_combination(
    z: complex,
    w: complex,
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
) -> StarFunctionEvaluator:
    """``((z+X)^{-1} + (w-X)^{-1}) / (z + w)``, an inverse of ``(z+X) * (w-X)``.

    Both inverses are the ``t <= 0`` integrals, so ``Re z > -1/2`` and
    ``Re w > -1/2`` are required.
    """
    z, w = complex(z), complex(w)
    if abs(z + w) == 0:
        raise DomainError("z + w must be nonzero")
    a = inverse_plus(z, ordering, spec, hbar)
    b = inverse_plus(w, ordering, spec, hbar, sign=-1)
    out = (a + b).scale(1 / (z + w))
    out.name = f"resolvent({z}, {w})"
    return out


def associativity_failure(
    ordering: OrderingKey,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    points=None,
) -> dict:
    """Evaluate both groupings of ``X^{-1}_{+} * X * X^{-1}_{-}``.

    ``X^{-1}_{+} * X`` and ``X * X^{-1}_{-}`` are computed by quadrature and
    compared with 1, so the left grouping equals ``X^{-1}_{-}`` and the right
    grouping equals ``X^{-1}_{+}``.  The two differ by the star delta.  The
    product ``X^{-1}_{+} * X^{-1}_{-}`` is attempted and its divergence
    recorded.
    """
    h = complex(hbar)
    if points is None:
        points = default_grid()
    X = x_polynomial(ordering, h)
    # z + X at z = 0 is X itself; its inverses are the z = 0 integrals
    ip = inverse_plus(0.0, ordering, spec, h)
    im = inverse_minus(0.0, ordering, spec, h)
    left_inner = ip.right_mul(X).evaluate(*points)
    right_inner = im.left_mul(X).evaluate(*points)
    left = im.evaluate(*points)
    right = ip.evaluate(*points)
    try:
        ip.star(im)
        diverges = False
    except DivergesError:
        diverges = True
    return {
        "left_inner_residual": float(np.max(np.abs(left_inner - 1))),
        "right_inner_residual": float(np.max(np.abs(right_inner - 1))),
        "left_grouping": left,
        "right_grouping": right,
        "groupings_differ": float(np.max(np.abs(left - right))),
        "product_of_inverses_diverges": diverges,
    }
