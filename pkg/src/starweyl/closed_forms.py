"""Closed-form elements of the two-variable Weyl algebra.

Everything here lives in a ``(kappa, tau)`` ordering, ``K = [[0, kappa],
[kappa, tau]]``, with ``X = uv / (i hbar)`` denoting the element whose Weyl
expression is ``uv / (i hbar)``.  The basic family is

    E(t) = e_*^{t 2uv/(i hbar)}
         = (2 / Delta) exp(c^2 tau u^2 / (i hbar) + c 2uv / (i hbar)),
    Delta = (1 - kappa) e^t + (1 + kappa) e^{-t},  c = (e^t - e^{-t}) / Delta,

so ``e_*^{sX} = E(s / 2)``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import _gauss
from .errors import (
    ConvergenceWarning,
    DivergesError,
    DomainError,
    PoleError,
    SingularPointError,
)
from .weyl_poly import OrderingKey, Polynomial, intertwine, star_mul, w2_generators

__all__ = [
    "ExpElement",
    "ExpSum",
    "SingularLocus",
    "kappa_tau_of",
    "x_polynomial",
    "uv_family_params",
    "singular_locus",
    "star_exp_linear",
    "star_exp_quadratic",
    "exp_series",
    "intertwine_exp",
    "poly_star_exp",
    "vacuum",
    "antivacuum",
    "exp_group_mul",
    "star_sin",
    "star_cos",
    "theta_partial_sum",
    "vacuum_two_definitions",
]

POLE_RTOL = 1e-10


def kappa_tau_of(ordering: OrderingKey) -> tuple:
    """``(kappa, tau)`` of a W2 ordering key as complex numbers."""
    if not ordering.is_w2_family:
        raise ValueError("expected a two-variable (kappa, tau) ordering key")
    return complex(ordering.kappa), complex(ordering.tau)


def x_polynomial(ordering: OrderingKey, hbar: complex = 1.0) -> Polynomial:
    """Ordering expression of ``X = uv/(i hbar)`` (Weyl ``uv`` intertwined)."""
    u, v = w2_generators()
    weyl = ordering.with_k([[0, 0], [0, 0]])
    expr = intertwine(u * v, weyl, ordering).to_float(hbar)
    return expr * (1 / (1j * complex(hbar)))


def _zero_poly(hbar) -> Polynomial:
    return Polynomial(2, hbar=hbar)


def _one_poly(hbar) -> Polynomial:
    return Polynomial.const(1, 2, hbar)


@dataclass(frozen=True)
class ExpElement:
    """``prefactor * amp * exp(alpha u^2/ih + beta 2uv/ih + gamma v^2/ih + (a u + b v)/ih)``.

    ``ih`` stands for ``i * hbar``.  ``family_t`` records the parameter ``t``
    when the element is a multiple of ``E(t)``; ``limit`` is ``"vacuum"`` or
    ``"antivacuum"`` for the two idempotent limits.
    """

    prefactor: Polynomial
    amp: complex
    alpha: complex = 0j
    beta: complex = 0j
    gamma: complex = 0j
    lin_u: complex = 0j
    lin_v: complex = 0j
    ordering: OrderingKey = field(default_factory=OrderingKey.weyl)
    hbar: complex = 1.0 + 0j
    family_t: complex | None = None
    limit: str | None = None

    @classmethod
    def constant(cls, c: complex, ordering: OrderingKey, hbar: complex = 1.0) -> "ExpElement":
        return cls(_one_poly(complex(hbar)), complex(c), ordering=ordering, hbar=complex(hbar))

    @property
    def is_linear(self) -> bool:
        return self.alpha == 0 and self.beta == 0 and self.gamma == 0 and self.prefactor.degree() <= 0

    def is_zero(self) -> bool:
        return self.amp == 0 or self.prefactor.is_zero()

    def gauss_params(self) -> _gauss.GaussParams:
        return _gauss.GaussParams.build(
            self.alpha, self.beta, self.gamma, self.lin_u, self.lin_v, self.hbar
        )

    def evaluate(self, u, v):
        """Value at points ``(u, v)``; numpy arrays broadcast."""
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        ih = 1j * self.hbar
        q = (
            self.alpha * u * u
            + 2 * self.beta * u * v
            + self.gamma * v * v
            + self.lin_u * u
            + self.lin_v * v
        ) / ih
        out = self.amp * self.prefactor.evaluate(u, v) * np.exp(q)
        return complex(out) if np.ndim(out) == 0 else out

    __call__ = evaluate

    def scale(self, c: complex) -> "ExpElement":
        return replace(self, amp=self.amp * complex(c))

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        return ExpSum((self,)) + other

    def __sub__(self, other):
        return ExpSum((self,)) - other

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        def pair(z):
            return [complex(z).real, complex(z).imag]

        out = {
            "prefactor": self.prefactor.to_json(),
            "amp": pair(self.amp),
            "alpha": pair(self.alpha),
            "beta": pair(self.beta),
            "gamma": pair(self.gamma),
            "lin": [pair(self.lin_u), pair(self.lin_v)],
            "hbar": pair(self.hbar),
            "ordering": self.ordering.to_json(),
        }
        if self.family_t is not None:
            out["family_t"] = pair(self.family_t)
        if self.limit is not None:
            out["limit"] = self.limit
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ExpElement":
        def z(p):
            return complex(p[0], p[1])

        lin = data.get("lin", [[0, 0], [0, 0]])
        hbar = z(data.get("hbar", [1.0, 0.0]))
        pre = Polynomial.from_json(data["prefactor"])
        if pre.hbar is None:
            pre = pre.to_float(hbar)
        return cls(
            prefactor=pre,
            amp=z(data["amp"]),
            alpha=z(data["alpha"]),
            beta=z(data["beta"]),
            gamma=z(data["gamma"]),
            lin_u=z(lin[0]),
            lin_v=z(lin[1]),
            ordering=OrderingKey.from_json(data["ordering"]),
            hbar=hbar,
            family_t=z(data["family_t"]) if "family_t" in data else None,
            limit=data.get("limit"),
        )


@dataclass(frozen=True)
class ExpSum:
    """Finite linear combination of :class:`ExpElement` terms."""

    terms: tuple = ()

    def evaluate(self, u, v):
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        out = np.zeros(np.broadcast(u, v).shape, dtype=complex)
        for t in self.terms:
            out = out + t.evaluate(u, v)
        return complex(out) if np.ndim(out) == 0 else out

    __call__ = evaluate

    def __add__(self, other):
        if isinstance(other, ExpElement):
            return ExpSum(self.terms + (other,))
        if isinstance(other, ExpSum):
            return ExpSum(self.terms + other.terms)
        return NotImplemented

    __radd__ = __add__

    def scale(self, c: complex) -> "ExpSum":
        return ExpSum(tuple(t.scale(c) for t in self.terms))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, (ExpElement, ExpSum)):
            return self + (-other)
        return NotImplemented

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __len__(self):
        return len(self.terms)

    def to_json(self) -> dict:
        return {"terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True)
class SingularLocus:
    """Points ``base + i*pi*k`` where ``E(t)`` has a pole (empty for ``kappa = +-1``)."""

    kappa: complex
    base: complex | None
    period: complex = 1j * math.pi

    @property
    def empty(self) -> bool:
        return self.base is None

    def points(self, kmin: int = -2, kmax: int = 2) -> list:
        if self.empty:
            return []
        return [self.base + k * self.period for k in range(kmin, kmax + 1)]

    def distance(self, t: complex) -> float:
        """Distance from ``t`` to the nearest singular point."""
        if self.empty:
            return math.inf
        k = round(((t - self.base) / self.period).real)
        return min(abs(t - self.base - j * self.period) for j in (k - 1, k, k + 1))


def singular_locus(kappa) -> SingularLocus:
    """Singular set ``2t = log((kappa+1)/(kappa-1)) + 2 pi i Z``."""
    k = complex(kappa)
    if k == 1 or k == -1:
        return SingularLocus(k, None)
    return SingularLocus(k, 0.5 * cmath.log((k + 1) / (k - 1)))


def uv_family_params(t, kappa: complex, tau: complex = 0.0):
    """Stable ``(log_amp, c, alpha, delta_rel)`` of ``E(t)`` for array ``t``.

    ``log_amp`` is ``log(2 / Delta)``; ``delta_rel`` is ``|Delta|`` divided by
    ``1 + |e^t| + |e^{-t}|`` (used for the pole test).
    """
    t = np.asarray(t, dtype=complex)
    k = complex(kappa)
    neg = t.real <= 0
    s = np.where(neg, t, -t)
    e1 = np.exp(s)
    e2 = e1 * e1
    # Re t <= 0: Delta = e^{-t} ((1-k) e^{2t} + 1 + k); otherwise mirrored
    D = np.where(neg, (1 - k) * e2 + (1 + k), (1 - k) + (1 + k) * e2)
    c = np.where(neg, e2 - 1, 1 - e2) / np.where(D == 0, 1, D)
    with np.errstate(divide="ignore"):
        log_amp = math.log(2) + s - np.log(D)
    delta_rel = np.abs(D) / (np.abs(e1) + 1 + np.abs(e2))
    alpha = c * c * complex(tau)
    return log_amp, c, alpha, delta_rel


def _check_pole(delta_rel, t):
    if np.any(delta_rel < POLE_RTOL):
        raise SingularPointError(f"t={t} lies on the singular locus of the star exponential")


def star_exp_quadratic(t: complex, ordering: OrderingKey, hbar: complex = 1.0) -> ExpElement:
    """``e_*^{t 2uv/(i hbar)}`` in a ``(kappa, tau)`` ordering.

    Raises
    ------
    SingularPointError
        If ``t`` is on the singular locus of the ordering.

    Examples
    --------
    >>> E = star_exp_quadratic(0.0, OrderingKey.weyl())
    >>> abs(E(0.3, 0.7) - 1) < 1e-15
    True
    """
    kappa, tau = kappa_tau_of(ordering)
    t = complex(t)
    log_amp, c, alpha, rel = uv_family_params(t, kappa, tau)
    _check_pole(rel, t)
    h = complex(hbar)
    return ExpElement(
        _one_poly(h),
        complex(np.exp(log_amp)),
        alpha=complex(alpha),
        beta=complex(c),
        ordering=ordering,
        hbar=h,
        family_t=t,
    )


def star_exp_linear(s: complex, k: int, ordering: OrderingKey, hbar: complex = 1.0, z: complex = 0.0) -> ExpElement:
    """``e_*^{z + s u_k/(i hbar)} = e^z e^{s^2 K_kk/(4 i hbar)} e^{s u_k/(i hbar)}``."""
    if ordering.n != 2:
        raise ValueError("closed forms are implemented for two variables")
    h = complex(hbar)
    s = complex(s)
    kk = complex(ordering.K[k][k])
    amp = cmath.exp(complex(z) + s * s * kk / (4j * h))
    lin = [0j, 0j]
    lin[k] = s
    return ExpElement(_one_poly(h), amp, lin_u=lin[0], lin_v=lin[1], ordering=ordering, hbar=h)


def exp_series(t: complex, ordering: OrderingKey, order: int = 12, hbar: complex = 1.0) -> Polynomial:
    """Taylor solution of ``df/dt = (2uv/ih) * f``, ``f(0) = 1``, to ``order``."""
    h = complex(hbar)
    H = x_polynomial(ordering, h) * 2
    term = _one_poly(h)
    out = _one_poly(h)
    t = complex(t)
    for n in range(1, order + 1):
        term = star_mul(H, term, ordering) * (t / n)
        out = out + term
    return out


def _require_uv_gaussian(E: ExpElement):
    if E.prefactor.degree() > 0 or E.gamma != 0 or E.lin_u != 0 or E.lin_v != 0:
        raise NotImplementedError(
            "intertwining is implemented for constant-prefactor exp(alpha u^2 + beta 2uv) elements"
        )


def intertwine_exp(E: ExpElement, target: OrderingKey) -> ExpElement:
    """Move an element of the ``exp(alpha u^2/ih + beta 2uv/ih)`` class to another ``(kappa, tau)`` ordering.

    A kappa shift maps ``beta -> beta/D``, ``alpha -> alpha/D^2`` and the
    amplitude to ``amp/D`` with ``D = 1 - beta (kappa' - kappa)``; a tau shift
    adds ``beta^2 (tau' - tau)`` to ``alpha``.  Pure linear exponentials pick
    up the scalar ``exp(s^2 (K'_kk - K_kk) / (4 i hbar))``.

    Raises
    ------
    PoleError
        If ``D`` vanishes.
    """
    k0, t0 = kappa_tau_of(E.ordering)
    k1, t1 = kappa_tau_of(target)
    if E.is_linear:
        dk = np.array([[0, k1 - k0], [k1 - k0, t1 - t0]])
        lin = np.array([E.lin_u, E.lin_v])
        amp = E.amp * cmath.exp(lin @ dk @ lin / (4j * E.hbar))
        return replace(E, amp=amp, ordering=target)
    _require_uv_gaussian(E)
    D = 1 - E.beta * (k1 - k0)
    if abs(D) < POLE_RTOL * (1 + abs(E.beta * (k1 - k0))):
        raise PoleError("intertwiner denominator 1 - t(kappa' - kappa) vanishes")
    beta = E.beta / D
    alpha = E.alpha / (D * D) + beta * beta * (t1 - t0)
    return replace(E, amp=E.amp / D, alpha=alpha, beta=beta, ordering=target)


def _poly_float(p: Polynomial, hbar: complex) -> Polynomial:
    return p if p.hbar is not None else p.to_float(hbar)


def poly_star_exp(p: Polynomial, E: ExpElement, side: str = "left") -> ExpElement:
    """``p * E`` (``side="left"``) or ``E * p`` (``side="right"``) in closed form."""
    if p.n != 2:
        raise ValueError("expected a two-variable polynomial")
    p = _poly_float(p, E.hbar)
    lam = E.ordering.lambda_matrix()
    gp = E.gauss_params()
    R = _gauss.mul_terms(_gauss.poly_terms(E.prefactor), _gauss.ones(1))
    t = _gauss.poly_terms(p)
    if side == "left":
        R = _gauss.star_left(t, R, gp, lam)
    elif side == "right":
        R = _gauss.star_right(R, t, gp, lam)
    else:
        raise ValueError("side must be 'left' or 'right'")
    pre = Polynomial(2, _gauss.dense_to_terms(R[0]), E.hbar)
    return replace(E, prefactor=pre, family_t=None, limit=None)


def vacuum(ordering: OrderingKey, hbar: complex = 1.0) -> ExpElement:
    """The vacuum, annihilated by ``v`` on the left and ``u`` on the right.

    Equal to ``lim_{t -> -inf} e_*^{t 2 u*v/(i hbar)}``:
    ``2/(1+kappa) exp(-(2uv - tau u^2/(1+kappa)) / ((1+kappa) i hbar))``.
    """
    kappa, tau = kappa_tau_of(ordering)
    if kappa == -1:
        raise DomainError("the vacuum has no expression at kappa = -1")
    h = complex(hbar)
    return ExpElement(
        _one_poly(h),
        2 / (1 + kappa),
        alpha=tau / (1 + kappa) ** 2,
        beta=-1 / (1 + kappa),
        ordering=ordering,
        hbar=h,
        limit="vacuum",
    )


def antivacuum(ordering: OrderingKey, hbar: complex = 1.0) -> ExpElement:
    """The antivacuum ``lim_{t -> +inf} e_*^{t 2 v*u/(i hbar)}``, killed by ``u`` on the left."""
    kappa, tau = kappa_tau_of(ordering)
    if kappa == 1:
        raise DomainError("the antivacuum has no expression at kappa = 1")
    h = complex(hbar)
    return ExpElement(
        _one_poly(h),
        2 / (1 - kappa),
        alpha=tau / (1 - kappa) ** 2,
        beta=1 / (1 - kappa),
        ordering=ordering,
        hbar=h,
        limit="antivacuum",
    )


def _family_scalar(E: ExpElement) -> tuple:
    """Write a uv-family element as ``(lam, t)`` or ``(lam, limit)``."""
    kappa, tau = kappa_tau_of(E.ordering)
    _require_uv_gaussian(E)
    pre = complex(E.prefactor.coeff((0, 0)))
    if E.limit == "vacuum":
        return pre * E.amp * (1 + kappa) / 2, "vacuum"
    if E.limit == "antivacuum":
        return pre * E.amp * (1 - kappa) / 2, "antivacuum"
    t = E.family_t
    if t is None:
        # invert c(t): e^{2t} = (1 + c(1+kappa)) / (1 - c(1-kappa))
        c = E.beta
        den = 1 - c * (1 - kappa)
        num = 1 + c * (1 + kappa)
        if den == 0 or num == 0:
            raise ValueError("element is not in the uv family")
        t = 0.5 * cmath.log(num / den)
    log_amp, c, alpha, _ = uv_family_params(t, kappa, tau)
    if abs(complex(c) - E.beta) > 1e-9 * (1 + abs(E.beta)) or abs(complex(alpha) - E.alpha) > 1e-9 * (1 + abs(E.alpha)):
        raise ValueError("element is not in the uv family of its ordering")
    return pre * E.amp / complex(np.exp(log_amp)), t


def exp_group_mul(E1: ExpElement, E2: ExpElement) -> ExpElement:
    """Product inside the one-parameter uv family or of linear exponentials.

    For the uv family ``E(t1) * E(t2) = E(t1 + t2)``, with the limit rules
    ``E(t) * vacuum = e^{t} vacuum`` and ``E(t) * antivacuum = e^{-t} antivacuum``.

    Raises
    ------
    DivergesError
        For a vacuum times an antivacuum (in either order).
    """
    if E1.ordering != E2.ordering:
        raise ValueError("factors must share the ordering")
    if complex(E1.hbar) != complex(E2.hbar):
        raise ValueError("factors must share hbar")
    h = E1.hbar
    if E1.is_linear and E2.is_linear:
        lam = E1.ordering.lambda_matrix()
        a = np.array([E1.lin_u, E1.lin_v])
        b = np.array([E2.lin_u, E2.lin_v])
        c1 = complex(E1.prefactor.coeff((0, 0))) * E1.amp
        c2 = complex(E2.prefactor.coeff((0, 0))) * E2.amp
        amp = c1 * c2 * cmath.exp(a @ lam @ b / (2j * h))
        return ExpElement(_one_poly(h), amp, lin_u=a[0] + b[0], lin_v=a[1] + b[1], ordering=E1.ordering, hbar=h)
    l1, p1 = _family_scalar(E1)
    l2, p2 = _family_scalar(E2)
    lims = {p1, p2} & {"vacuum", "antivacuum"}
    if lims == {"vacuum", "antivacuum"}:
        raise DivergesError("the product of the vacuum and the antivacuum diverges")
    if isinstance(p1, str) and isinstance(p2, str):
        base = vacuum(E1.ordering, h) if p1 == "vacuum" else antivacuum(E1.ordering, h)
        return base.scale(l1 * l2)
    if isinstance(p1, str) or isinstance(p2, str):
        lim, t = (p1, p2) if isinstance(p1, str) else (p2, p1)
        base = vacuum(E1.ordering, h) if lim == "vacuum" else antivacuum(E1.ordering, h)
        factor = cmath.exp(t) if lim == "vacuum" else cmath.exp(-t)
        return base.scale(l1 * l2 * factor)
    return star_exp_quadratic(p1 + p2, E1.ordering, h).scale(l1 * l2)


def _half_pi_pair(ordering: OrderingKey, hbar: complex) -> tuple:
    try:
        ep = star_exp_quadratic(0.5j * math.pi, ordering, hbar)
        em = star_exp_quadratic(-0.5j * math.pi, ordering, hbar)
    except SingularPointError as exc:
        raise DivergesError("e_*^{+-i pi X} diverges in this ordering (kappa = 0)") from exc
    return ep, em


def star_sin(z: complex, ordering: OrderingKey, hbar: complex = 1.0) -> ExpSum:
    """``sin_* pi (z + X) = (e^{i pi z} e_*^{i pi X} - e^{-i pi z} e_*^{-i pi X}) / 2i``."""
    ep, em = _half_pi_pair(ordering, hbar)
    z = complex(z)
    a = cmath.exp(1j * math.pi * z) / 2j
    b = -cmath.exp(-1j * math.pi * z) / 2j
    return ExpSum((ep.scale(a), em.scale(b)))


def star_cos(z: complex, ordering: OrderingKey, hbar: complex = 1.0) -> ExpSum:
    """``cos_* pi (z + X)``."""
    ep, em = _half_pi_pair(ordering, hbar)
    z = complex(z)
    return ExpSum((ep.scale(cmath.exp(1j * math.pi * z) / 2), em.scale(cmath.exp(-1j * math.pi * z) / 2)))


def theta_partial_sum(N: int, k: int, ordering: OrderingKey, hbar: complex = 1.0) -> ExpSum:
    """``sum_{|n| <= N} e_*^{2n u_k/(i hbar)}``.

    Warns
    -----
    ConvergenceWarning
        When ``Re(K_kk / (i hbar)) >= 0``, where the terms do not decay.
    """
    h = complex(hbar)
    kk = complex(ordering.K[k][k])
    if (kk / (1j * h)).real >= 0:
        warnings.warn(
            "theta series does not converge unless Im K_kk < 0 (for real hbar > 0)",
            ConvergenceWarning,
            stacklevel=2,
        )
    return ExpSum(tuple(star_exp_linear(2 * n, k, ordering, h) for n in range(-N, N + 1)))


def vacuum_two_definitions(z: complex, ordering: OrderingKey, hbar: complex = 1.0, n_terms: int = 60, points=None) -> dict:
    """Compare two meanings of ``e_*^{zX} * vacuum``.

    The evolution value solves ``df/dz = X * f`` from the vacuum, giving
    ``e^{z/2}`` times the vacuum.  The truncation value multiplies
    ``e_*^{zX}`` into Taylor truncations of the vacuum's expression and takes
    the last partial result.  Both are reported with their difference.
    """
    h = complex(hbar)
    vac = vacuum(ordering, h)
    if points is None:
        points = (np.array([0.3 + 0.1j, -0.5j, 0.7]), np.array([0.2, 0.4 - 0.2j, -0.1j]))
    u, v = (np.asarray(x, dtype=complex) for x in points)
    evo = vac.scale(cmath.exp(z / 2)).evaluate(u, v)
    E = star_exp_quadratic(complex(z) / 2, ordering, h)
    # Taylor truncation of exp(alpha u^2/ih + beta 2uv/ih) as a polynomial
    q = Polynomial(2, {(2, 0): vac.alpha / (1j * h), (1, 1): 2 * vac.beta / (1j * h)}, h)
    part = _one_poly(h)
    term = _one_poly(h)
    for m in range(1, n_terms + 1):
        term = term * q * (1 / m)
        part = part + term
    trunc = poly_star_exp(part * vac.amp, E, side="right").evaluate(u, v)
    return {"evolution": evo, "truncation": trunc, "max_diff": float(np.max(np.abs(evo - trunc)))}
