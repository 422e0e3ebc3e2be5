"""Quadrature-backed star elements.

A :class:`StarFunctionEvaluator` is a finite sum of

* integral terms ``c * L * (int_C w(t) E(a t + b) dt) * R`` where ``E`` is a
  star exponential family and ``L``, ``R`` are polynomials, and
* closed terms ``c * L * B * R`` with ``B`` a closed-form uv-family element
  or one of the vacuums.

Products with polynomials act on ``L`` and ``R``; evaluation multiplies the
polynomials into the Gaussian integrand node by node.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .. import _gauss
from ..closed_forms import (
    ExpElement,
    exp_group_mul,
    kappa_tau_of,
    poly_star_exp,
    uv_family_params,
)
from ..errors import ConvergenceError, DivergesError, SingularPointError
from ..weyl_poly import OrderingKey, Polynomial, star_mul
from .rules import ContourSpec, QuadratureSpec, subst_nodes, tanh_sinh

__all__ = [
    "IntegralTerm",
    "ClosedTerm",
    "StarFunctionEvaluator",
    "Evaluation",
    "default_grid",
]

POLE_RTOL = 1e-10

LogWeight = Callable[[np.ndarray, np.ndarray], np.ndarray]


def default_grid(values: Sequence[float] = (-1.0, -0.5, 0.0, 0.5, 1.0)):
    """The 25-point sample ``u = x + iy``, ``v = x - iy`` over ``x, y`` in ``values``."""
    xs, ys = np.meshgrid(np.asarray(values, float), np.asarray(values, float), indexing="ij")
    u = xs.ravel() + 1j * ys.ravel()
    return u, u.conj()


def _const_value(p: Polynomial) -> complex | None:
    if p.degree() > 0:
        return None
    return complex(p.coeff((0, 0)))


@dataclass(frozen=True)
class IntegralTerm:
    """``coef * left * int_C exp(log_w(t)) E(scale * t + shift) dt * right``.

    ``family`` is ``"x"`` for ``E(s) = e_*^{s uv/(i hbar)}`` or ``"linear"``
    for ``E(s) = e_*^{s u_k/(i hbar)}`` with ``k = lin_index``.  ``rate_lo``
    and ``rate_hi`` give the exponential growth of the weight at the two ends
    of a real line (``None`` when unknown, ``-inf`` for faster-than-exponential
    decay); they decide whether products of two integrals converge.
    """

    log_w: LogWeight
    contour: ContourSpec
    left: Polynomial
    right: Polynomial
    coef: complex = 1.0 + 0j
    scale: complex = 1.0 + 0j
    shift: complex = 0j
    family: str = "x"
    lin_index: int = 0
    rate_lo: complex | None = None
    rate_hi: complex | None = None
    mapping: str = "auto"
    label: str = ""

    def nodes(self, spec: QuadratureSpec, h: float | None = None, trunc_scale: float = 1.0):
        if trunc_scale != 1.0:
            spec = replace(spec, trunc=spec.trunc * trunc_scale)
        if self.mapping == "line":
            spec = replace(spec, substitution=False)
        return self.contour.nodes(spec, h)

    def truncated(self, spec: QuadratureSpec) -> bool:
        """Whether the current settings cut the contour at ``+-trunc``."""
        c = self.contour
        if c.kind != "line" or (spec.substitution and self.mapping != "line"):
            return False
        return c.lo < -spec.trunc or c.hi > spec.trunc

    def is_plain(self) -> bool:
        return (
            self.family == "x"
            and self.contour.kind == "line"
            and self.contour.offset == 0
            and self.contour.orientation == 1
            and _const_value(self.left) is not None
            and _const_value(self.right) is not None
        )


@dataclass(frozen=True)
class ClosedTerm:
    """``coef * left * base * right`` with a closed-form ``base``."""

    base: ExpElement
    left: Polynomial
    right: Polynomial
    coef: complex = 1.0 + 0j

    def element(self) -> ExpElement:
        e = self.base
        if self.left.degree() > 0:
            e = poly_star_exp(self.left, e, "left")
        else:
            e = e.scale(complex(self.left.coeff((0, 0))))
        if self.right.degree() > 0:
            e = poly_star_exp(self.right, e, "right")
        else:
            e = e.scale(complex(self.right.coeff((0, 0))))
        return e.scale(self.coef)


@dataclass(frozen=True)
class Evaluation:
    """Values on a set of points with a self-validation error estimate."""

    u: np.ndarray
    v: np.ndarray
    value: np.ndarray
    err_est: np.ndarray

    def records(self, z: complex | None = None) -> list:
        out = []
        for a, b, val, e in zip(self.u, self.v, self.value, self.err_est):
            out.append(
                {
                    "point": [[a.real, a.imag], [b.real, b.imag]],
                    "z": None if z is None else [complex(z).real, complex(z).imag],
                    "value": [val.real, val.imag],
                    "err_est": float(e),
                }
            )
        return out


class StarFunctionEvaluator:
    """Immutable sum of integral and closed terms in one ordering.

    Parameters
    ----------
    ordering : OrderingKey
        A two-variable ``(kappa, tau)`` ordering.
    integrals, closed : sequences of terms
    spec : QuadratureSpec, optional
    hbar : complex
    name : str
        Free-form description used in reports.
    """

    def __init__(
        self,
        ordering: OrderingKey,
        integrals: Iterable[IntegralTerm] = (),
        closed: Iterable[ClosedTerm] = (),
        spec: QuadratureSpec | None = None,
        hbar: complex = 1.0,
        name: str = "",
    ):
        self.ordering = ordering
        self.kappa, self.tau = kappa_tau_of(ordering)
        self.integrals = tuple(integrals)
        self.closed = tuple(closed)
        self.spec = spec or QuadratureSpec()
        self.hbar = complex(hbar)
        self.name = name

    # ------------------------------------------------------------------ algebra
    def _like(self, integrals, closed, name=None) -> "StarFunctionEvaluator":
        return StarFunctionEvaluator(
            self.ordering, integrals, closed, self.spec, self.hbar, self.name if name is None else name
        )

    def one(self) -> Polynomial:
        return Polynomial.const(1, 2, self.hbar)

    def with_spec(self, spec: QuadratureSpec) -> "StarFunctionEvaluator":
        return StarFunctionEvaluator(self.ordering, self.integrals, self.closed, spec, self.hbar, self.name)

    def scale(self, c: complex) -> "StarFunctionEvaluator":
        c = complex(c)
        return self._like(
            [replace(t, coef=t.coef * c) for t in self.integrals],
            [replace(t, coef=t.coef * c) for t in self.closed],
        )

    def _compatible(self, other: "StarFunctionEvaluator"):
        if other.ordering != self.ordering or other.hbar != self.hbar:
            raise ValueError("evaluators must share the ordering and hbar")

    def __add__(self, other):
        if isinstance(other, StarFunctionEvaluator):
            self._compatible(other)
            return self._like(self.integrals + other.integrals, self.closed + other.closed)
        if isinstance(other, ExpElement):
            return self._like(self.integrals, self.closed + (ClosedTerm(other, self.one(), self.one()),))
        if isinstance(other, (int, float, complex)):
            return self + self.constant(other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, (StarFunctionEvaluator, ExpElement)):
            return self + (-other)
        if isinstance(other, (int, float, complex)):
            return self + (-complex(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, (int, float, complex)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def constant(self, c: complex) -> "StarFunctionEvaluator":
        base = ExpElement.constant(1.0, self.ordering, self.hbar)
        return self._like([], [ClosedTerm(base, self.one(), self.one(), complex(c))])

    def _poly(self, p: Polynomial) -> Polynomial:
        if p.n != 2:
            raise ValueError("expected a two-variable polynomial")
        return p if p.hbar is not None else p.to_float(self.hbar)

    def left_mul(self, p: Polynomial) -> "StarFunctionEvaluator":
        """``p * self``."""
        p = self._poly(p)
        return self._like(
            [replace(t, left=star_mul(p, t.left, self.ordering)) for t in self.integrals],
            [replace(t, left=star_mul(p, t.left, self.ordering)) for t in self.closed],
        )

    def right_mul(self, p: Polynomial) -> "StarFunctionEvaluator":
        """``self * p``."""
        p = self._poly(p)
        return self._like(
            [replace(t, right=star_mul(t.right, p, self.ordering)) for t in self.integrals],
            [replace(t, right=star_mul(t.right, p, self.ordering)) for t in self.closed],
        )

    def star(self, other: "StarFunctionEvaluator") -> "StarFunctionEvaluator":
        """Product of two evaluators built from plain uv-family integrals.

        The product of ``int w1(t) E(t) dt`` and ``int w2(s) E(s) ds`` is
        ``int W(r) E(r) dr`` with the convolution ``W = w1 * w2``.

        Raises
        ------
        DivergesError
            If the convolution integral diverges.
        NotImplementedError
            For terms with polynomial factors, shifted contours or closed terms.
        """
        self._compatible(other)
        if self.closed or other.closed:
            raise NotImplementedError("products with closed terms are not supported")
        out = []
        for a in self.integrals:
            for b in other.integrals:
                out.append(_convolve(a, b, self.spec))
        return self._like(out, [], name=f"({self.name})*({other.name})")

    def star_vacuum(self) -> ExpElement | None:
        """``self * vacuum`` as a closed element, when all terms are plain."""
        from ..closed_forms import vacuum

        vac = vacuum(self.ordering, self.hbar)
        extra = []
        for t in self.integrals:
            if t.family != "x" or _const_value(t.right) is None:
                raise NotImplementedError("vacuum product needs a constant right factor")
            s = t.coef * _const_value(t.right) * self._scalar_integral(t, 0.5)
            extra.append((t.left, s))
        for c in self.closed:
            if _const_value(c.right) is None:
                raise NotImplementedError("vacuum product needs a constant right factor")
            e = exp_group_mul(c.base, vac)
            extra.append((c.left, c.coef * _const_value(c.right) * complex(e.amp) / complex(vac.amp)))
        pre = Polynomial(2, hbar=self.hbar)
        for left, s in extra:
            pre = pre + left * s
        # left * vacuum with left a sum of polynomials: linear in the polynomial
        return poly_star_exp(pre, vac, "left") if pre.degree() > 0 else vac.scale(_const_value(pre) or 0)

    def vacuum_eigenvalue(self) -> complex:
        """Scalar ``lambda`` with ``self * vacuum = lambda vacuum`` for plain terms."""
        from ..closed_forms import vacuum

        vac = vacuum(self.ordering, self.hbar)
        total = 0j
        for t in self.integrals:
            l, r = _const_value(t.left), _const_value(t.right)
            if t.family != "x" or l is None or r is None:
                raise NotImplementedError("vacuum eigenvalue needs constant polynomial factors")
            _check_scalar_convergence(t, 0.5)
            total += t.coef * l * r * self._refined_scalar(t, 0.5)
        for c in self.closed:
            l, r = _const_value(c.left), _const_value(c.right)
            if l is None or r is None:
                raise NotImplementedError("vacuum eigenvalue needs constant polynomial factors")
            e = exp_group_mul(c.base, vac)
            total += c.coef * l * r * complex(e.amp) / complex(vac.amp)
        return total

    def _scalar_integral(self, t: IntegralTerm, rate: complex, h=None, trunc_scale=1.0) -> complex:
        """``int exp(log_w(t)) exp(rate (scale t + shift)) dt`` with the term's nodes."""
        z, lw, tail = t.nodes(self.spec, h, trunc_scale)
        with np.errstate(over="ignore", invalid="ignore"):
            ex = t.log_w(z, tail) + lw + rate * (t.scale * z + t.shift)
        return complex(np.sum(_gauss.safe_exp(ex)))

    def scalar_reduction(self, rate: complex = 0.5) -> complex:
        """Alias of the vacuum eigenvalue computed with a custom exponent ``rate``."""
        total = 0j
        for t in self.integrals:
            total += t.coef * (_const_value(t.left) or 0) * (_const_value(t.right) or 0) * self._refined_scalar(t, rate)
        return total

    def _refined_scalar(self, t: IntegralTerm, rate: complex) -> complex:
        h = 1.0 / self.spec.nodes_per_unit
        prev = self._scalar_integral(t, rate, h=2 * h)
        cur = self._scalar_integral(t, rate, h=h)
        for _ in range(self.spec.max_refine):
            if abs(cur - prev) <= self.spec.abs_tol + self.spec.rel_tol * abs(cur):
                break
            h /= 2
            prev, cur = cur, self._scalar_integral(t, rate, h=h)
        return cur

    # --------------------------------------------------------------- evaluation
    def _family_nodes(self, t: IntegralTerm, z: np.ndarray):
        s = t.scale * z + t.shift
        h = self.hbar
        if t.family == "x":
            log_amp, c, alpha, rel = uv_family_params(s / 2, self.kappa, self.tau)
            if np.any(rel < POLE_RTOL):
                raise SingularPointError("a quadrature node hits the singular locus")
            gp = _gauss.GaussParams.build(alpha, c, 0, 0, 0, h, size=z.shape[0])
            return log_amp, gp
        kk = complex(self.ordering.K[t.lin_index][t.lin_index])
        log_amp = s * s * kk / (4j * h)
        lin = [np.zeros_like(s), np.zeros_like(s)]
        lin[t.lin_index] = s
        gp = _gauss.GaussParams.build(0, 0, 0, lin[0], lin[1], h, size=z.shape[0])
        return log_amp, gp

    def _integral_values(self, t: IntegralTerm, u, v, h=None, trunc_scale=1.0) -> np.ndarray:
        z, lw, tail = t.nodes(self.spec, h, trunc_scale)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            logw = t.log_w(z, tail) + lw
        keep = np.isfinite(logw) & (logw.real > -745.0)
        z, logw = z[keep], logw[keep]
        if z.size == 0:
            return np.zeros(u.shape, dtype=complex)
        log_amp, gp = self._family_nodes(t, z)
        lam = self.ordering.lambda_matrix()
        R = _gauss.ones(z.shape[0])
        if t.left.degree() > 0 or _const_value(t.left) != 1:
            R = _gauss.star_left(_gauss.poly_terms(t.left), R, gp, lam)
        if t.right.degree() > 0 or _const_value(t.right) != 1:
            R = _gauss.star_right(R, _gauss.poly_terms(t.right), gp, lam)
        pv = _gauss.dense_eval(R, u, v)
        with np.errstate(over="ignore", invalid="ignore"):
            ex = (logw + log_amp)[:, None] + gp.log_q(u, v)
            vals = _gauss.safe_exp(ex) * pv
        vals[~np.isfinite(vals)] = 0
        return t.coef * np.sum(vals, axis=0)

    def _closed_values(self, u, v) -> np.ndarray:
        out = np.zeros(u.shape, dtype=complex)
        for c in self.closed:
            out = out + np.asarray(c.element().evaluate(u, v))
        return out

    def _refined(self, t: IntegralTerm, u, v):
        """Halve the step until successive values agree; return ``(value, change)``."""
        h = 1.0 / self.spec.nodes_per_unit
        prev = self._integral_values(t, u, v, h=2 * h)
        cur = self._integral_values(t, u, v, h=h)
        for _ in range(self.spec.max_refine):
            diff = np.abs(cur - prev)
            if np.all(diff <= self.spec.abs_tol + self.spec.rel_tol * np.abs(cur)):
                break
            h /= 2
            prev, cur = cur, self._integral_values(t, u, v, h=h)
        return cur, np.abs(cur - prev), h

    def evaluate(self, u, v, with_error: bool = False):
        """Values at points ``(u, v)`` (arrays broadcast).

        The step of every integral is halved until two successive values
        agree to ``abs_tol + rel_tol |value|`` (at most ``spec.max_refine``
        times).  With ``with_error=True`` an :class:`Evaluation` is returned
        whose ``err_est`` is the last change, plus the change under doubling
        the truncation for contours cut at ``spec.trunc``.
        """
        u0 = np.asarray(u, dtype=complex)
        v0 = np.asarray(v, dtype=complex)
        shape = np.broadcast(u0, v0).shape
        uu = np.broadcast_to(u0, shape).ravel()
        vv = np.broadcast_to(v0, shape).ravel()
        val = self._closed_values(uu, vv)
        err = np.zeros(uu.shape)
        for t in self.integrals:
            fine, e, h = self._refined(t, uu, vv)
            val = val + fine
            if with_error:
                if t.truncated(self.spec):
                    e = e + np.abs(self._integral_values(t, uu, vv, h=h, trunc_scale=2.0) - fine)
                err = err + e
        if with_error:
            return Evaluation(uu, vv, val, err)
        val = val.reshape(shape)
        return complex(val) if val.ndim == 0 else val

    __call__ = evaluate

    def evaluate_checked(self, u, v) -> Evaluation:
        """Like :meth:`evaluate` with the error estimate, raising when it exceeds the tolerances."""
        ev = self.evaluate(u, v, with_error=True)
        bound = self.spec.abs_tol + self.spec.rel_tol * np.abs(ev.value)
        if np.any(ev.err_est > np.maximum(bound, 1e-6)):
            raise ConvergenceError(
                f"quadrature self-validation failed: max estimate {ev.err_est.max():.3g}"
            )
        return ev

    def __repr__(self):
        return (
            f"StarFunctionEvaluator({self.name!r}, integrals={len(self.integrals)}, "
            f"closed={len(self.closed)}, kappa={self.kappa}, tau={self.tau})"
        )


def _check_scalar_convergence(t: IntegralTerm, rate: float) -> None:
    """Raise if ``int w(t) e^{rate * scale * t} dt`` diverges at an infinite end."""
    c = t.contour
    if c.kind != "line":
        return
    growth = rate * complex(t.scale)
    if c.lo == -math.inf and t.rate_lo is not None and not (complex(t.rate_lo) + growth).real > 0:
        raise DivergesError("the scalar reduction diverges at -infinity")
    if c.hi == math.inf and t.rate_hi is not None and not (complex(t.rate_hi) + growth).real < 0:
        raise DivergesError("the scalar reduction diverges at +infinity")


def _convolve(a: IntegralTerm, b: IntegralTerm, spec: QuadratureSpec) -> IntegralTerm:
    for t in (a, b):
        if not t.is_plain() or t.scale != 1 or t.shift != 0:
            raise NotImplementedError("convolution is implemented for plain uv-family integrals")
    lo1, hi1 = a.contour.lo, a.contour.hi
    lo2, hi2 = b.contour.lo, b.contour.hi

    def converges(r_lo, r_hi):
        if r_lo is None or r_hi is None:
            return False
        return (complex(r_lo) - complex(r_hi)).real > 0

    # t -> -inf in the first factor while r - t -> +inf in the second, and vice versa
    if lo1 == -math.inf and hi2 == math.inf and not converges(a.rate_lo, b.rate_hi):
        raise DivergesError("the product of the two integrals diverges")
    if hi1 == math.inf and lo2 == -math.inf and not converges(b.rate_lo, a.rate_hi):
        raise DivergesError("the product of the two integrals diverges")

    lo, hi = lo1 + lo2, hi1 + hi2
    h = 1.0 / spec.nodes_per_unit
    wa, wb = a.log_w, b.log_w

    def log_w(r, tail):
        out = np.empty(r.shape, dtype=complex)
        for m, rm in enumerate(np.asarray(r).real):
            A = max(lo1, rm - hi2)
            B = min(hi1, rm - lo2)
            if not B > A:
                out[m] = -np.inf
                continue
            if math.isfinite(A) and math.isfinite(B):
                q = tanh_sinh(A, B, h, spec.level_max)
                t, lw = q.x, np.log(q.w)
                tail1 = np.where(q.d_hi < q.d_lo, q.d_hi + (hi1 - B), hi1 - t)
                tail2 = np.where(q.d_lo <= q.d_hi, q.d_lo + (A - (rm - hi2)), hi2 - (rm - t))
            else:
                n = subst_nodes(A, B, h, spec.level_max)
                t, lw = n.t, n.log_w
                tail1 = hi1 - t
                tail2 = hi2 - (rm - t)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                ex = wa(t + 0j, tail1) + wb(rm - t + 0j, tail2) + lw
            ex = ex[np.isfinite(ex)]
            if ex.size == 0:
                out[m] = -np.inf
                continue
            top = ex.real.max()
            s = np.sum(np.exp(ex - top))
            out[m] = top + np.log(s) if s != 0 else -np.inf
        return out

    rate_lo = None
    rate_hi = None
    if lo == -math.inf and a.rate_lo is not None and b.rate_lo is not None:
        rate_lo = a.rate_lo if complex(a.rate_lo).real < complex(b.rate_lo).real else b.rate_lo
    coef = a.coef * b.coef * _const_value(a.left) * _const_value(a.right) * _const_value(b.left) * _const_value(b.right)
    one = Polynomial.const(1, 2, a.left.hbar)
    return IntegralTerm(
        log_w,
        ContourSpec.line(lo, hi),
        one,
        one,
        coef=coef,
        rate_lo=rate_lo,
        rate_hi=rate_hi,
        mapping="auto",
        label=f"conv({a.label},{b.label})",
    )
