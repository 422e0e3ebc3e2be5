"""Quadrature rules and specifications.

Rules return nodes together with the distances to both interval ends, so
integrands with endpoint singularities can be evaluated without
cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..errors import ContourTooCloseError

__all__ = [
    "QuadratureSpec",
    "ContourSpec",
    "TanhSinhNodes",
    "tanh_sinh",
    "gauss_legendre_composite",
    "subst_nodes",
    "line_nodes",
    "t_of_s",
    "s_of_t",
]

SCHEMES = ("tanh-sinh", "gauss-legendre")


@dataclass(frozen=True)
class QuadratureSpec:
    """Numerical settings shared by every evaluator.

    Parameters
    ----------
    scheme : {"tanh-sinh", "gauss-legendre"}
        Rule for line integrals; circles always use composite Gauss-Legendre.
    trunc : float
        Half-infinite lines that are not mapped to a finite interval are cut
        at ``|t| = trunc``.
    nodes_per_unit : int
        Inverse step of the tanh-sinh rule (or panels per unit length for
        Gauss-Legendre).
    abs_tol, rel_tol : float
        Targets for the self-validation estimate.
    level_max : float
        Tanh-sinh nodes use ``|k h| <= level_max``.
    substitution : bool
        Map real lines to ``[-pi, 0]`` through ``cos s = tanh(t/2)``.
    max_refine : int
        Evaluation halves the step until two successive values agree to the
        tolerances, at most this many times.
    """

    scheme: str = "tanh-sinh"
    trunc: float = 40.0
    nodes_per_unit: int = 16
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    level_max: float = 4.5
    substitution: bool = True
    gl_order: int = 16
    max_refine: int = 3

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.trunc <= 0 or self.nodes_per_unit <= 0:
            raise ValueError("trunc and nodes_per_unit must be positive")

    def coarser(self) -> "QuadratureSpec":
        return replace(self, nodes_per_unit=max(1, self.nodes_per_unit // 2))

    def longer(self) -> "QuadratureSpec":
        return replace(self, trunc=2 * self.trunc)

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TanhSinhNodes:
    """Nodes on ``[a, b]`` with accurate endpoint distances."""

    x: np.ndarray
    d_lo: np.ndarray
    d_hi: np.ndarray
    w: np.ndarray


def tanh_sinh(a: float, b: float, h: float, level_max: float = 4.5) -> TanhSinhNodes:
    """Tanh-sinh rule of step ``h`` on the finite interval ``[a, b]``."""
    if not b > a:
        raise ValueError("need a < b")
    k = np.arange(-int(level_max / h), int(level_max / h) + 1)
    s = k * h
    q = 0.5 * math.pi * np.sinh(s)
    half = 0.5 * (b - a)
    # 1 - tanh(q) = 2 / (1 + e^{2q}) without cancellation
    d_lo = half * 2.0 / (1.0 + np.exp(2 * q))
    d_hi = half * 2.0 / (1.0 + np.exp(-2 * q))
    x = np.where(d_lo <= d_hi, a + d_lo, b - d_hi)
    w = h * half * 0.5 * math.pi * np.cosh(s) / np.cosh(q) ** 2
    keep = (w > 0) & (d_lo > 0) & (d_hi > 0)
    return TanhSinhNodes(x[keep], d_lo[keep], d_hi[keep], w[keep])


def gauss_legendre_composite(a: float, b: float, panels: int, order: int = 16):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``."""
    g, gw = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    rad = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + rad[:, None] * g[None, :]).ravel()
    w = (rad[:, None] * gw[None, :]).ravel()
    return x, w


def s_of_t(t: float) -> float:
    """Inverse of the map ``cos s = tanh(t/2)`` onto ``[-pi, 0]``."""
    if t == -math.inf:
        return -math.pi
    if t == math.inf:
        return 0.0
    return 2 * math.atan(math.exp(t / 2)) - math.pi


def t_of_s(eps_left: np.ndarray, eps_right: np.ndarray) -> np.ndarray:
    """``t`` from the distances ``s + pi`` and ``-s``, whichever is smaller."""
    with np.errstate(divide="ignore"):
        left = 2 * np.log(np.tan(0.5 * eps_left))
        right = -2 * np.log(np.tan(0.5 * eps_right))
    return np.where(eps_left <= eps_right, left, right)


@dataclass(frozen=True)
class LineNodes:
    """Real nodes ``t`` on a line, with ``log`` weights and the distance to the upper end."""

    t: np.ndarray
    log_w: np.ndarray
    tail: np.ndarray


def subst_nodes(lo: float, hi: float, h: float, level_max: float = 4.5) -> LineNodes:
    """Nodes for ``int_lo^hi dt`` mapped through ``cos s = tanh(t/2)``.

    ``tail = hi - t`` is computed from the distance to ``s(hi)`` so that
    weights singular at a finite upper end stay accurate.
    """
    s_lo, s_hi = s_of_t(lo), s_of_t(hi)
    if not s_hi > s_lo:
        # the interval lies beyond double precision resolution of s
        empty = np.zeros(0)
        return LineNodes(empty, empty, empty)
    r = tanh_sinh(s_lo, s_hi, h, level_max)
    near_lo = r.d_lo <= r.d_hi
    eps_l = np.where(near_lo, (s_lo + math.pi) + r.d_lo, (s_hi + math.pi) - r.d_hi)
    eps_r = np.where(near_lo, -s_lo - r.d_lo, -s_hi + r.d_hi)
    t = t_of_s(eps_l, eps_r)
    sin_e = np.sin(np.minimum(eps_l, eps_r))
    log_w = np.log(r.w) + math.log(2) - np.log(sin_e)
    if math.isfinite(hi):
        # tan A - tan B = sin(A - B) / (cos A cos B) with A = (s_hi + pi)/2, B = A - d/2
        A = 0.5 * (s_hi + math.pi)
        B = A - 0.5 * r.d_hi
        with np.errstate(divide="ignore", invalid="ignore"):
            close = 2 * np.log1p(np.sin(0.5 * r.d_hi) / (math.cos(A) * np.sin(B)))
        tail = np.where(near_lo, hi - t, close)
    else:
        tail = np.full_like(t, math.inf)
    ok = np.isfinite(t)
    return LineNodes(t[ok], log_w[ok], tail[ok])


def line_nodes(lo: float, hi: float, spec: QuadratureSpec, h: float | None = None) -> LineNodes:
    """Nodes on ``[max(lo, -T), min(hi, T)]`` without a change of variables.

    The interval is split into panels of length at most 2, each carrying
    its own tanh-sinh (or Gauss-Legendre) rule.
    """
    h = h if h is not None else 1.0 / spec.nodes_per_unit
    a = max(lo, -spec.trunc)
    b = min(hi, spec.trunc)
    n = max(1, int(math.ceil((b - a) / 2.0)))
    edges = np.linspace(a, b, n + 1)
    edges[-1] = b
    ts, lws, tails = [], [], []
    for p in range(n):
        pa, pb = edges[p], edges[p + 1]
        if spec.scheme == "tanh-sinh":
            r = tanh_sinh(pa, pb, h, spec.level_max)
            x, w = r.x, r.w
            tail = (b - pb) + np.where(r.d_hi < r.d_lo, r.d_hi, pb - r.x)
        else:
            panels = max(1, int(math.ceil((pb - pa) / (h * spec.gl_order / 4))))
            x, w = gauss_legendre_composite(pa, pb, panels, spec.gl_order)
            tail = b - x
        ts.append(x)
        lws.append(np.log(w))
        tails.append(tail)
    return LineNodes(np.concatenate(ts), np.concatenate(lws), np.concatenate(tails))


@dataclass(frozen=True)
class ContourSpec:
    """A contour in the complex ``t`` plane.

    ``kind`` is ``"line"`` (``t = x + offset`` for real ``x`` in
    ``[lo, hi]``), ``"segment"`` (straight from ``start`` to ``end``) or
    ``"circle"`` (``center + radius e^{i theta}``).  ``orientation`` is +1 or -1.
    """

    kind: str
    lo: float = -math.inf
    hi: float = math.inf
    offset: complex = 0j
    start: complex = 0j
    end: complex = 0j
    center: complex = 0j
    radius: float = 1.0
    orientation: int = 1

    def __post_init__(self):
        if self.kind not in ("line", "segment", "circle"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.kind == "line" and not self.hi > self.lo:
            raise ValueError("empty line contour")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @classmethod
    def line(cls, lo=-math.inf, hi=math.inf, offset=0j, orientation=1) -> "ContourSpec":
        return cls("line", lo=lo, hi=hi, offset=complex(offset), orientation=orientation)

    @classmethod
    def segment(cls, start, end) -> "ContourSpec":
        return cls("segment", start=complex(start), end=complex(end))

    @classmethod
    def circle(cls, center, radius, orientation=1) -> "ContourSpec":
        return cls("circle", center=complex(center), radius=float(radius), orientation=orientation)

    def check_clear(self, poles: Sequence[complex], threshold: float) -> None:
        """Raise :class:`ContourTooCloseError` if a pole is within ``threshold``."""
        for p in poles:
            if self.distance_to(p) < threshold:
                raise ContourTooCloseError(f"contour passes within {threshold:g} of the pole {p}")

    def distance_to(self, p: complex) -> float:
        if self.kind == "circle":
            return abs(abs(p - self.center) - self.radius)
        if self.kind == "segment":
            a, b = self.start, self.end
            d = b - a
            s = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
            return abs(p - (a + s * d))
        x = min(max((p - self.offset).real, self.lo), self.hi)
        return abs(p - (x + self.offset))

    def nodes(self, spec: QuadratureSpec, h: float | None = None):
        """Complex nodes ``t`` and complex ``log`` weights (including ``dt``)."""
        h = h if h is not None else 1.0 / spec.nodes_per_unit
        if self.kind == "circle":
            panels = max(2, int(round(0.5 / h)))
            th, w = gauss_legendre_composite(0.0, 2 * math.pi, panels, spec.gl_order)
            z = self.center + self.radius * np.exp(1j * th)
            dz = 1j * self.radius * np.exp(1j * th) * self.orientation
            return z, np.log(w * dz), np.full(z.shape, math.inf)
        if self.kind == "segment":
            d = self.end - self.start
            r = tanh_sinh(0.0, 1.0, h, spec.level_max)
            z = self.start + r.x * d
            return z, np.log(r.w * d + 0j), np.full(z.shape, math.inf)
        if spec.substitution:
            ln = subst_nodes(self.lo, self.hi, h, spec.level_max)
        else:
            ln = line_nodes(self.lo, self.hi, spec, h)
        lw = ln.log_w + (0j if self.orientation == 1 else 1j * math.pi)
        return ln.t + self.offset, lw, ln.tail

    def to_json(self) -> dict:
        def c(z):
            return [complex(z).real, complex(z).imag]

        return {
            "kind": self.kind,
            "lo": self.lo,
            "hi": self.hi,
            "offset": c(self.offset),
            "start": c(self.start),
            "end": c(self.end),
            "center": c(self.center),
            "radius": self.radius,
            "orientation": self.orientation,
        }
