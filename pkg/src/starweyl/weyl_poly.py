"""Exact star products on multivariate polynomials.

A star product on ``C[u_1, ..., u_n]`` is fixed by a complex matrix
``Lambda = K + J`` with ``K`` symmetric and ``J`` skew.  For polynomials
the bidifferential series

    f * g = sum_k (i hbar)^k / (k! 2^k) Lambda^{i1 j1} ... Lambda^{ik jk}
            (d_{i1} ... d_{ik} f) (d_{j1} ... d_{jk} g)

terminates, so every product is computed exactly.  Coefficients are either
exact polynomials in the formal parameter ``hbar`` with Gaussian-rational
coefficients, or complex floats with ``hbar`` bound to a number.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Number
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionError, OrderingMismatchError

__all__ = [
    "GaussianRational",
    "Coefficient",
    "HBAR",
    "Polynomial",
    "OrderingKey",
    "star_mul",
    "star_pow",
    "commutator",
    "intertwine",
    "bumping_apply",
    "w2_generators",
    "iter_monomials",
    "random_polynomial",
    "random_ordering",
]

MAX_VARS = 8
FLOAT_ZERO_RTOL = 1e-12


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"cannot convert {x!r} to an exact rational")
        return Fraction(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class GaussianRational:
    """Exact complex number ``(p + q*i) / d`` with integers ``p, q, d``.

    Floats are converted through their exact binary value, so ``0.5j``
    becomes ``i/2`` without rounding.  The representation is kept reduced
    (``d > 0`` and ``gcd(p, q, d) == 1``).
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, re=0, im=0):
        a = _frac(re)
        b = _frac(im)
        d = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (d // a.denominator), b.numerator * (d // b.denominator), d)

    def _set(self, p: int, q: int, d: int):
        g = math.gcd(p, q, d)
        if g != 1:
            p //= g
            q //= g
            d //= g
        self.p = p
        self.q = q
        self.d = d

    @classmethod
    def _make(cls, p: int, q: int, d: int) -> "GaussianRational":
        obj = cls.__new__(cls)
        obj._set(p, q, d)
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            obj = cls.__new__(cls)
            obj.p, obj.q, obj.d = int(x), 0, 1
            return obj
        if isinstance(x, (complex, np.complexfloating)):
            return cls(x.real, x.imag)
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return cls(x[0], x[1])
        return cls(x, 0)

    @property
    def re(self) -> Fraction:
        return Fraction(self.p, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.q, self.d)

    def __add__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        if self.d == o.d:
            return GaussianRational._make(self.p + o.p, self.q + o.q, self.d)
        return GaussianRational._make(
            self.p * o.d + o.p * self.d, self.q * o.d + o.q * self.d, self.d * o.d
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return GaussianRational._make(self.p * other, self.q * other, self.d)
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(
            self.p * o.p - self.q * o.q, self.p * o.q + self.q * o.p, self.d * o.d
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        n2 = o.p * o.p + o.q * o.q
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        # (a/d) / (b/e) = a * conj(b) * e / (d * |b|^2)
        p = (self.p * o.p + self.q * o.q) * o.d
        q = (self.q * o.p - self.p * o.q) * o.d
        return GaussianRational._make(p, q, self.d * n2)

    def __rtruediv__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = GaussianRational._make(1, 0, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        obj = GaussianRational.__new__(GaussianRational)
        obj.p, obj.q, obj.d = -self.p, -self.q, self.d
        return obj

    def __bool__(self):
        return self.p != 0 or self.q != 0

    def __eq__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return self.p == o.p and self.q == o.q and self.d == o.d

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __complex__(self):
        return complex(self.p / self.d, self.q / self.d)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.p, -self.q, self.d)

    def __repr__(self):
        re, im = self.re, self.im
        if not im:
            return str(re)
        if not re:
            return f"{im}i"
        return f"({re}{'+' if im > 0 else '-'}{abs(im)}i)"


def _gr_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction, float, complex, np.number)):
        return GaussianRational.coerce(x)
    return None


_GR_ZERO = GaussianRational(0)
_GR_ONE = GaussianRational(1)
_GR_HALF_I = GaussianRational(0, Fraction(1, 2))
_GR_QUARTER_I = GaussianRational(0, Fraction(1, 4))


class Coefficient:
    """Exact coefficient: a polynomial in ``hbar`` over the Gaussian rationals.

    Stored as a map ``power -> GaussianRational`` with zero entries removed.
    Float-mode polynomials use plain ``complex`` coefficients instead.
    """

    __slots__ = ("_c",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        c = {}
        if terms:
            for p, a in terms.items():
                if p < 0:
                    raise ValueError("negative powers of hbar are not allowed")
                g = GaussianRational.coerce(a)
                if g:
                    c[int(p)] = g
        self._c = c

    @classmethod
    def coerce(cls, x) -> "Coefficient":
        if isinstance(x, Coefficient):
            return x
        return cls({0: GaussianRational.coerce(x)})

    @classmethod
    def _raw(cls, c: dict) -> "Coefficient":
        obj = cls.__new__(cls)
        obj._c = c
        return obj

    @property
    def terms(self) -> dict:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def __add__(self, other):
        o = _coef_or_none(other)
        if o is None:
            return NotImplemented
        c = dict(self._c)
        for p, a in o._c.items():
            s = c.get(p, _GR_ZERO) + a
            if s:
                c[p] = s
            else:
                c.pop(p, None)
        return Coefficient._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient._raw({p: -a for p, a in self._c.items()})

    def __sub__(self, other):
        o = _coef_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coef_or_none(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, Coefficient):
            c: dict = {}
            for p, a in self._c.items():
                for q, b in other._c.items():
                    s = c.get(p + q, _GR_ZERO) + a * b
                    if s:
                        c[p + q] = s
                    else:
                        c.pop(p + q, None)
            return Coefficient._raw(c)
        g = _gr_or_none(other)
        if g is None:
            return NotImplemented
        if not g:
            return Coefficient._raw({})
        return Coefficient._raw({p: a * g for p, a in self._c.items()})

    __rmul__ = __mul__

    def scale_shift(self, g: GaussianRational, k: int) -> "Coefficient":
        """Return ``g * hbar**k * self``."""
        if not g:
            return Coefficient._raw({})
        return Coefficient._raw({p + k: a * g for p, a in self._c.items()})

    def __eq__(self, other):
        o = _coef_or_none(other)
        if o is None:
            return NotImplemented
        return self._c == o._c

    def __hash__(self):
        return hash(tuple(sorted(self._c.items())))

    def evaluate(self, hbar: complex = 1.0) -> complex:
        h = complex(hbar)
        return sum(complex(a) * h**p for p, a in self._c.items()) + 0j

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for p in sorted(self._c):
            a = self._c[p]
            if p == 0:
                parts.append(repr(a))
            elif p == 1:
                parts.append(f"{a!r}*hbar")
            else:
                parts.append(f"{a!r}*hbar^{p}")
        return " + ".join(parts)


def _coef_or_none(x):
    if isinstance(x, Coefficient):
        return x
    g = _gr_or_none(x)
    if g is None:
        return None
    return Coefficient._raw({0: g} if g else {})


HBAR = Coefficient({1: 1})
"""The formal deformation parameter as an exact coefficient."""


def _grlex_key(exp: tuple) -> tuple:
    return (sum(exp), exp)


class Polynomial:
    """Sparse polynomial in ``n`` commuting variables.

    Parameters
    ----------
    n : int
        Number of variables (1 to 8).
    terms : mapping, optional
        Map from exponent tuples to coefficients.
    hbar : complex, optional
        ``None`` selects exact mode (coefficients are :class:`Coefficient`);
        a number selects float mode with that value of ``hbar``.

    Notes
    -----
    Instances are immutable.  Exact-mode equality is exact; use
    :meth:`is_close` in float mode.
    """

    __slots__ = ("n", "hbar", "_terms")

    def __init__(self, n: int, terms: Mapping | None = None, hbar: complex | None = None):
        if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_VARS:
            raise ValueError(f"number of variables must be in 1..{MAX_VARS}, got {n!r}")
        self.n = int(n)
        self.hbar = None if hbar is None else complex(hbar)
        clean: dict = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(k) for k in e)
                if len(e) != self.n or any(k < 0 for k in e):
                    raise ValueError(f"bad exponent {e} for {self.n} variables")
                c = self._coerce(c)
                if e in clean:
                    c = clean[e] + c
                clean[e] = c
        self._terms = self._prune(clean)

    def _coerce(self, c):
        if self.hbar is None:
            return Coefficient.coerce(c)
        if isinstance(c, Coefficient):
            return c.evaluate(self.hbar)
        return complex(c)

    def _prune(self, terms: dict) -> dict:
        if self.hbar is None:
            return {e: c for e, c in terms.items() if c}
        if not terms:
            return {}
        scale = max(abs(c) for c in terms.values())
        tol = FLOAT_ZERO_RTOL * (1.0 + scale)
        return {e: c for e, c in terms.items() if abs(c) > tol}

    @classmethod
    def _raw(cls, n: int, terms: dict, hbar) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.n = n
        obj.hbar = hbar
        obj._terms = obj._prune(terms)
        return obj

    @classmethod
    def var(cls, i: int, n: int, hbar: complex | None = None) -> "Polynomial":
        """The coordinate ``u_i`` (0-based index)."""
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1}, hbar)

    @classmethod
    def const(cls, c, n: int, hbar: complex | None = None) -> "Polynomial":
        return cls(n, {(0,) * n: c}, hbar)

    @property
    def mode(self) -> str:
        return "exact" if self.hbar is None else "float"

    @property
    def terms(self) -> dict:
        """Terms sorted in graded lexicographic order."""
        return {e: self._terms[e] for e in sorted(self._terms, key=_grlex_key)}

    def items(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self._terms), default=-1)

    def coeff(self, exp: Sequence[int]):
        z = Coefficient() if self.hbar is None else 0j
        return self._terms.get(tuple(exp), z)

    def _check(self, other: "Polynomial"):
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        if (self.hbar is None) != (other.hbar is None):
            raise TypeError("cannot mix exact and float polynomials; use to_float()")
        if self.hbar is not None and self.hbar != other.hbar:
            raise ValueError("float polynomials bound to different hbar values")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (Number, Coefficient, GaussianRational, np.number)):
            return Polynomial.const(other, self.n, self.hbar)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t = dict(self._terms)
        for e, c in o._terms.items():
            t[e] = t[e] + c if e in t else c
        return Polynomial._raw(self.n, t, self.hbar)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.n, {e: -c for e, c in self._terms.items()}, self.hbar)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        """Commutative (pointwise) product, not the star product."""
        if not isinstance(other, Polynomial):
            o = self._lift(other)
            if o is NotImplemented:
                return o
            c = o.coeff((0,) * self.n)
            return Polynomial._raw(self.n, {e: a * c for e, a in self._terms.items()}, self.hbar)
        self._check(other)
        t: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                t[e] = t[e] + p if e in t else p
        return Polynomial._raw(self.n, t, self.hbar)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.const(1, self.n, self.hbar)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            o = self._lift(other) if isinstance(other, (Number, Coefficient, GaussianRational)) else None
            if o is None or o is NotImplemented:
                return NotImplemented
            other = o
        return (
            self.n == other.n
            and self.hbar == other.hbar
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.n, self.hbar, frozenset(self._terms.items())))

    def is_close(self, other: "Polynomial", tol: float = FLOAT_ZERO_RTOL) -> bool:
        """Coefficient-wise comparison after binding ``hbar``."""
        a = self if self.hbar is not None else self.to_float(other.hbar or 1.0)
        b = other if other.hbar is not None else other.to_float(a.hbar)
        d = a - b
        if d.is_zero():
            return True
        scale = max([abs(c) for c in a._terms.values()] + [abs(c) for c in b._terms.values()])
        return all(abs(c) <= tol * (1.0 + scale) for c in d._terms.values())

    def derivative(self, i: int, k: int = 1) -> "Polynomial":
        t = {}
        for e, c in self._terms.items():
            if e[i] >= k:
                f = math.perm(e[i], k)
                e2 = e[:i] + (e[i] - k,) + e[i + 1:]
                t[e2] = c * f
        return Polynomial._raw(self.n, t, self.hbar)

    def to_float(self, hbar: complex = 1.0) -> "Polynomial":
        if self.hbar is not None:
            if complex(hbar) != self.hbar:
                raise ValueError("polynomial already bound to a different hbar")
            return self
        h = complex(hbar)
        return Polynomial._raw(self.n, {e: c.evaluate(h) for e, c in self._terms.items()}, h)

    def evaluate(self, *point, hbar: complex | None = None):
        """Evaluate at a point; arguments may be numpy arrays (broadcast)."""
        if len(point) == 1 and self.n > 1:
            point = tuple(point[0])
        if len(point) != self.n:
            raise DimensionError(f"expected {self.n} coordinates, got {len(point)}")
        h = self.hbar if self.hbar is not None else complex(1.0 if hbar is None else hbar)
        xs = [np.asarray(x, dtype=complex) for x in point]
        out = np.zeros(np.broadcast(*xs).shape, dtype=complex) if xs else 0j
        for e in sorted(self._terms, key=_grlex_key):
            c = self._terms[e]
            c = c.evaluate(h) if isinstance(c, Coefficient) else c
            m = c
            for x, k in zip(xs, e):
                if k:
                    m = m * x**k
            out = out + m
        if np.ndim(out) == 0:
            return complex(out)
        return out

    __call__ = evaluate

    def to_json(self) -> dict:
        rows = []
        for e, c in self.terms.items():
            if self.hbar is None:
                for p in sorted(c._c):
                    a = c._c[p]
                    rows.append({"exp": list(e), "coeff": {"hbar_pow": p, "re": str(a.re), "im": str(a.im)}})
            else:
                rows.append({"exp": list(e), "coeff": {"hbar_pow": 0, "re": c.real, "im": c.imag}})
        out = {"n": self.n, "terms": rows}
        if self.hbar is not None:
            out["hbar"] = [self.hbar.real, self.hbar.imag]
        return out

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        hbar = data.get("hbar")
        if hbar is not None:
            hbar = complex(hbar[0], hbar[1]) if isinstance(hbar, (list, tuple)) else complex(hbar)
        n = int(data["n"])
        terms: dict = {}
        for row in data["terms"]:
            e = tuple(row["exp"])
            cf = row["coeff"]
            p = int(cf.get("hbar_pow", 0))
            if hbar is None:
                c = Coefficient({p: GaussianRational(_frac(cf["re"]), _frac(cf["im"]))})
            else:
                c = complex(float(cf["re"]), float(cf["im"])) * hbar**p
            terms[e] = terms[e] + c if e in terms else c
        return cls(n, terms, hbar)

    def __repr__(self):
        if not self._terms:
            return "Polynomial(0)"
        names = _var_names(self.n)
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            cs = f"({c!r})"
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)


def _var_names(n: int) -> list:
    if n == 2:
        return ["u", "v"]
    return [f"u{i + 1}" for i in range(n)]


def w2_generators(hbar: complex | None = None) -> tuple:
    """Return the two coordinates ``(u, v)`` of the plane."""
    return Polynomial.var(0, 2, hbar), Polynomial.var(1, 2, hbar)


def _matrix(rows, n: int) -> tuple:
    if isinstance(rows, np.ndarray):
        rows = rows.tolist()
    rows = list(rows)
    if len(rows) == n * n and not isinstance(rows[0], (list, tuple)):
        rows = [rows[i * n:(i + 1) * n] for i in range(n)]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected a {n}x{n} matrix")
    return tuple(tuple(GaussianRational.coerce(x) for x in r) for r in rows)


class OrderingKey:
    """The matrix ``Lambda = K + J`` that selects an ordering expression.

    ``K`` must be symmetric and ``J`` skew-symmetric, both exactly.  Float
    entries are stored through their exact binary value.

    Examples
    --------
    >>> weyl = OrderingKey.kappa_tau(0)
    >>> normal = OrderingKey.kappa_tau(1)
    >>> normal.kappa
    1
    """

    __slots__ = ("n", "K", "J", "_lam_exact", "_lam_float")

    def __init__(self, n: int, K, J):
        self.n = int(n)
        self.K = _matrix(K, self.n)
        self.J = _matrix(J, self.n)
        for i in range(self.n):
            for j in range(self.n):
                if self.K[i][j] != self.K[j][i]:
                    raise ValueError("K must be symmetric")
                if self.J[i][j] != -self.J[j][i]:
                    raise ValueError("J must be skew-symmetric")
        self._lam_exact = tuple(
            (i, j, self.K[i][j] + self.J[i][j])
            for i in range(self.n)
            for j in range(self.n)
            if self.K[i][j] + self.J[i][j]
        )
        self._lam_float = tuple((i, j, complex(g)) for i, j, g in self._lam_exact)

    @classmethod
    def standard_j(cls, n: int) -> tuple:
        """Skew form with ``J[2k][2k+1] = -1`` and zeros elsewhere."""
        J = [[0] * n for _ in range(n)]
        for k in range(0, n - 1, 2):
            J[k][k + 1] = -1
            J[k + 1][k] = 1
        return tuple(tuple(r) for r in J)

    @classmethod
    def kappa_tau(cls, kappa=0, tau=0) -> "OrderingKey":
        """W2 key with ``K = [[0, kappa], [kappa, tau]]`` and ``J = [[0,-1],[1,0]]``."""
        return cls(2, [[0, kappa], [kappa, tau]], [[0, -1], [1, 0]])

    @classmethod
    def weyl(cls) -> "OrderingKey":
        return cls.kappa_tau(0, 0)

    @classmethod
    def normal(cls) -> "OrderingKey":
        return cls.kappa_tau(1, 0)

    @classmethod
    def antinormal(cls) -> "OrderingKey":
        return cls.kappa_tau(-1, 0)

    @property
    def is_w2_family(self) -> bool:
        return (
            self.n == 2
            and self.K[0][0] == 0
            and self.J[0][1] == GaussianRational(-1)
        )

    @property
    def kappa(self):
        """``kappa`` of a W2 ``(kappa, tau)`` key (exact value), else ``None``."""
        return self.K[0][1] if self.is_w2_family else None

    @property
    def tau(self):
        return self.K[1][1] if self.is_w2_family else None

    def lambda_matrix(self) -> np.ndarray:
        return np.array(
            [[complex(self.K[i][j] + self.J[i][j]) for j in range(self.n)] for i in range(self.n)]
        )

    def lambda_entries(self, exact: bool = True) -> tuple:
        """Nonzero entries ``(i, j, Lambda[i][j])``."""
        return self._lam_exact if exact else self._lam_float

    def with_k(self, K) -> "OrderingKey":
        return OrderingKey(self.n, K, self.J)

    def __eq__(self, other):
        if not isinstance(other, OrderingKey):
            return NotImplemented
        return self.n == other.n and self.K == other.K and self.J == other.J

    def __hash__(self):
        return hash((self.n, self.K, self.J))

    def __repr__(self):
        if self.is_w2_family:
            return f"OrderingKey.kappa_tau({self.kappa!r}, {self.tau!r})"
        return f"OrderingKey(n={self.n}, K={self.K!r}, J={self.J!r})"

    def to_json(self) -> dict:
        def enc(M):
            return [[str(g.re), str(g.im)] for r in M for g in r]

        return {"n": self.n, "K": enc(self.K), "J": enc(self.J)}

    @classmethod
    def from_json(cls, data) -> "OrderingKey":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])

        def dec(M):
            if len(M) == n and isinstance(M[0], (list, tuple)) and len(M[0]) == n and isinstance(M[0][0], (list, tuple)):
                M = [x for r in M for x in r]
            vals = [GaussianRational(_frac(p[0]), _frac(p[1])) for p in M]
            return [vals[i * n:(i + 1) * n] for i in range(n)]

        return cls(n, dec(data["K"]), dec(data["J"]))


def _check_pair(f: Polynomial, g: Polynomial, ordering: OrderingKey):
    if f.n != g.n or f.n != ordering.n:
        raise DimensionError(
            f"dimension mismatch: f has {f.n}, g has {g.n}, ordering has {ordering.n}"
        )
    f._check(g)


def _series_factor(mode_exact: bool, hbar, k: int, denom: int):
    """(i hbar / denom)^k / k! as a coefficient multiplier."""
    if mode_exact:
        g = GaussianRational(0, Fraction(1, denom)) ** k / math.factorial(k)
        return g, k
    return (1j * hbar / denom) ** k / math.factorial(k), 0


def _scale(c, factor, shift: int):
    if isinstance(c, Coefficient):
        return c.scale_shift(factor, shift)
    return c * factor


def star_mul(f: Polynomial, g: Polynomial, ordering: OrderingKey) -> Polynomial:
    """Star product ``f *_Lambda g``.

    Parameters
    ----------
    f, g : Polynomial
        Factors in the same ring and mode.
    ordering : OrderingKey
        The matrix ``Lambda``.

    Returns
    -------
    Polynomial
        The finite bidifferential sum; terms of order ``k`` vanish for
        ``k > min(deg f, deg g)``.

    Examples
    --------
    >>> u, v = w2_generators()
    >>> star_mul(v, u, OrderingKey.weyl()) == u * v + Polynomial.const(HBAR * 0.5j, 2)
    True
    """
    _check_pair(f, g, ordering)
    exact = f.hbar is None
    if exact:
        return _star_mul_exact(f, g, ordering)
    lam = ordering.lambda_entries(exact)
    out: dict = {}

    # level-k tensor: (a, b) -> coefficient of x^a y^b in P^k (f(x) g(y))
    level: dict = {}
    for ea, ca in f._terms.items():
        for eb, cb in g._terms.items():
            level[(ea, eb)] = ca * cb
    k = 0
    while level:
        factor, shift = _series_factor(exact, f.hbar, k, 2)
        for (ea, eb), c in level.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            term = _scale(c, factor, shift)
            out[e] = out[e] + term if e in out else term
        nxt: dict = {}
        for (ea, eb), c in level.items():
            for i, j, lij in lam:
                ai, bj = ea[i], eb[j]
                if ai == 0 or bj == 0:
                    continue
                na = ea[:i] + (ai - 1,) + ea[i + 1:]
                nb = eb[:j] + (bj - 1,) + eb[j + 1:]
                w = c * (lij * (ai * bj)) if exact else c * (lij * ai * bj)
                key = (na, nb)
                nxt[key] = nxt[key] + w if key in nxt else w
        level = nxt
        k += 1
    return Polynomial._raw(f.n, out, f.hbar)


def _int_pairs(terms: dict) -> tuple:
    """Gaussian-rational values as integer pairs over one common denominator."""
    D = 1
    for g in terms.values():
        D = D * g.d // math.gcd(D, g.d)
    return {e: (g.p * (D // g.d), g.q * (D // g.d)) for e, g in terms.items()}, D


def _split_hbar(f: Polynomial) -> dict:
    """``{power: {exponent: GaussianRational}}`` for an exact polynomial."""
    out: dict = {}
    for e, c in f._terms.items():
        for pw, a in c._c.items():
            out.setdefault(pw, {})[e] = a
    return out


def _star_mul_exact(f: Polynomial, g: Polynomial, ordering: OrderingKey) -> Polynomial:
    # integer recursion; the level-k value is scaled by (Df Dg L^k)
    lam_g = ordering.lambda_entries(True)
    L = 1
    for _, _, a in lam_g:
        L = L * a.d // math.gcd(L, a.d)
    lam = [(i, j, a.p * (L // a.d), a.q * (L // a.d)) for i, j, a in lam_g]
    acc: dict = {}  # (exponent, hbar power) -> [re, im, den] accumulated as GaussianRational
    fs, gs = _split_hbar(f), _split_hbar(g)
    for pf, ft in fs.items():
        fi, Df = _int_pairs(ft)
        for pg, gt in gs.items():
            gi, Dg = _int_pairs(gt)
            level = {}
            for ea, (ar, ai) in fi.items():
                for eb, (br, bi) in gi.items():
                    level[(ea, eb)] = (ar * br - ai * bi, ar * bi + ai * br)
            k = 0
            den = Df * Dg
            while level:
                # factor (i/2)^k / k!
                fden = den * (2 ** k) * math.factorial(k)
                rot = k % 4
                sums: dict = {}
                for (ea, eb), (cr, ci) in level.items():
                    e = tuple(x + y for x, y in zip(ea, eb))
                    s0 = sums.get(e)
                    if s0 is None:
                        sums[e] = [cr, ci]
                    else:
                        s0[0] += cr
                        s0[1] += ci
                pw = pf + pg + k
                for e, (cr, ci) in sums.items():
                    # multiply by i^k
                    if rot == 1:
                        cr, ci = -ci, cr
                    elif rot == 2:
                        cr, ci = -cr, -ci
                    elif rot == 3:
                        cr, ci = ci, -cr
                    val = GaussianRational._make(cr, ci, fden)
                    key = (e, pw)
                    acc[key] = acc[key] + val if key in acc else val
                nxt: dict = {}
                for (ea, eb), (cr, ci) in level.items():
                    for i, j, lr, li in lam:
                        ai, bj = ea[i], eb[j]
                        if ai == 0 or bj == 0:
                            continue
                        m = ai * bj
                        key = (ea[:i] + (ai - 1,) + ea[i + 1:], eb[:j] + (bj - 1,) + eb[j + 1:])
                        wr = m * (cr * lr - ci * li)
                        wi = m * (cr * li + ci * lr)
                        old = nxt.get(key)
                        if old is None:
                            nxt[key] = (wr, wi)
                        else:
                            nxt[key] = (old[0] + wr, old[1] + wi)
                level = {k2: v for k2, v in nxt.items() if v[0] or v[1]}
                den *= L
                k += 1
    out: dict = {}
    for (e, pw), val in acc.items():
        if val:
            out.setdefault(e, {})[pw] = val
    return Polynomial._raw(f.n, {e: Coefficient._raw(c) for e, c in out.items() if c}, None)


def star_pow(f: Polynomial, k: int, ordering: OrderingKey) -> Polynomial:
    """``f * f * ... * f`` (``k`` factors, ``k >= 0``)."""
    out = Polynomial.const(1, f.n, f.hbar)
    for _ in range(k):
        out = star_mul(out, f, ordering)
    return out


def commutator(f: Polynomial, g: Polynomial, ordering: OrderingKey) -> Polynomial:
    """``f * g - g * f``; depends only on the skew part of ``Lambda``."""
    return star_mul(f, g, ordering) - star_mul(g, f, ordering)


def intertwine(f: Polynomial, source: OrderingKey, target: OrderingKey) -> Polynomial:
    """Translate an ordering expression from ``source`` to ``target``.

    Applies ``exp((i hbar / 4) sum (K'_ij - K_ij) d_i d_j)``, which is a
    finite sum on polynomials.

    Raises
    ------
    OrderingMismatchError
        If the skew parts differ.
    """
    if source.n != target.n or source.n != f.n:
        raise DimensionError("dimension mismatch between polynomial and ordering keys")
    if source.J != target.J:
        raise OrderingMismatchError("intertwiners only change the symmetric part K")
    exact = f.hbar is None
    dk = [
        (i, j, target.K[i][j] - source.K[i][j])
        for i in range(f.n)
        for j in range(f.n)
        if target.K[i][j] - source.K[i][j]
    ]
    if not exact:
        dk = [(i, j, complex(g)) for i, j, g in dk]
    out = dict(f._terms)
    level = dict(f._terms)
    k = 0
    while level and dk:
        k += 1
        nxt: dict = {}
        for e, c in level.items():
            for i, j, d in dk:
                if i == j:
                    if e[i] < 2:
                        continue
                    m = e[i] * (e[i] - 1)
                    e2 = e[:i] + (e[i] - 2,) + e[i + 1:]
                else:
                    if e[i] == 0 or e[j] == 0:
                        continue
                    m = e[i] * e[j]
                    l = list(e)
                    l[i] -= 1
                    l[j] -= 1
                    e2 = tuple(l)
                w = c * (d * m)
                nxt[e2] = nxt[e2] + w if e2 in nxt else w
        factor, shift = _series_factor(exact, f.hbar, k, 4)
        for e, c in nxt.items():
            term = _scale(c, factor, shift)
            out[e] = out[e] + term if e in out else term
        level = nxt
    return Polynomial._raw(f.n, out, f.hbar)


def _univariate_coeffs(f) -> list:
    if isinstance(f, Polynomial):
        if f.n != 1:
            raise DimensionError("bumping_apply expects a univariate polynomial")
        d = f.degree()
        return [f.coeff((k,)) for k in range(d + 1)]
    return list(f)


def bumping_apply(f, ordering: OrderingKey, hbar: complex | None = None) -> tuple:
    """Both sides of ``v * f(u*v) = f(v*u) * v`` in a W2 ordering.

    Parameters
    ----------
    f : Polynomial or sequence
        Univariate polynomial (``n == 1``) or its coefficient list
        ``[c0, c1, ...]``.
    ordering : OrderingKey
        A two-variable ordering key.

    Returns
    -------
    (lhs, rhs) : tuple of Polynomial
    """
    if ordering.n != 2:
        raise DimensionError("bumping identity is stated for two variables")
    if isinstance(f, Polynomial):
        hbar = f.hbar
    coeffs = _univariate_coeffs(f)
    u, v = w2_generators(hbar)
    uv = star_mul(u, v, ordering)
    vu = star_mul(v, u, ordering)

    def apply(x: Polynomial) -> Polynomial:
        acc = Polynomial(2, hbar=hbar)
        power = Polynomial.const(1, 2, hbar)
        for c in coeffs:
            acc = acc + power * c
            power = star_mul(power, x, ordering)
        return acc

    lhs = star_mul(v, apply(uv), ordering)
    rhs = star_mul(apply(vu), v, ordering)
    return lhs, rhs


def iter_monomials(n: int, max_degree: int) -> Iterable[tuple]:
    """All exponent tuples in ``n`` variables of total degree <= max_degree."""
    def rec(i, left):
        if i == n - 1:
            for k in range(left + 1):
                yield (k,)
            return
        for k in range(left + 1):
            for rest in rec(i + 1, left - k):
                yield (k,) + rest

    return sorted(rec(0, max_degree), key=_grlex_key)


def random_polynomial(rng: np.random.Generator, n: int, max_degree: int, n_terms: int = 4, coef_range: int = 3) -> Polynomial:
    """Exact polynomial with ``n_terms`` random monomials and small Gaussian-integer coefficients."""
    mons = iter_monomials(n, max_degree)
    idx = rng.choice(len(mons), size=min(n_terms, len(mons)), replace=False)
    terms = {}
    for i in sorted(int(j) for j in idx):
        re, im = (int(x) for x in rng.integers(-coef_range, coef_range + 1, size=2))
        if re or im:
            terms[mons[i]] = GaussianRational(re, im)
    return Polynomial(n, terms)


def random_ordering(rng: np.random.Generator, n: int, denom: int = 4) -> OrderingKey:
    """Random exact symmetric ``K`` with the standard skew part."""
    K = [[GaussianRational(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            re, im = (int(x) for x in rng.integers(-denom, denom + 1, size=2))
            K[i][j] = K[j][i] = GaussianRational(Fraction(re, denom), Fraction(im, denom))
    return OrderingKey(n, K, OrderingKey.standard_j(n))
