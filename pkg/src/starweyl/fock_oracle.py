"""Truncated Fock-space matrices used to cross-check star identities.

Basis vectors ``e_n = (a^dagger)^n e_0`` are left unnormalized, and

    pi(u) = a^dagger,    pi(v) = i hbar a,

so ``pi(u) e_n = e_{n+1}`` and ``pi(v) e_n = i hbar n e_{n-1}``.  A
polynomial in the normal ordering (``u`` to the left of ``v``) maps to
``sum c_ab pi(u)^a pi(v)^b``; the vacuum maps to the projector onto
``e_0``.  No square roots of ``i hbar`` appear, so complex ``hbar`` is fine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError
from .weyl_poly import OrderingKey, Polynomial, intertwine, star_mul, w2_generators

__all__ = [
    "FockMatrix",
    "OperatorDict",
    "operator_dict",
    "represent",
    "represent_vacuum_term",
    "matrix_element_check",
    "defect_matrix",
    "vacuum_pairing",
    "x_eigenvalue_on_vacuum",
    "DEFAULT_N",
]

DEFAULT_N = 24


@dataclass(frozen=True)
class FockMatrix:
    """Matrix on ``e_0 .. e_N``; entries with column index above ``valid`` may be truncated."""

    matrix: np.ndarray
    N: int
    valid: int

    def __post_init__(self):
        if self.matrix.shape != (self.N + 1, self.N + 1):
            raise ValueError("matrix shape does not match the truncation level")

    @property
    def band(self) -> np.ndarray:
        """The block ``[0..valid] x [0..valid]`` free of truncation artifacts."""
        return self.matrix[: self.valid + 1, : self.valid + 1]

    def __matmul__(self, other: "FockMatrix") -> "FockMatrix":
        if other.N != self.N:
            raise ValueError("truncation levels differ")
        return FockMatrix(self.matrix @ other.matrix, self.N, min(self.valid, other.valid))

    def __add__(self, other: "FockMatrix") -> "FockMatrix":
        return FockMatrix(self.matrix + other.matrix, self.N, min(self.valid, other.valid))

    def __sub__(self, other: "FockMatrix") -> "FockMatrix":
        return FockMatrix(self.matrix - other.matrix, self.N, min(self.valid, other.valid))

    def scale(self, c: complex) -> "FockMatrix":
        return FockMatrix(self.matrix * complex(c), self.N, self.valid)

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.linalg.matrix_rank(self.band, tol=tol))

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "valid": self.valid,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FockMatrix":
        m = np.asarray(data["re"], float) + 1j * np.asarray(data["im"], float)
        return cls(m, int(data["N"]), int(data["valid"]))


@dataclass(frozen=True)
class OperatorDict:
    """``pi(u)`` and ``pi(v)`` at truncation ``N``."""

    pi_u: np.ndarray
    pi_v: np.ndarray
    hbar: complex
    N: int

    def check(self) -> dict:
        """Residuals of ``pi(v) e_0 = 0``, ``e_0^T pi(u) = 0`` and the commutator on the valid band."""
        comm = self.pi_u @ self.pi_v - self.pi_v @ self.pi_u
        n = self.N  # last column loses its image under pi(u)
        target = -1j * self.hbar * np.eye(n)
        return {
            "vacuum_annihilated": float(np.abs(self.pi_v[:, 0]).max()),
            "dual_vacuum_annihilated": float(np.abs(self.pi_u[0, :]).max()),
            "commutator": float(np.abs(comm[:n, :n] - target).max()),
        }


def operator_dict(N: int = DEFAULT_N, hbar: complex = 1.0) -> OperatorDict:
    h = complex(hbar)
    up = np.diag(np.ones(N, dtype=complex), -1)
    down = np.diag(np.arange(1, N + 1, dtype=complex), 1)
    return OperatorDict(up, 1j * h * down, h, N)


def _normal_terms(p: Polynomial, ordering: OrderingKey | None, hbar: complex) -> Polynomial:
    if ordering is not None and ordering != OrderingKey.normal():
        p = intertwine(p, ordering, OrderingKey.normal())
    return p.to_float(hbar) if p.hbar is None else p


def represent(p: Polynomial, N: int = DEFAULT_N, ordering: OrderingKey | None = None, hbar: complex = 1.0) -> FockMatrix:
    """Matrix of a polynomial given in ``ordering`` (default: already normal ordered).

    Raises
    ------
    TruncationError
        If the degree exceeds ``N``.
    """
    if p.n != 2:
        raise ValueError("the Fock representation is for two variables")
    q = _normal_terms(p, ordering, hbar)
    deg = max(q.degree(), 0)
    if deg > N:
        raise TruncationError(f"degree {deg} exceeds the truncation N = {N}")
    ops = operator_dict(N, q.hbar)
    M = np.zeros((N + 1, N + 1), dtype=complex)
    up_pows = [np.eye(N + 1, dtype=complex)]
    dn_pows = [np.eye(N + 1, dtype=complex)]
    for _ in range(deg):
        up_pows.append(up_pows[-1] @ ops.pi_u)
        dn_pows.append(dn_pows[-1] @ ops.pi_v)
    for (a, b), c in q.terms.items():
        M += c * (up_pows[a] @ dn_pows[b])
    # columns above N - deg may lose components pushed past e_N
    up_deg = max((a - b for (a, b) in q.terms), default=0)
    valid = N - max(up_deg, 0)
    return FockMatrix(M, N, valid)


def represent_vacuum_term(left: Polynomial, right: Polynomial, N: int = DEFAULT_N, ordering: OrderingKey | None = None, hbar: complex = 1.0) -> FockMatrix:
    """Matrix of ``left * vacuum * right``."""
    L = represent(left, N, ordering, hbar)
    R = represent(right, N, ordering, hbar)
    P = np.zeros((N + 1, N + 1), dtype=complex)
    P[0, 0] = 1
    return FockMatrix(L.matrix @ P @ R.matrix, N, min(L.valid, R.valid))


def matrix_element_check(p: int, q: int, N: int = DEFAULT_N, hbar: complex = 1.0) -> dict:
    """Vacuum coefficient of ``vacuum * v^q * u^p * vacuum`` two ways.

    ``fock`` uses matrix products; ``star`` reads the constant term of the
    exact normal-ordering expression of ``v^q * u^p`` (the only term the
    two vacuums keep); ``expected`` is ``delta_pq p! (i hbar)^p``.
    """
    if p > N - 2 or q > N - 2:
        raise TruncationError("need p, q <= N - 2")
    h = complex(hbar)
    ops = operator_dict(N, h)
    e0 = np.zeros(N + 1, dtype=complex)
    e0[0] = 1
    vec = np.linalg.matrix_power(ops.pi_v, q) @ np.linalg.matrix_power(ops.pi_u, p) @ e0
    fock = complex(vec[0])
    u, v = w2_generators()
    normal = OrderingKey.normal()
    word = star_mul(v ** q, u ** p, normal)
    star = complex(word.coeff((0, 0)).evaluate(h)) if not word.is_zero() else 0j
    expected = math.factorial(p) * (1j * h) ** p if p == q else 0j
    return {"p": p, "q": q, "fock": fock, "star": star, "expected": complex(expected)}


def defect_matrix(n: int, N: int = DEFAULT_N, hbar: complex = 1.0) -> FockMatrix:
    """Matrix of ``1 - u^n * vacuum * v^n / (n! (i hbar)^n)``."""
    h = complex(hbar)
    u, v = w2_generators(h)
    term = represent_vacuum_term(u ** n, v ** n, N, hbar=h)
    one = FockMatrix(np.eye(N + 1, dtype=complex), N, N)
    return one - term.scale(1 / (math.factorial(n) * (1j * h) ** n))


def x_eigenvalue_on_vacuum(N: int = DEFAULT_N, hbar: complex = 1.0) -> complex:
    """``<e_0, pi(X) e_0>`` with ``X`` the normal-ordering expression of ``uv/(i hbar)``."""
    h = complex(hbar)
    u, v = w2_generators()
    X = intertwine(u * v, OrderingKey.weyl(), OrderingKey.normal()).to_float(h) * (1 / (1j * h))
    return complex(represent(X, N, hbar=h).matrix[0, 0])


def vacuum_pairing(evaluator, N: int = DEFAULT_N) -> dict:
    """Scalar ``int w(t) lambda^t dt`` where ``pi(X) e_0 = lambda e_0``, for both signs.

    ``value`` uses the eigenvalue read off the Fock matrix of ``X``;
    ``candidates`` holds the integrals with ``e^{+t/2}`` and ``e^{-t/2}``
    (``None`` when divergent).
    """
    from .errors import DivergesError

    lam = x_eigenvalue_on_vacuum(N, evaluator.hbar)
    cands = {}
    for key, rate in (("+1/2", 0.5), ("-1/2", -0.5)):
        try:
            for t in evaluator.integrals:
                _check(t, rate)
            cands[key] = evaluator.scalar_reduction(rate)
        except DivergesError:
            cands[key] = None
    value = cands["+1/2"] if abs(lam - 0.5) < 1e-12 else evaluator.scalar_reduction(lam)
    return {"x_on_vacuum": lam, "value": value, "candidates": cands}


def _check(term, rate):
    from .quadrature.evaluator import _check_scalar_convergence

    _check_scalar_convergence(term, rate)
