"""Vectorized products of polynomials with polynomial-prefactored Gaussians.

A Gaussian on the plane is ``R(u, v) exp(Q(u, v))`` with

    Q = (alpha u^2 + 2 beta u v + gamma v^2 + a u + b v) / (i hbar).

Prefactors ``R`` are dense coefficient arrays of shape ``(M, I, J)``: one
polynomial per quadrature node, ``R[m, i, j]`` multiplying ``u^i v^j``.
Derivatives of ``R e^Q`` act on the prefactor as ``D_j = d_j + d_j Q``,
which keeps every polynomial star product inside this class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GaussParams:
    """Per-node quadratic and linear coefficients of ``Q``."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    a: np.ndarray
    b: np.ndarray
    hbar: complex

    @classmethod
    def build(cls, alpha=0, beta=0, gamma=0, a=0, b=0, hbar=1.0, size=None) -> "GaussParams":
        arrs = [np.atleast_1d(np.asarray(x, dtype=complex)) for x in (alpha, beta, gamma, a, b)]
        m = size or max(x.shape[0] for x in arrs)
        arrs = [np.broadcast_to(x, (m,)).copy() for x in arrs]
        return cls(*arrs, hbar=complex(hbar))

    @property
    def size(self) -> int:
        return self.alpha.shape[0]

    def log_q(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``Q`` on nodes x points, shape ``(M, P)``."""
        ih = 1j * self.hbar
        u = u[None, :]
        v = v[None, :]
        al, be, ga, a, b = (x[:, None] for x in (self.alpha, self.beta, self.gamma, self.a, self.b))
        return (al * u * u + 2 * be * u * v + ga * v * v + a * u + b * v) / ih


def poly_terms(p) -> dict:
    """``{(i, j): complex}`` from a float two-variable Polynomial or dict."""
    if isinstance(p, dict):
        return {tuple(e): complex(c) for e, c in p.items()}
    return {tuple(e): complex(c) for e, c in p.terms.items()}


def terms_derivative(t: dict, alpha: tuple) -> dict:
    out = {}
    for (i, j), c in t.items():
        if i >= alpha[0] and j >= alpha[1]:
            out[(i - alpha[0], j - alpha[1])] = c * math.perm(i, alpha[0]) * math.perm(j, alpha[1])
    return out


def ones(m: int) -> np.ndarray:
    return np.ones((m, 1, 1), dtype=complex)


def pad_add(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape == B.shape:
        return A + B
    I = max(A.shape[1], B.shape[1])
    J = max(A.shape[2], B.shape[2])
    out = np.zeros((A.shape[0], I, J), dtype=complex)
    out[:, : A.shape[1], : A.shape[2]] += A
    out[:, : B.shape[1], : B.shape[2]] += B
    return out


def mul_terms(t: dict, R: np.ndarray) -> np.ndarray:
    """Commutative product of a sparse polynomial with dense prefactors."""
    if not t:
        return np.zeros((R.shape[0], 1, 1), dtype=complex)
    di = max(i for i, _ in t)
    dj = max(j for _, j in t)
    out = np.zeros((R.shape[0], R.shape[1] + di, R.shape[2] + dj), dtype=complex)
    for (i, j), c in t.items():
        out[:, i: i + R.shape[1], j: j + R.shape[2]] += c * R
    return out


def apply_d(R: np.ndarray, var: int, gp: GaussParams) -> np.ndarray:
    """``D_var`` acting on prefactors: derivative plus ``d_var Q`` times ``R``."""
    M, I, J = R.shape
    out = np.zeros((M, I + 1, J + 1), dtype=complex)
    ih = 1j * gp.hbar
    if var == 0:
        if I > 1:
            out[:, : I - 1, :J] += R[:, 1:, :] * np.arange(1, I)[None, :, None]
        cu, cv, c0 = 2 * gp.alpha / ih, 2 * gp.beta / ih, gp.a / ih
    else:
        if J > 1:
            out[:, :I, : J - 1] += R[:, :, 1:] * np.arange(1, J)[None, None, :]
        cu, cv, c0 = 2 * gp.beta / ih, 2 * gp.gamma / ih, gp.b / ih
    out[:, 1: I + 1, :J] += cu[:, None, None] * R
    out[:, :I, 1: J + 1] += cv[:, None, None] * R
    out[:, :I, :J] += c0[:, None, None] * R
    return out


def _star(t: dict, R: np.ndarray, gp: GaussParams, lam: np.ndarray, left: bool) -> np.ndarray:
    hbar = gp.hbar
    result = mul_terms(t, R)
    level = {(0, 0): R}
    k = 0
    while level:
        k += 1
        nxt: dict = {}
        for alpha, Ra in level.items():
            for i in range(2):
                for j in range(2):
                    lij = lam[i, j]
                    if lij == 0:
                        continue
                    # left: p carries index i, Gaussian carries j; right: swapped
                    pi, gj = (i, j) if left else (j, i)
                    a2 = (alpha[0] + (pi == 0), alpha[1] + (pi == 1))
                    if not terms_derivative(t, a2):
                        continue
                    term = lij * apply_d(Ra, gj, gp)
                    nxt[a2] = pad_add(nxt[a2], term) if a2 in nxt else term
        fac = (0.5j * hbar) ** k / math.factorial(k)
        for a2, Ra in nxt.items():
            result = pad_add(result, fac * mul_terms(terms_derivative(t, a2), Ra))
        level = nxt
    return result


def star_left(t: dict, R: np.ndarray, gp: GaussParams, lam: np.ndarray) -> np.ndarray:
    """Prefactor of ``p * (R e^Q)`` for polynomial ``p`` with terms ``t``."""
    return _star(t, R, gp, lam, left=True)


def star_right(R: np.ndarray, t: dict, gp: GaussParams, lam: np.ndarray) -> np.ndarray:
    """Prefactor of ``(R e^Q) * p``."""
    return _star(t, R, gp, lam, left=False)


def dense_eval(R: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Evaluate prefactors on points, shape ``(M, P)``."""
    I, J = R.shape[1], R.shape[2]
    U = u[:, None] ** np.arange(I)[None, :]
    V = v[:, None] ** np.arange(J)[None, :]
    return np.einsum("mij,pi,pj->mp", R, U, V)


def dense_to_terms(R2: np.ndarray, tol: float = 0.0) -> dict:
    out = {}
    for i in range(R2.shape[0]):
        for j in range(R2.shape[1]):
            c = complex(R2[i, j])
            if abs(c) > tol:
                out[(i, j)] = c
    return out


def safe_exp(x: np.ndarray) -> np.ndarray:
    """``exp`` that maps very negative or non-finite real parts to zero."""
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(x)
    ok = np.isfinite(x) & (x.real > -745.0)
    out[ok] = np.exp(x[ok])
    return out
