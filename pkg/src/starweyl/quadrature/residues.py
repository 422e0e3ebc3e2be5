"""Contour residues of ``e_*^{zeta (z + 2uv/(i hbar))}`` and the Laguerre solutions."""
from __future__ import annotations

import cmath
import math

import numpy as np

from ..closed_forms import kappa_tau_of, singular_locus
from ..errors import ConvergenceError
from ..weyl_poly import OrderingKey, Polynomial
from .evaluator import IntegralTerm, StarFunctionEvaluator
from .rules import ContourSpec, QuadratureSpec

__all__ = ["residue_at", "residue_profile", "laguerre_series", "laguerre_psi", "CONTOUR_CLEARANCE"]

CONTOUR_CLEARANCE = 1e-9


def residue_at(
    k: int,
    ordering: OrderingKey | None = None,
    spec: QuadratureSpec | None = None,
    hbar: complex = 1.0,
    z: complex = 0.0,
    radius: float = math.pi / 4,
) -> StarFunctionEvaluator:
    """``(1/2 pi i) oint e^{zeta z} e_*^{zeta 2uv/(i hbar)} d zeta`` around ``i pi (k + 1/2)``.

    In the Weyl ordering the integrand is ``e^{zeta z} sech(zeta)
    exp(tanh(zeta) 2uv/(i hbar))``.

    Raises
    ------
    ContourTooCloseError
        If the circle passes within ``CONTOUR_CLEARANCE`` of a singular point.
    """
    ordering = ordering or OrderingKey.weyl()
    kappa, _ = kappa_tau_of(ordering)
    h = complex(hbar)
    center = 1j * math.pi * (k + 0.5)
    contour = ContourSpec.circle(center, radius)
    loc = singular_locus(kappa)
    if not loc.empty:
        span = int(abs(k)) + 3
        contour.check_clear(loc.points(-span, span), CONTOUR_CLEARANCE)
    zz = complex(z)

    def log_w(t, tail):
        return zz * t

    one = Polynomial.const(1, 2, h)
    term = IntegralTerm(log_w, contour, one, one, coef=1 / (2j * math.pi), scale=2.0, label=f"residue{k}")
    return StarFunctionEvaluator(ordering, [term], [], spec or QuadratureSpec(), h, f"residue_at({k}, z={zz})")


def residue_profile(evaluator: StarFunctionEvaluator, w) -> np.ndarray:
    """Values of a residue evaluator as a function of ``w = 2uv/hbar`` (taking ``v = 1``)."""
    w = np.asarray(w, dtype=complex)
    return evaluator.evaluate(w * evaluator.hbar / 2, np.ones_like(w))


def laguerre_series(nu: complex, x, max_terms: int = 4000) -> np.ndarray:
    """``L_nu(x) = sum_n (-nu)_n x^n / (n!)^2`` for array ``x``.

    Raises
    ------
    ConvergenceError
        If the terms have not fallen below rounding level after ``max_terms``.
    """
    x = np.asarray(x, dtype=complex)
    nu = complex(nu)
    term = np.ones_like(x)
    total = np.ones_like(x)
    quiet = 0
    for n in range(max_terms):
        term = term * (n - nu) * x / (n + 1) ** 2
        total = total + term
        small = np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300))
        if n > np.max(np.abs(x)) and (small or np.all(term == 0)):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise ConvergenceError(f"Laguerre series did not converge in {max_terms} terms")


def laguerre_psi(z: complex, w, form: str = "primary"):
    """``Psi_z(w) = e^{-iw} L_{(z-1)/2}(2iw)``, or the equal ``e^{iw} L_{-(z+1)/2}(-2iw)``.

    Parameters
    ----------
    form : {"primary", "dual"}
    """
    z = complex(z)
    w_arr = np.asarray(w, dtype=complex)
    if form == "primary":
        out = np.exp(-1j * w_arr) * laguerre_series((z - 1) / 2, 2j * w_arr)
    elif form == "dual":
        out = np.exp(1j * w_arr) * laguerre_series(-(z + 1) / 2, -2j * w_arr)
    else:
        raise ValueError("form must be 'primary' or 'dual'")
    return complex(out) if out.ndim == 0 else out
