"""Named verification suites: each check reports a residual against a tolerance."""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import closed_forms as cf
from . import fock_oracle as fo
from .errors import ConvergenceWarning, DivergesError
from .quadrature import (
    QuadratureSpec,
    associativity_failure,
    continue_inverse,
    default_grid,
    hankel_loop,
    inverse_minus,
    inverse_plus,
    laguerre_psi,
    left_right_inverses,
    product_gamma,
    product_sin,
    reciprocal_gamma,
    residue_at,
    residue_profile,
    star_beta,
    star_delta,
    star_gamma,
)
from .weyl_poly import (
    OrderingKey,
    Polynomial,
    bumping_apply,
    intertwine,
    random_ordering,
    random_polynomial,
    star_mul,
    w2_generators,
)

__all__ = ["Check", "SuiteContext", "SUITES", "run_suite", "bessel_j0"]


@dataclass
class Check:
    id: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool
    runtime: float = 0.0
    detail: dict = field(default_factory=dict)

    def to_json(self, timing: bool = False) -> dict:
        d = {
            "id": self.id,
            "anchor": self.anchor,
            "residual": _num(self.residual),
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
        }
        if self.detail:
            d["detail"] = {k: _num(v) for k, v in sorted(self.detail.items())}
        if timing:
            d["runtime"] = round(self.runtime, 3)
        return d


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


@dataclass(frozen=True)
class SuiteContext:
    hbar: complex = 1.0
    ordering: OrderingKey | None = None
    spec: QuadratureSpec = QuadratureSpec()
    points: tuple = None
    seed: int = 0

    def grid(self):
        return self.points if self.points is not None else default_grid()

    def orderings(self, defaults):
        return [self.ordering] if self.ordering is not None else list(defaults)

    def rng(self, stream: int) -> np.random.Generator:
        # counter-based generator; independent stream per suite
        return np.random.Generator(np.random.Philox(key=[self.seed, stream]))


def bessel_j0(x) -> np.ndarray:
    """``J_0`` by its power series (adequate for ``|x| < 20``)."""
    x = np.asarray(x, dtype=complex)
    q = -(x * x) / 4
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * q / (k * k)
        total = total + term
    return total


def _timed(fn: Callable[[], tuple], id_: str, anchor: str, tol: float) -> Check:
    t0 = time.perf_counter()
    out = fn()
    residual, detail = out if isinstance(out, tuple) else (out, {})
    ok = bool(np.isfinite(residual)) and residual <= tol
    return Check(id_, anchor, float(residual), tol, ok, time.perf_counter() - t0, detail)


def _label(O: OrderingKey) -> str:
    return f"kappa={complex(O.kappa)}"


KAPPA_I2 = OrderingKey.kappa_tau(0.5j)
KAPPA_RG = OrderingKey.kappa_tau(-0.5 + 0.5j)
WEYL = OrderingKey.weyl()
NORMAL = OrderingKey.normal()


# ---------------------------------------------------------------- exact algebra

def suite_associativity(ctx: SuiteContext, n_triples: int = 200) -> list:
    rng = ctx.rng(1)

    def run():
        bad = 0
        for _ in range(n_triples):
            n = int(rng.integers(2, 5))
            O = random_ordering(rng, n)
            f, g, h = (random_polynomial(rng, n, 6) for _ in range(3))
            if star_mul(star_mul(f, g, O), h, O) != star_mul(f, star_mul(g, h, O), O):
                bad += 1
        return float(bad), {"passed": n_triples - bad, "total": n_triples}

    return [_timed(run, "associativity.exact", "associativity of the star product", 0.0)]


def suite_intertwiner(ctx: SuiteContext, n_pairs: int = 50) -> list:
    rng = ctx.rng(2)

    def run():
        bad = 0
        for _ in range(n_pairs):
            n = int(rng.integers(2, 5))
            A = random_ordering(rng, n)
            B = A.with_k(random_ordering(rng, n).K)
            f, g = (random_polynomial(rng, n, 5) for _ in range(2))
            lhs = intertwine(star_mul(f, g, A), A, B)
            rhs = star_mul(intertwine(f, A, B), intertwine(g, A, B), B)
            back = intertwine(intertwine(f, A, B), B, A)
            bad += (lhs != rhs) + (back != f)
        return float(bad), {"total": n_pairs}

    def bump():
        bad = 0
        for k in ("0", "1", "1/2", "1/3+1/2j"):
            O = OrderingKey.kappa_tau(k if "j" not in k else complex(1 / 3, 0.5))
            lhs, rhs = bumping_apply([1, -2, 3, 1], O)
            bad += lhs != rhs
        return float(bad)

    return [
        _timed(run, "intertwiner.homomorphism", "intertwiners are algebra isomorphisms", 0.0),
        _timed(bump, "bumping.exact", "bumping identity v*f(u*v) = f(v*u)*v", 0.0),
    ]


# ---------------------------------------------------------------- closed forms

def suite_exp(ctx: SuiteContext, ts=(-0.1, -0.05, 0.05, 0.1)) -> list:
    pts = ctx.grid()
    h = ctx.hbar
    checks = []
    for O in ctx.orderings([WEYL, NORMAL, KAPPA_I2]):

        def series():
            worst = 0.0
            for t in ts:
                a = cf.star_exp_quadratic(t, O, h).evaluate(*pts)
                b = cf.exp_series(t, O, 12, h).evaluate(*pts)
                worst = max(worst, float(np.max(np.abs(a - b))))
            return worst

        def group():
            a = cf.exp_group_mul(cf.star_exp_quadratic(0.3, O, h), cf.star_exp_quadratic(-0.7 + 0.2j, O, h))
            b = cf.star_exp_quadratic(-0.4 + 0.2j, O, h)
            return float(np.max(np.abs(a.evaluate(*pts) - b.evaluate(*pts))))

        def inter():
            E = cf.star_exp_quadratic(0.4, O, h)
            target = O.with_k([[0, 0.25], [0.25, 0]])
            a = cf.intertwine_exp(E, target).evaluate(*pts)
            b = cf.star_exp_quadratic(0.4, target, h).evaluate(*pts)
            return float(np.max(np.abs(a - b)))

        checks += [
            _timed(series, f"exp.series[{_label(O)}]", "star exponential solves its evolution equation", 1e-8),
            _timed(group, f"exp.group[{_label(O)}]", "exponential law e^{sH} * e^{tH} = e^{(s+t)H}", 1e-10),
            _timed(inter, f"exp.intertwine[{_label(O)}]", "intertwiner maps star exponentials", 1e-10),
        ]
    return checks


def suite_vacuum(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h = ctx.hbar
    checks = []
    for O in ctx.orderings([WEYL, KAPPA_I2]):
        u, v = w2_generators(h)
        vac = cf.vacuum(O, h)

        def kill():
            a = cf.poly_star_exp(v, vac, "left").evaluate(*pts)
            b = cf.poly_star_exp(u, vac, "right").evaluate(*pts)
            return float(max(np.max(np.abs(a)), np.max(np.abs(b))))

        def eigen():
            E = cf.exp_group_mul(cf.star_exp_quadratic(0.35, O, h), vac)
            return float(np.max(np.abs(E.evaluate(*pts) - math.exp(0.35) * vac.evaluate(*pts))))

        def idem():
            return float(np.max(np.abs(cf.exp_group_mul(vac, vac).evaluate(*pts) - vac.evaluate(*pts))))

        def two_defs():
            return cf.vacuum_two_definitions(0.3, O, h)["max_diff"]

        def anti():
            try:
                cf.exp_group_mul(vac, cf.antivacuum(O, h))
            except DivergesError:
                return 0.0
            return 1.0

        checks += [
            _timed(kill, f"vacuum.annihilated[{_label(O)}]", "v * vacuum = 0 = vacuum * u", 1e-10),
            _timed(eigen, f"vacuum.eigen[{_label(O)}]", "e_*^{s 2uv/(i hbar)} * vacuum = e^s vacuum", 1e-10),
            _timed(idem, f"vacuum.idempotent[{_label(O)}]", "vacuum * vacuum = vacuum", 1e-10),
            _timed(two_defs, f"vacuum.two_definitions[{_label(O)}]", "limit and series definitions of the vacuum agree", 1e-8),
            _timed(anti, f"vacuum.antivacuum_diverges[{_label(O)}]", "vacuum * antivacuum diverges", 0.0),
        ]
    return checks


def suite_sin(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h = ctx.hbar
    checks = []
    for O in ctx.orderings([OrderingKey.kappa_tau(0.5), KAPPA_RG]):

        def sin0():
            return float(max(np.max(np.abs(cf.star_sin(z, O, h).evaluate(*pts))) for z in (0.5, 1.5, -0.5, 2.5)))

        checks.append(_timed(sin0, f"sin.half_integer[{_label(O)}]", "sin_* pi(z + X) vanishes at half-integers", 1e-8))
    for O in ctx.orderings([KAPPA_RG]):

        def rg():
            return float(max(np.max(np.abs(reciprocal_gamma(z, O, ctx.spec, h).evaluate(*pts))) for z in (0.5, 1.5, 2.5)))

        checks.append(_timed(rg, f"reciprocal_gamma.zeros[{_label(O)}]", "1/Gamma_*(1/2 - z - X) vanishes at half-integers", 1e-8))
    return checks


def suite_theta(ctx: SuiteContext) -> list:
    h = ctx.hbar
    O = OrderingKey(2, [[0, 0], [0, -0.5j]], OrderingKey.standard_j(2))
    us = np.array([0.1, 0.3 + 0.2j, -0.4, 0.2j, 0.5 - 0.1j])
    vs = np.array([0.2, -0.1, 0.3j, 0.4 + 0.1j, -0.2])

    def conv():
        a = cf.theta_partial_sum(50, 1, O, h).evaluate(us, vs)
        b = cf.theta_partial_sum(80, 1, O, h).evaluate(us, vs)
        return float(np.max(np.abs(a - b)))

    def warn():
        bad = OrderingKey(2, [[0, 0], [0, 0.5j]], OrderingKey.standard_j(2))
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            cf.theta_partial_sum(5, 1, bad, h)
        return 0.0 if any(issubclass(x.category, ConvergenceWarning) for x in w) else 1.0

    return [
        _timed(conv, "theta.partial_sums", "theta partial sums converge for Im K^{kk} < 0", 1e-10),
        _timed(warn, "theta.divergence_warning", "theta partial sums diverge for Im K^{kk} > 0", 0.0),
    ]


# ---------------------------------------------------------------- quadrature

def suite_inverse(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h, spec = ctx.hbar, ctx.spec
    checks = []
    for O in ctx.orderings([WEYL, KAPPA_I2]):
        X = cf.x_polynomial(O, h)

        def resid():
            worst = 0.0
            for z in (1, 0.1, 2 + 1j):
                r = inverse_plus(z, O, spec, h).left_mul(X + complex(z)).evaluate(*pts)
                worst = max(worst, float(np.max(np.abs(r - 1))))
            r = inverse_minus(-1 + 0.5j, O, spec, h).left_mul(X + (-1 + 0.5j)).evaluate(*pts)
            return max(worst, float(np.max(np.abs(r - 1))))

        def defect():
            r = inverse_plus(-0.5, O, spec, h, truncate=True).left_mul(X - 0.5).evaluate(*pts)
            return float(np.max(np.abs(r - (1 - cf.vacuum(O, h).evaluate(*pts)))))

        def cont():
            worst = 0.0
            for z in (-1, -2.2, -0.3 + 0.2j):
                r = continue_inverse(z, O, spec, h).left_mul(X + complex(z)).evaluate(*pts)
                worst = max(worst, float(np.max(np.abs(r - 1))))
            return worst

        def sliding():
            u, v = w2_generators(h)
            vc, _ = left_right_inverses(O, spec, h)
            a = vc.left_mul(v).evaluate(*pts) - 1
            b = vc.right_mul(v).evaluate(*pts) - (1 - cf.vacuum(O, h).evaluate(*pts))
            return float(max(np.max(np.abs(a)), np.max(np.abs(b))))

        def assoc():
            af = associativity_failure(O, spec, h, pts)
            inner = max(af["left_inner_residual"], af["right_inner_residual"])
            detected = af["groupings_differ"] > 1e-3 and af["product_of_inverses_diverges"]
            return (inner if detected else float("inf")), {
                "groupings_differ": af["groupings_differ"],
                "product_diverges": af["product_of_inverses_diverges"],
            }

        checks += [
            _timed(resid, f"inverse.residual[{_label(O)}]", "(z + X) * (z + X)^{-1} = 1", 1e-6),
            _timed(defect, f"inverse.defect[{_label(O)}]", "(X - 1/2) * truncated inverse = 1 - vacuum", 1e-6),
            _timed(cont, f"inverse.continued[{_label(O)}]", "continued inverse across Re z < -1/2", 1e-6),
            _timed(sliding, f"inverse.one_sided[{_label(O)}]", "v * v° = 1, v° * v = 1 - vacuum", 1e-6),
            _timed(assoc, f"inverse.associativity_failure[{_label(O)}]", "two inverses break associativity", 1e-6),
        ]
    return checks


def suite_delta(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h, spec = ctx.hbar, ctx.spec
    checks = []
    O = WEYL

    def shape():
        d = star_delta(O, spec, h).evaluate(*pts)
        ratio = d / bessel_j0(2 * pts[0] * pts[1] / h)
        c0 = complex(star_delta(O, spec, h).evaluate(0, 0))
        return float(np.var(ratio)), {"constant": c0, "expected": 2 * math.pi, "constant_error": abs(c0 - 2 * math.pi)}

    def shift():
        worst = 0.0
        for Ok in ctx.orderings([WEYL, KAPPA_I2]):
            a = star_delta(Ok, spec, h).evaluate(*pts)
            b = star_delta(Ok, spec, h, shift=0.3j).evaluate(*pts)
            worst = max(worst, float(np.max(np.abs(a - b))))
        return worst

    def difference():
        worst = 0.0
        for Ok in ctx.orderings([WEYL, KAPPA_I2]):
            a = inverse_plus(0.0, Ok, spec, h).evaluate(*pts) - inverse_minus(0.0, Ok, spec, h).evaluate(*pts)
            b = star_delta(Ok, spec, h).evaluate(*pts)
            worst = max(worst, float(np.max(np.abs(a - b))))
        return worst

    checks += [
        _timed(shape, "delta.bessel_shape", "delta_* proportional to J_0(2uv/hbar)", 1e-6),
        _timed(shift, "delta.contour_shift", "delta_* independent of the integration line", 1e-8),
        _timed(difference, "delta.inverse_difference", "delta_* is the difference of the two inverses", 1e-8),
    ]
    return checks


def suite_gamma(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h, spec = ctx.hbar, ctx.spec
    checks = []
    for O in ctx.orderings([WEYL, KAPPA_I2]):
        X = cf.x_polynomial(O, h)

        def func():
            worst = 0.0
            for z in (1.0, 0.3 + 0.5j, -1.0):
                a = star_gamma(z + 1, O, spec, h).evaluate(*pts)
                b = star_gamma(z, O, spec, h).left_mul(X + z).evaluate(*pts)
                worst = max(worst, float(np.max(np.abs(a - b))))
            return worst

        def funcrel():
            z, y = 0.7, 1.5
            a = star_beta(z, y, O, spec, h).evaluate(*pts)
            b = star_beta(z, y + 1, O, spec, h).left_mul((X + (z + y)) * (1 / y)).evaluate(*pts)
            return float(np.max(np.abs(a - b)))

        def betgmm():
            z, y = 0.7, 1.5
            b = star_beta(z, y, O, spec, h)
            lhs = star_gamma(z, O, spec, h).evaluate(*pts) * math.gamma(y)
            rhs = star_gamma(y + z, O, spec, h).star(b).evaluate(*pts)
            return float(np.max(np.abs(lhs - rhs)))

        def pairing():
            worst = 0.0
            for z in (1.5, 2.2):
                p = fo.vacuum_pairing(star_gamma(z, O, spec, h))["value"]
                m = fo.vacuum_pairing(star_gamma(z, O, spec, h, sign=-1))["value"]
                worst = max(worst, abs(p - math.gamma(z + 0.5)), abs(m - math.gamma(z - 0.5)))
            b = fo.vacuum_pairing(star_beta(0.7, 1.0, O, spec, h))["value"]
            return max(worst, abs(b - 1 / 1.2))

        checks += [
            _timed(func, f"gamma.functional[{_label(O)}]", "Gamma_*(z + 1 + X) = (z + X) * Gamma_*(z + X)", 1e-6),
            _timed(funcrel, f"beta.functional[{_label(O)}]", "B_*(z + X, y) = (z + y + X)/y * B_*(z + X, y + 1)", 1e-6),
            _timed(betgmm, f"beta.gamma_relation[{_label(O)}]", "Gamma_*(z + X) Gamma(y) = Gamma_*(z + y + X) * B_*(z + X, y)", 1e-5),
            _timed(pairing, f"gamma.vacuum_pairing[{_label(O)}]", "vacuum pairing of Gamma_*(z +- X) is Gamma(z +- 1/2)", 1e-6),
        ]
    return checks


def suite_products(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h, spec = ctx.hbar, ctx.spec

    def sin_product():
        O = ctx.ordering if ctx.ordering is not None else NORMAL
        exact = cf.star_sin(0.3, O, h).evaluate(*pts)
        approx = product_sin(0.3, 500, O, h).evaluate(*pts)
        return float(np.max(np.abs(approx - exact))), {"N": 500}

    def gamma_product():
        O = ctx.ordering if ctx.ordering is not None else KAPPA_RG
        a = product_gamma(1.0, 2000, O, spec, h).evaluate(*pts)
        b = star_gamma(1.0, O, spec, h).evaluate(*pts)
        return float(np.max(np.abs(a - b))), {"N": 2000}

    return [
        _timed(sin_product, "products.sin", "product formula for sin_* pi(z + X)", 1e-4),
        _timed(gamma_product, "products.gamma", "product formula for Gamma_*(z + X)", 1e-3),
    ]


def suite_residue(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h, spec = ctx.hbar, ctx.spec

    def shape():
        r0 = residue_at(0, WEYL, spec, h).evaluate(*pts)
        ratio = r0 / bessel_j0(2 * pts[0] * pts[1] / h)
        return float(np.var(ratio)), {"constant": complex(np.mean(ratio))}

    def alternation():
        r0 = residue_at(0, WEYL, spec, h).evaluate(*pts)
        worst = 0.0
        for k in (1, 2):
            rk = residue_at(k, WEYL, spec, h).evaluate(*pts)
            worst = max(worst, float(np.max(np.abs(rk - (-1) ** k * r0))))
        return worst

    def ode():
        w = np.linspace(0.2, 3.0, 8)
        hh = 1e-2
        worst = 0.0
        for z in (0.0, 0.7, 1 + 0.5j):
            f = lambda x: laguerre_psi(z, x)  # noqa: E731
            f0 = f(w)
            d1 = (-f(w + 2 * hh) + 8 * f(w + hh) - 8 * f(w - hh) + f(w - 2 * hh)) / (12 * hh)
            d2 = (-f(w + 2 * hh) + 16 * f(w + hh) - 30 * f0 + 16 * f(w - hh) - f(w - 2 * hh)) / (12 * hh * hh)
            worst = max(worst, float(np.max(np.abs((1j * z + w) * f0 + d1 + w * d2))))
        return worst

    def dual():
        w = np.linspace(-3, 3, 13)
        return float(max(np.max(np.abs(laguerre_psi(z, w) - laguerre_psi(z, w, "dual"))) for z in (0.0, 0.7, 1 + 0.5j)))

    def profile():
        w = np.linspace(0.2, 3.0, 8)
        worst = 0.0
        for z in (0.0, 0.7):
            r = residue_profile(residue_at(0, WEYL, spec, h, z=z), w) / laguerre_psi(z, w)
            worst = max(worst, float(np.max(np.abs(r - r[0]))))
        return worst

    return [
        _timed(shape, "residue.bessel_shape", "residue at i pi/2 proportional to J_0", 1e-6),
        _timed(alternation, "residue.alternation", "residues alternate with (-1)^k", 1e-8),
        _timed(ode, "laguerre.ode", "(iz + w) f + f' + w f'' = 0", 1e-6),
        _timed(dual, "laguerre.dual", "two Laguerre expressions of Psi_z agree", 1e-10),
        _timed(profile, "residue.laguerre_profile", "residue profile proportional to Psi_z", 1e-6),
    ]


def suite_hankel(ctx: SuiteContext) -> list:
    pts = ctx.grid()
    h, spec = ctx.hbar, ctx.spec
    O = ctx.ordering if ctx.ordering is not None else KAPPA_RG

    def decay():
        a = float(np.max(np.abs(hankel_loop(-10, O, spec, h).evaluate(*pts))))
        b = float(np.max(np.abs(hankel_loop(-20, O, spec, h).evaluate(*pts))))
        orders = math.log10(a / b) if b > 0 else float("inf")
        # residual: shortfall below four orders of magnitude
        return max(0.0, 4.0 - orders), {"sup_tau_-10": a, "sup_tau_-20": b, "orders": orders}

    return [_timed(decay, "hankel.decay", "Hankel loop contribution vanishes as tau -> -inf", 0.0)]


# ---------------------------------------------------------------- Fock oracle

def suite_fock(ctx: SuiteContext, N: int = fo.DEFAULT_N) -> list:
    h = ctx.hbar

    def elements():
        worst = 0.0
        for p in range(9):
            for q in range(9):
                r = fo.matrix_element_check(p, q, N, h)
                scale = max(1.0, abs(r["expected"]))
                worst = max(worst, abs(r["fock"] - r["expected"]) / scale, abs(r["star"] - r["expected"]) / scale)
        return worst

    def defects():
        bad = 0
        for n in range(6):
            D = fo.defect_matrix(n, N, h)
            expect = np.eye(D.valid + 1)
            expect[n, n] = 0
            bad += D.rank() != D.valid or not np.allclose(D.band, expect, atol=1e-12)
        return float(bad)

    def commutation():
        return max(fo.operator_dict(N, h).check().values())

    def bumping():
        lhs, rhs = bumping_apply([1, 2, -1, 0.5], NORMAL, h)
        a = fo.represent(lhs, N, hbar=h)
        b = fo.represent(rhs, N, hbar=h)
        u, v = w2_generators(h)
        # direct matrix product v * f(u v) on the valid band
        U, V = fo.represent(u, N, hbar=h).matrix, fo.represent(v, N, hbar=h).matrix
        P = U @ V
        F = np.eye(N + 1) + 2 * P - P @ P + 0.5 * P @ P @ P
        direct = V @ F
        n = min(a.valid, b.valid) - 4
        return float(max(np.max(np.abs(a.band[:n, :n] - b.band[:n, :n])), np.max(np.abs(a.matrix[:n, :n] - direct[:n, :n]))))

    return [
        _timed(elements, "fock.matrix_elements", "vacuum matrix elements delta_pq p! (i hbar)^p", 1e-10),
        _timed(defects, "fock.defect_rank", "defect projections have rank defect one", 0.0),
        _timed(commutation, "fock.commutator", "[pi(u), pi(v)] = -i hbar on the valid band", 1e-12),
        _timed(bumping, "fock.bumping", "bumping identity as a matrix identity", 1e-10),
    ]


SUITES: dict = {
    "associativity": suite_associativity,
    "intertwiner": suite_intertwiner,
    "exp": suite_exp,
    "vacuum": suite_vacuum,
    "sin": suite_sin,
    "theta": suite_theta,
    "inverse": suite_inverse,
    "delta": suite_delta,
    "gamma": suite_gamma,
    "products": suite_products,
    "residue": suite_residue,
    "hankel": suite_hankel,
    "fock": suite_fock,
}


def run_suite(name: str, ctx: SuiteContext | None = None, threads: int = 1) -> list:
    """Run one suite (or ``"all"``); checks come back sorted by id."""
    ctx = ctx or SuiteContext()
    names = sorted(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {sorted(SUITES)} or 'all'")
    if threads > 1 and len(names) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda n: SUITES[n](ctx), names))
    else:
        results = [SUITES[n](ctx) for n in names]
    checks = [c for r in results for c in r]
    return sorted(checks, key=lambda c: c.id)
