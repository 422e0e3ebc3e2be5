"""Command-line driver: ``python -m starweyl <command> [options]``."""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import closed_forms as cf
from .errors import StarWeylError
from .quadrature import (
    QuadratureSpec,
    default_grid,
    inverse_minus,
    inverse_plus,
    residue_at,
    star_beta,
    star_delta,
    star_gamma,
)
from .verify import SUITES, SuiteContext, bessel_j0, run_suite
from .weyl_poly import HBAR, GaussianRational, OrderingKey, Polynomial, intertwine, star_mul

__all__ = ["main", "Config", "parse_polynomial", "parse_number", "load_config"]

# hypotheses reported alongside domain errors
HYPOTHESES = {
    "DomainError": "the ordering parameter kappa must lie off the real rays kappa >= 1 and kappa <= -1",
    "SingularPointError": "the star exponential is singular at the requested parameter",
    "PoleError": "the target ordering meets a pole of the intertwiner",
    "DivergesError": "the requested product or pairing has no convergent integral",
    "ContourTooCloseError": "the contour must stay clear of the singular points",
    "ConvergenceError": "the quadrature did not meet its tolerance",
    "TruncationError": "the degree exceeds the Fock truncation",
}

DEFAULTS = {
    "hbar": "1",
    "kappa": None,
    "tau": "0",
    "mode": "exact",
    "tol": None,
    "trunc": None,
    "nodes": None,
    "grid": "-1:1:5",
    "seed": "0",
    "out": None,
    "format": "json",
}


class ConfigError(ValueError):
    pass


def parse_number(s) -> complex:
    """Complex from ``"1.5"``, ``"0.5j"``, ``"1/2"`` or ``"re,im"``."""
    g = parse_exact(s)
    return complex(g)


def parse_exact(s) -> GaussianRational:
    """Exact value from ``"1/2"``, ``"0.5"``, ``"1/3,1/2"`` (re,im) or a complex literal."""
    s = str(s).strip()
    try:
        if "," in s:
            re, im = s.split(",", 1)
            return GaussianRational(Fraction(re.strip()), Fraction(im.strip()))
        try:
            return GaussianRational(Fraction(s))
        except ValueError:
            return GaussianRational.coerce(complex(s.replace(" ", "")))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {s!r}") from exc


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Pow, ast.Div)


def parse_polynomial(text: str, hbar: complex | None = None) -> Polynomial:
    """Polynomial in ``u``, ``v`` (and ``hbar``) from an arithmetic expression.

    >>> parse_polynomial("u*v - 2*v**2").degree()
    2
    """
    text = text.strip()
    if text.startswith("{"):
        return Polynomial.from_json(text)
    u = Polynomial.var(0, 2, hbar)
    v = Polynomial.var(1, 2, hbar)
    h = Polynomial.const(HBAR, 2) if hbar is None else Polynomial.const(hbar, 2, hbar)
    names = {"u": u, "v": v, "hbar": h}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value if hbar is not None or isinstance(node.value, int) else GaussianRational.coerce(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigError(f"unknown symbol {node.id!r} (use u, v, hbar)")
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            x = ev(node.operand)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return _lift(a, hbar) + _lift(b, hbar)
            if isinstance(node.op, ast.Sub):
                return _lift(a, hbar) - _lift(b, hbar)
            if isinstance(node.op, ast.Mult):
                if isinstance(a, Polynomial) or isinstance(b, Polynomial):
                    return _lift(a, hbar) * _lift(b, hbar) if isinstance(a, Polynomial) and isinstance(b, Polynomial) else (a * b if isinstance(a, Polynomial) else b * a)
                return a * b
            if isinstance(node.op, ast.Div):
                if isinstance(b, Polynomial):
                    raise ConfigError("division by a polynomial")
                return a * (1 / GaussianRational.coerce(b)) if hbar is None else a * (1 / complex(b))
            if isinstance(node.op, ast.Pow):
                if not isinstance(b, int) or b < 0:
                    raise ConfigError("exponents must be non-negative integers")
                return a ** b
        raise ConfigError(f"unsupported expression element: {ast.dump(node)}")

    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse polynomial {text!r}") from exc
    return _lift(ev(tree), hbar)


def _lift(x, hbar) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial.const(x, 2, hbar)


def load_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys match the long flag names."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


@dataclass(frozen=True)
class Config:
    hbar: complex
    kappa: GaussianRational | None
    tau: GaussianRational
    mode: str
    spec: QuadratureSpec
    grid_values: tuple
    seed: int
    out: str | None
    format: str

    @property
    def ordering(self) -> OrderingKey:
        return OrderingKey.kappa_tau(self.kappa if self.kappa is not None else 0, self.tau)

    @property
    def ordering_or_none(self) -> OrderingKey | None:
        if self.kappa is None and not self.tau:
            return None
        return self.ordering

    def grid(self):
        return default_grid(self.grid_values)

    def to_json(self) -> dict:
        return {
            "hbar": [self.hbar.real, self.hbar.imag],
            "kappa": None if self.kappa is None else [str(self.kappa.re), str(self.kappa.im)],
            "tau": [str(self.tau.re), str(self.tau.im)],
            "mode": self.mode,
            "quadrature": self.spec.to_json(),
            "grid": list(self.grid_values),
            "seed": self.seed,
        }


def build_config(ns: argparse.Namespace) -> Config:
    merged = dict(DEFAULTS)
    if getattr(ns, "config", None):
        merged.update(load_config(ns.config))
    for key in DEFAULTS:
        val = getattr(ns, key, None)
        if val is not None:
            merged[key] = val
    hbar = parse_number(merged["hbar"])
    if hbar == 0:
        raise ConfigError("hbar must be nonzero")
    kappa = parse_exact(merged["kappa"]) if merged["kappa"] is not None else None
    tau = parse_exact(merged["tau"])
    if merged["mode"] not in ("exact", "float"):
        raise ConfigError("mode must be 'exact' or 'float'")
    if merged["format"] not in ("json", "csv"):
        raise ConfigError("format must be 'json' or 'csv'")
    spec = QuadratureSpec()
    if merged["tol"] is not None:
        t = float(merged["tol"])
        spec = replace(spec, abs_tol=t, rel_tol=t)
    if merged["trunc"] is not None:
        spec = replace(spec, trunc=float(merged["trunc"]))
    if merged["nodes"] is not None:
        spec = replace(spec, nodes_per_unit=int(merged["nodes"]))
    try:
        lo, hi, n = merged["grid"].split(":")
        values = tuple(float(x) for x in np.linspace(float(lo), float(hi), int(n)))
    except ValueError as exc:
        raise ConfigError("grid must look like lo:hi:count") from exc
    return Config(hbar, kappa, tau, merged["mode"], spec, values, int(merged["seed"]), merged["out"], merged["format"])


def _require_kappa_domain(cfg: Config) -> None:
    k = complex(cfg.kappa) if cfg.kappa is not None else 0j
    if k.imag == 0 and abs(k.real) >= 1:
        raise ConfigError(f"kappa = {k.real:g} is excluded: {HYPOTHESES['DomainError']}")


# ---------------------------------------------------------------- output


def _c(x: complex) -> list:
    x = complex(x)
    return [float(x.real), float(x.imag)]


def grid_records(u, v, values, err=None, extra: dict | None = None) -> list:
    u, v, values = (np.asarray(a, dtype=complex).ravel() for a in (u, v, values))
    rows = []
    for i in range(u.size):
        r = {"u": _c(u[i]), "v": _c(v[i]), "value": _c(values[i])}
        if err is not None:
            r["err_est"] = float(np.ravel(err)[i])
        for k, arr in (extra or {}).items():
            r[k] = _c(np.ravel(arr)[i])
        rows.append(r)
    return rows


def _csv_rows(payload: dict) -> tuple:
    if "checks" in payload:
        header = ["id", "anchor", "residual", "tolerance", "passed"]
        return header, [[c[h] for h in header] for c in payload["checks"]]
    if "grid" in payload:
        rows = payload["grid"]
        keys = [k for k in rows[0] if k not in ("err_est",)] if rows else []
        header = []
        for k in keys:
            header += [f"{k}_re", f"{k}_im"]
        if rows and "err_est" in rows[0]:
            header.append("err_est")
        out = []
        for r in rows:
            line = []
            for k in keys:
                line += r[k]
            if "err_est" in r:
                line.append(r["err_est"])
            out.append(line)
        return header, out
    if "polynomial" in payload:
        header = ["exp", "hbar_pow", "re", "im"]
        return header, [[" ".join(map(str, t["exp"])), t["coeff"]["hbar_pow"], t["coeff"]["re"], t["coeff"]["im"]] for t in payload["polynomial"]["terms"]]
    raise ConfigError("this command has no CSV form")


def emit(payload: dict, cfg: Config, stream=None) -> None:
    if cfg.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        for key in sorted(payload.get("scalars", {})):
            buf.write(f"# {key}={json.dumps(payload['scalars'][key])}\n")
        header, rows = _csv_rows(payload)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


# ---------------------------------------------------------------- commands


def _poly_hbar(cfg: Config):
    return None if cfg.mode == "exact" else cfg.hbar


def cmd_mul(cfg: Config, ns) -> tuple:
    h = _poly_hbar(cfg)
    f = parse_polynomial(ns.f, h)
    g = parse_polynomial(ns.g, h)
    p = star_mul(f, g, cfg.ordering)
    return {"command": "mul", "config": cfg.to_json(), "polynomial": p.to_json(), "text": repr(p)}, True


def cmd_intertwine(cfg: Config, ns) -> tuple:
    h = _poly_hbar(cfg)
    f = parse_polynomial(ns.f, h)
    target = OrderingKey.kappa_tau(parse_exact(ns.to_kappa), parse_exact(ns.to_tau))
    p = intertwine(f, cfg.ordering, target)
    return {"command": "intertwine", "config": cfg.to_json(), "polynomial": p.to_json(), "text": repr(p)}, True


def cmd_exp(cfg: Config, ns) -> tuple:
    t = parse_number(ns.t)
    E = cf.star_exp_quadratic(t, cfg.ordering, cfg.hbar)
    u, v = cfg.grid()
    return {
        "command": "exp",
        "config": cfg.to_json(),
        "element": E.to_json(),
        "grid": grid_records(u, v, E.evaluate(u, v)),
    }, True


def _grid_eval(cfg: Config, ev, name: str, extra_payload: dict | None = None) -> tuple:
    u, v = cfg.grid()
    res = ev.evaluate(u, v, with_error=True)
    payload = {
        "command": name,
        "config": cfg.to_json(),
        "name": ev.name,
        "grid": grid_records(u, v, res.value, res.err_est),
    }
    payload.update(extra_payload or {})
    return payload, True


def cmd_inverse(cfg: Config, ns) -> tuple:
    _require_kappa_domain(cfg)
    z = parse_number(ns.z)
    fn = inverse_plus if ns.side == "plus" else inverse_minus
    return _grid_eval(cfg, fn(z, cfg.ordering, cfg.spec, cfg.hbar, sign=ns.sign), "inverse")


def cmd_gamma(cfg: Config, ns) -> tuple:
    _require_kappa_domain(cfg)
    ev = star_gamma(parse_number(ns.z), cfg.ordering, cfg.spec, cfg.hbar, sign=ns.sign)
    return _grid_eval(cfg, ev, "gamma")


def cmd_beta(cfg: Config, ns) -> tuple:
    _require_kappa_domain(cfg)
    ev = star_beta(parse_number(ns.z), parse_number(ns.y), cfg.ordering, cfg.spec, cfg.hbar, sign=ns.sign)
    return _grid_eval(cfg, ev, "beta")


def _j0_fit(values, u, v, hbar) -> tuple:
    j0 = bessel_j0(2 * u * v / hbar)
    ratio = np.asarray(values) / j0
    return complex(np.mean(ratio)), float(np.var(ratio)), ratio


def cmd_delta(cfg: Config, ns) -> tuple:
    _require_kappa_domain(cfg)
    ev = star_delta(cfg.ordering, cfg.spec, cfg.hbar, shift=parse_number(ns.shift))
    u, v = cfg.grid()
    res = ev.evaluate(u, v, with_error=True)
    const, var, ratio = _j0_fit(res.value, u, v, cfg.hbar)
    scal = {"j0_constant": _c(const), "j0_ratio_variance": var}
    return {
        "command": "delta",
        "config": cfg.to_json(),
        "name": ev.name,
        "grid": grid_records(u, v, res.value, res.err_est, {"j0_ratio": ratio}),
        "scalars": scal,
    }, True


def cmd_residue(cfg: Config, ns) -> tuple:
    ordering = cfg.ordering
    ev = residue_at(ns.k, ordering, cfg.spec, cfg.hbar, z=parse_number(ns.z))
    u, v = cfg.grid()
    res = ev.evaluate(u, v, with_error=True)
    const, var, ratio = _j0_fit(res.value, u, v, cfg.hbar)
    return {
        "command": "residue",
        "config": cfg.to_json(),
        "name": ev.name,
        "grid": grid_records(u, v, res.value, res.err_est, {"j0_ratio": ratio}),
        "scalars": {"j0_constant": _c(const), "j0_ratio_variance": var},
    }, True


def cmd_theta(cfg: Config, ns) -> tuple:
    S = cf.theta_partial_sum(ns.N, ns.k, cfg.ordering, cfg.hbar)
    u, v = cfg.grid()
    return {"command": "theta", "config": cfg.to_json(), "grid": grid_records(u, v, S.evaluate(u, v))}, True


def cmd_verify(cfg: Config, ns) -> tuple:
    ctx = SuiteContext(
        hbar=cfg.hbar,
        ordering=cfg.ordering_or_none,
        spec=cfg.spec,
        points=cfg.grid() if cfg.grid_values != DEFAULT_GRID else None,
        seed=cfg.seed,
    )
    threads = max(1, int(os.environ.get("STARWEYL_THREADS", "1") or 1))
    checks = run_suite(ns.suite, ctx, threads=threads)
    ok = all(c.passed for c in checks)
    payload = {
        "command": "verify",
        "suite": ns.suite,
        "config": cfg.to_json(),
        "checks": [c.to_json(timing=ns.timing) for c in checks],
        "passed": sum(c.passed for c in checks),
        "total": len(checks),
        "all_passed": ok,
    }
    return payload, ok


DEFAULT_GRID = tuple(float(x) for x in np.linspace(-1, 1, 5))

COMMANDS = {
    "mul": cmd_mul,
    "intertwine": cmd_intertwine,
    "exp": cmd_exp,
    "inverse": cmd_inverse,
    "gamma": cmd_gamma,
    "beta": cmd_beta,
    "delta": cmd_delta,
    "residue": cmd_residue,
    "theta": cmd_theta,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file mirroring the flags")
    common.add_argument("--hbar", help="Planck parameter (default 1)")
    common.add_argument("--kappa", help="ordering parameter kappa, e.g. 0, 1/2, 0.5j or 1/3,1/2")
    common.add_argument("--tau", help="ordering parameter tau (default 0)")
    common.add_argument("--mode", choices=("exact", "float"), help="coefficient mode for polynomial commands")
    common.add_argument("--tol", help="quadrature absolute and relative tolerance")
    common.add_argument("--trunc", help="truncation length for infinite lines")
    common.add_argument("--nodes", help="quadrature nodes per unit length")
    common.add_argument("--grid", help="lo:hi:count for u = x + iy, v = conj(u)")
    common.add_argument("--seed", help="seed for random suites")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), help="output format")

    p = argparse.ArgumentParser(prog="starweyl", description="Star products and star functions of the Weyl algebra.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mul", parents=[common], help="star product of two polynomials")
    s.add_argument("f")
    s.add_argument("g")
    s = sub.add_parser("intertwine", parents=[common], help="change the ordering of a polynomial")
    s.add_argument("f")
    s.add_argument("--to-kappa", default="0")
    s.add_argument("--to-tau", default="0")
    s = sub.add_parser("exp", parents=[common], help="closed-form e_*^{t 2uv/(i hbar)} on the grid")
    s.add_argument("t")
    s = sub.add_parser("inverse", parents=[common], help="inverse of z + sign X")
    s.add_argument("z")
    s.add_argument("--side", choices=("plus", "minus"), default="plus")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)
    s = sub.add_parser("gamma", parents=[common], help="Gamma_*(z + sign X)")
    s.add_argument("z")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)
    s = sub.add_parser("beta", parents=[common], help="B_*(z + sign X, y)")
    s.add_argument("z")
    s.add_argument("y")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)
    s = sub.add_parser("delta", parents=[common], help="star delta with a fitted J_0 constant")
    s.add_argument("--shift", default="0")
    s = sub.add_parser("residue", parents=[common], help="residue at i pi (k + 1/2)")
    s.add_argument("k", type=int)
    s.add_argument("--z", default="0")
    s = sub.add_parser("theta", parents=[common], help="theta partial sum in direction k")
    s.add_argument("N", type=int)
    s.add_argument("--k", type=int, default=1)
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=sorted(SUITES) + ["all"])
    s.add_argument("--timing", action="store_true", help="include runtimes (output no longer byte-stable)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = build_config(ns)
        payload, ok = COMMANDS[ns.command](cfg, ns)
        emit(payload, cfg)
    except ConfigError as exc:
        print(f"starweyl: configuration error: {exc}", file=sys.stderr)
        return 2
    except StarWeylError as exc:
        hyp = HYPOTHESES.get(type(exc).__name__, "")
        print(f"starweyl: {type(exc).__name__}: {exc}" + (f" [{hyp}]" if hyp else ""), file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
