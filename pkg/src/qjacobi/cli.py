"""Command-line interface.

Subcommands: ``eval``, ``table``, ``verify``, ``zeros``, ``measure`` and
``spectrum``.  Data goes to stdout (or ``--out``), diagnostics to stderr.

Exit codes: 0 on success, 1 on a numerical failure or a failed
verification, 2 on a usage error (bad flags, parameters outside the
admissible range, arguments outside a function's domain).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import qbessel as qb
from . import qpoly as qp
from . import qtransform as qt
from .errors import DomainError, QJacobiError
from .qcore import QContext
from .spectral import build_jacobi, truncated_spectrum
from .verify import SUITES, run_suite

__all__ = ["RunConfig", "main", "build_parser", "to_json"]

FUNCTIONS = ("j", "J", "I", "gamma", "pi", "K", "P", "Q", "G", "stieltjes")
TABLE_HEADER = ("n", "x", "value", "err")
ZEROS_HEADER = ("k", "zero", "residual", "rel_error")
MEASURE_HEADER = ("k", "t", "mass")
SPECTRUM_HEADER = ("k", "node", "weight")
VERIFY_HEADER = ("suite", "case", "inputs", "lhs", "rhs", "residual", "tolerance", "status")
EVAL_HEADER = ("function", "x", "value", "terms_used", "est_error")


class UsageError(Exception):
    """Bad command-line input; mapped to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    q: float = 0.5
    nu: float = 0.5
    tol: float = 1e-12
    max_terms: int = 10000
    format: str = "json"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")

    def context(self) -> QContext:
        try:
            return QContext(q=self.q, nu=self.nu, series_tol=self.tol, max_terms=self.max_terms)
        except DomainError as exc:
            raise UsageError(str(exc)) from exc

    def header(self) -> dict:
        return {"q": self.q, "nu": self.nu, "tol": self.tol, "max_terms": self.max_terms}


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _plain(v):
    """Map numbers to float, complex or str; containers recursively."""
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, dict):
        return {str(k): _plain(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(w) for w in v]
    if isinstance(v, int):
        return v
    if hasattr(v, "imag") and complex(v).imag != 0:
        return complex(v)
    if hasattr(v, "tolist") and not hasattr(v, "real"):
        return _plain(v.tolist())
    try:
        return float(v.real if hasattr(v, "real") else v)
    except (TypeError, ValueError):
        return str(v)


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        # NaN and infinities are not JSON numbers
        return _fmt(v) if math.isfinite(v) else json.dumps(str(v))
    if isinstance(v, complex):
        return "{" + f'"re": {_json_value(v.real)}, "im": {_json_value(v.imag)}' + "}"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(w)}" for k, w in v.items()) + "}"
    if isinstance(v, list):
        return "[" + ", ".join(_json_value(w) for w in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _json_value(_plain(obj))


def _csv_cell(v) -> str:
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt(v)
    if isinstance(v, complex):
        return f"{_fmt(v.real)}{'+' if v.imag >= 0 or math.isnan(v.imag) else '-'}{_fmt(abs(v.imag))}j"
    if isinstance(v, (dict, list)):
        return to_json(v)
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(r.get(h)) for h in header])
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _parse_number(s: str):
    try:
        v = complex(s.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"not a number: {s!r}") from exc
    return v.real if v.imag == 0 else v


def _k_routes(x, ctx: QContext) -> dict:
    routes = {}
    for name, fn in (
        ("integral", qt.macdonald_integral),
        ("decomposition", qt.macdonald_decomposition),
    ):
        try:
            r = fn(x, ctx)
            routes[name] = {"value": r.value, "est_error": r.est_error, "cancellation": r.cancellation}
        except QJacobiError as exc:
            routes[name] = {"error": type(exc).__name__, "message": str(exc)}
    return routes


def evaluate(function: str, x, ctx: QContext, n: int = 0, t=None) -> dict:
    """One record for ``eval``: value, terms used, error estimate, metadata."""
    rec = {"function": function, "x": x, "value": None, "terms_used": None, "est_error": None}
    if function == "j":
        sv = qb.j_nu(x, ctx)
        rec.update(value=sv.value, terms_used=sv.terms_used, est_error=sv.tail_bound)
    elif function == "I":
        sv = qb.i_nu(x, ctx)
        rec.update(value=sv.value, terms_used=sv.terms_used, est_error=sv.tail_bound)
    elif function == "J":
        rec["value"] = qb.J_nu_big(x, ctx)
    elif function == "gamma":
        rec["value"] = qb.gamma_nu(x, ctx)
    elif function == "pi":
        rec["value"] = qb.pi_nu(x, ctx)
    elif function == "K":
        best = qt.macdonald(x, ctx)
        rec.update(value=best.value, est_error=best.est_error)
        rec["method"] = best.method
        routes = _k_routes(x, ctx)
        if best.method == "recurrence":
            routes["recurrence"] = {"value": best.value, "est_error": best.est_error, "cancellation": False}
        rec["routes"] = routes
        vals = [r["value"] for r in routes.values() if "value" in r]
        rec["route_agreement"] = (max(vals) - min(vals)) / abs(best.value) if len(vals) > 1 and best.value else None
    elif function in ("P", "Q"):
        if n < 0:
            raise UsageError("n must be non-negative")
        P, Q = qp.pn_eval(x, n, ctx)
        rec.update(value=P if function == "P" else Q, terms_used=n + 1)
        rec["n"] = n
    elif function == "G":
        if t is None:
            raise UsageError("G needs --t")
        g = qp.genfun(x, t, n if n > 0 else 40, ctx)
        rec.update(value=g.closed_value, terms_used=g.terms)
        rec["t"] = t
        rec["series_value"] = g.series_value
        rec["series_converges"] = g.series_converges
        if g.series_converges:
            rec["est_error"] = abs(complex(g.series_value) - complex(g.closed_value))
    elif function == "stieltjes":
        lim, used = qp.stieltjes_limit(x, ctx, with_n=True)
        closed = qp.stieltjes_closed(x, ctx)
        rec.update(value=lim, terms_used=used, est_error=abs(complex(lim) - complex(closed)))
        rec["closed_form"] = closed
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown function {function!r}")
    return rec


def cmd_eval(args, cfg: RunConfig):
    ctx = cfg.context()
    x = _parse_number(args.x)
    t = _parse_number(args.t) if args.t is not None else None
    rec = evaluate(args.function, x, ctx, args.n, t)
    if cfg.format == "json":
        return to_json({"config": cfg.header(), **rec}), 0
    return to_csv(EVAL_HEADER, [rec]), 0


def table_rows(function: str, lo: int, hi: int, ctx: QContext, n: int = 0) -> list[dict]:
    """Rows ``(n, x = q**n, value, err)`` for lattice exponents ``lo..hi``."""
    if lo <= hi and (lo < ctx.lattice_lo or hi > ctx.lattice_hi):
        raise UsageError(f"exponents must lie in [{ctx.lattice_lo}, {ctx.lattice_hi}]")
    rows = []
    for m in range(lo, hi + 1):
        x = float(ctx.q) ** m
        rec = evaluate(function, x, ctx, n)
        rows.append({"n": m, "x": x, "value": rec["value"], "err": rec["est_error"]})
    return rows


def cmd_table(args, cfg: RunConfig):
    if args.function in ("G", "stieltjes"):
        raise UsageError("table supports lattice functions and P, Q")
    rows = table_rows(args.function, args.lo, args.hi, cfg.context(), args.n)
    if cfg.format == "json":
        return to_json({"config": cfg.header(), "function": args.function, "rows": rows}), 0
    return to_csv(TABLE_HEADER, rows), 0


def cmd_verify(args, cfg: RunConfig):
    ctx = cfg.context()
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_suite(name, ctx) for name in names]
    code = 0 if all(r.ok for r in reports) else 1
    for r in reports:
        w = r.worst()
        print(f"{r.suite}: {r.summary['pass']} pass, {r.summary['fail']} fail"
              + (f"; worst residual {w.residual:.3g} (tol {w.tolerance:g})" if w else ""), file=sys.stderr)
    if cfg.format == "json":
        body = [r.to_dict() for r in reports]
        return to_json({"config": cfg.header(), "reports": body, "exit_code": code}), code
    rows = []
    for r in reports:
        for i, c in enumerate(r.cases):
            rows.append({"suite": r.suite, "case": i, "inputs": c.inputs, "lhs": c.lhs, "rhs": c.rhs,
                         "residual": c.residual, "tolerance": c.tolerance, "status": c.status})
    return to_csv(VERIFY_HEADER, rows), code


def cmd_zeros(args, cfg: RunConfig):
    if args.k_max < 1:
        raise UsageError("k_max must be at least 1")
    zl = qb.bessel_zeros(cfg.context(), args.k_max)
    rows = [{"k": k + 1, "zero": z, "residual": zl.residuals[k], "rel_error": zl.residuals[k] / zl.scales[k]}
            for k, z in enumerate(zl.zeros)]
    if cfg.format == "json":
        return to_json({"config": cfg.header(), "rows": rows, "residual_bound": zl.residual_bound}), 0
    return to_csv(ZEROS_HEADER, rows), 0


def cmd_measure(args, cfg: RunConfig):
    if args.k_max < 1:
        raise UsageError("k_max must be at least 1")
    m = qp.measure(cfg.context(), args.k_max, args.provenance, N=args.N)
    rows = [{"k": k, "t": t, "mass": a} for k, (t, a) in enumerate(zip(m.support, m.masses))]
    total = m.total_mass()
    print(f"sum of listed masses: {_fmt(total)}", file=sys.stderr)
    if m.rule_mass is not None:
        print(f"sum over the full rule: {_fmt(m.rule_mass)}", file=sys.stderr)
    if cfg.format == "json":
        return to_json({"config": cfg.header(), "provenance": m.provenance.value, "rows": rows,
                        "total_mass": total, "rule_mass": m.rule_mass}), 0
    return to_csv(MEASURE_HEADER, rows), 0


def cmd_spectrum(args, cfg: RunConfig):
    if args.N < 1:
        raise UsageError("N must be at least 1")
    n_max = max(args.N - 1, 2)
    ts = truncated_spectrum(build_jacobi(args.potential, cfg.context(), n_max), args.N)
    rows = [{"k": k, "node": t, "weight": w} for k, (t, w) in enumerate(zip(ts.nodes, ts.weights))]
    if cfg.format == "json":
        return to_json({"config": cfg.header(), "potential": args.potential, "N": args.N, "rows": rows,
                        "weight_sum": float(sum(ts.weights))}), 0
    return to_csv(SPECTRUM_HEADER, rows), 0


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=float, default=0.5, help="lattice base, 0 < q < 1 (default 0.5)")
    common.add_argument("--nu", type=float, default=0.5, help="order, > -1 and not an integer (default 0.5)")
    common.add_argument("--tol", type=float, default=1e-12, help="series truncation tolerance (default 1e-12)")
    common.add_argument("--max-terms", type=int, default=10000, help="cap on series length (default 10000)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write data to this file instead of stdout")

    p = argparse.ArgumentParser(prog="qjacobi", description="q-Bessel functions and the associated Jacobi operators")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate one function at one point")
    e.add_argument("function", choices=FUNCTIONS)
    e.add_argument("x", help="argument; z for stieltjes; complex as 1+2j")
    e.add_argument("--n", type=int, default=0, help="degree for P and Q; series length for G")
    e.add_argument("--t", help="second argument of G")
    e.set_defaults(run=cmd_eval)

    t = sub.add_parser("table", parents=[common], help="tabulate at x = q**n for n in [lo, hi]")
    t.add_argument("function", choices=FUNCTIONS)
    t.add_argument("lo", type=int)
    t.add_argument("hi", type=int)
    t.add_argument("--n", type=int, default=0, help="degree for P and Q")
    t.set_defaults(run=cmd_table)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=(*SUITES, "all"))
    v.set_defaults(run=cmd_verify)

    z = sub.add_parser("zeros", parents=[common], help="positive zeros of j_nu")
    z.add_argument("k_max", type=int)
    z.set_defaults(run=cmd_zeros)

    m = sub.add_parser("measure", parents=[common], help="orthogonality measure of P_n")
    m.add_argument("k_max", type=int)
    m.add_argument("--provenance", choices=[p.value for p in qp.Provenance], default="closed_form")
    m.add_argument("--N", type=int, default=None, help="section size for the quadrature provenance")
    m.set_defaults(run=cmd_measure)

    s = sub.add_parser("spectrum", parents=[common], help="Gauss rule of the N x N Jacobi section")
    s.add_argument("N", type=int)
    s.add_argument("--potential", choices=("zero", "centrifugal"), default="zero")
    s.set_defaults(run=cmd_spectrum)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.q, args.nu, args.tol, args.max_terms, args.format)
        text, code = args.run(args, cfg)
    except UsageError as exc:
        print(f"qjacobi: error: {exc}", file=sys.stderr)
        return 2
    except (QJacobiError, ArithmeticError, ValueError) as exc:
        # arguments outside a function's domain are input errors
        code = 2 if isinstance(exc, DomainError) else 1
        rec = {"error": type(exc).__name__, "message": str(exc)}
        print(f"qjacobi: {rec['error']}: {exc}", file=sys.stderr)
        text = to_json(rec) if args.format == "json" else to_csv(("error", "message"), [rec])
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
