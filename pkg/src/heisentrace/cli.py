"""Command-line front end.

    heisentrace verify {all,theorem,proposition,lemmas,weyl} [--n N]
    heisentrace trace SYMBOL [--s S ...] [--n N] [--csv-dir DIR]
    heisentrace sharp SYMBOL SYMBOL2 --v V1,V2,... [--n N]
    heisentrace sweep SYMBOL [--s S] [--n N] [--beta0 B] [--steps K]
    heisentrace spec
    heisentrace symbols

SYMBOL is a built-in name or a path to a symbol definition JSON file.
Exit status: 0 when every check passes, 1 when a residual exceeds its
bound, 2 on input, capability or accuracy errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import registry, traces, weyl
from .errors import CapabilityError, HeisentraceError
from .quad import SUPPORTED_N, QuadratureSpec
from .symbols import PrincipalSymbol, load_symbol_file, tail_consistency_check

SCHEMA = 1
SUITES = ("all", "theorem", "proposition", "lemmas", "weyl")
PROPOSITION_S = (1.0, -1.0, 2.0, -0.5)
CSV_COLUMNS = ("beta", "value_re", "value_im", "extrapolant_re", "extrapolant_im", "err_est")

EXIT_OK, EXIT_RESIDUAL, EXIT_ERROR = 0, 1, 2


def identity_tolerance(n: int) -> float:
    return 1e-6 if n == 1 else 1e-4


def worker_count(tasks: int) -> int:
    cap = os.environ.get("HEISENTRACE_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(limit, tasks))


def _c(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _fmt(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


class Check:
    """One verification entry: a residual compared against a bound."""

    def __init__(self, check: str, subject: str, value: float, bound: float,
                 detail: str = "", passed: Optional[bool] = None):
        self.check = check
        self.subject = subject
        self.value = float(value)
        self.bound = float(bound)
        self.passed = bool(self.value <= self.bound) if passed is None else bool(passed)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"check": self.check, "subject": self.subject, "value": self.value,
                "bound": self.bound, "passed": self.passed, "detail": self.detail}


class Failure:
    def __init__(self, subject: str, exc: Exception):
        self.subject = subject
        self.kind = type(exc).__name__
        self.message = str(exc)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "error": self.kind, "message": self.message}


# ------------------------------------------------------------ suites


def _symbol_suite(sym: PrincipalSymbol, spec: QuadratureSpec, want_theorem: bool,
                  want_prop: bool, s_values) -> tuple:
    rep = traces.trace_report(sym, spec, s_values)
    tol = identity_tolerance(sym.n)
    checks = []
    if want_theorem:
        checks.append(Check("theorem", sym.name, rep.theorem_residual,
                            max(tol, 10 * rep.theorem_error)))
    if want_prop:
        for p in rep.proposition:
            checks.append(Check(f"proposition s={p.s:g}", sym.name, p.residual,
                                max(tol, 10 * p.error)))
    return rep, checks


def _lemma_checks(n: int, spec: QuadratureSpec) -> List[Check]:
    out = []
    for l in range(n):
        for s in (1.0, -1.0):
            c = traces.check_I_l_vanishing(l, n, s, spec)
            out.append(Check(f"I_l vanishing l={l} s={s:g}", f"n={n}", c.residual, 1e-8))
    for s in (1.0, -1.0, 2.0, -2.0):
        c = traces.check_I_n_pv(n, s, spec)
        brute = traces.pv_brute_force(n, s)
        gap = abs(brute - c.expected)
        out.append(Check(f"I_n principal value s={s:g}", f"n={n}", max(c.residual, gap), 1e-6,
                         f"value {_fmt(c.value)}, expected {_fmt(c.expected)}, brute force {_fmt(brute)}"))
    for k in (1, 2):
        _, diff = traces.gamma_integral_check(k, 1 - 1j, spec)
        out.append(Check(f"gamma integral power {k}", f"n={n}", diff, 1e-10))
    sym = registry.get("parabolic", n)
    study = traces.limit_order_study(sym, 1.0, spec, "delta-then-beta")
    target = traces.tau_z(sym, 1.0, spec)
    if study.outer is None:
        out.append(Check("regularized FT delta-then-beta", "parabolic", math.inf, 1e-3, study.message))
    else:
        mono = traces.error_trend_is_monotone(study.outer)
        gap = abs(study.outer.limit - target.value)
        out.append(Check("regularized FT delta-then-beta", "parabolic", gap, 1e-3,
                         f"limit {_fmt(study.outer.limit)}, tau_z {_fmt(target.value)}, "
                         f"monotone error trend: {mono}", passed=gap <= 1e-3 and mono))
    rev = traces.limit_order_study(sym, 1.0, spec, "beta-then-delta")
    detail = rev.message if rev.outer is None else f"limit {_fmt(rev.outer.limit)} +- {rev.outer.error:.3g}"
    # the reversed order is a diagnostic: reported, never failed
    out.append(Check("regularized FT beta-then-delta (diagnostic)", "parabolic", 0.0, 0.0,
                     detail, passed=True))
    return out


def _unit_grid(n: int) -> np.ndarray:
    t = np.linspace(-1.0, 1.0, 5)
    if n == 1:
        return np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
    # a 5 x 5 grid in the (x1, x3) plane, with fixed small x2, x4
    a, b = np.meshgrid(t, t, indexing="ij")
    return np.stack([a, 0.25 * np.ones_like(a), b, -0.25 * np.ones_like(a)], -1).reshape(-1, 4)


def _weyl_checks(n: int, spec: QuadratureSpec, seed: int = 20240601) -> List[Check]:
    out = []
    grid = _unit_grid(n)
    unit = registry.get("unit", n).sigma_plus
    for name in ("gaussian", "gaussian-pair"):
        sym = registry.get(name, n)
        for side, ev in (("sigma_plus", sym.sigma_plus), ("sigma_minus", sym.sigma_minus)):
            ref = ev(grid)
            left = weyl.sharp(unit, ev, grid, spec).value
            right = weyl.sharp(ev, unit, grid, spec).value
            gap = float(np.max(np.abs(np.concatenate([left - ref, right - ref]))))
            out.append(Check("unit law", f"{name}.{side}", gap, 1e-8))
    rng = np.random.default_rng(seed)
    pairs = 10 if n == 1 else 2
    worst = 0.0
    for _ in range(pairs):
        a, b = rng.uniform(0.5, 2.0, 2)
        g1 = weyl.GaussianSymbol.centered(n, 1.0, a)
        g2 = weyl.GaussianSymbol.centered(n, 1.0, b)
        v = rng.uniform(-1.0, 1.0, size=(3, 2 * n))
        num = weyl.sharp(g1, g2, v, spec).value
        worst = max(worst, float(np.max(np.abs(num - weyl.gaussian_sharp_oracle(g1, g2)(v)))))
    out.append(Check("sharp vs Gaussian oracle", f"{pairs} width pairs", worst, 1e-6))
    if n == 1:
        g = weyl.GaussianSymbol.centered(1)
        for c in ((1.0, 0.0), (0.0, 1.0), (0.5, -0.7)):
            r = weyl.commutator_integral(g, weyl.GaussianSymbol(1.0, c, 1.0), 1, spec)
            out.append(Check("commutator integral", f"center {c}", abs(r.value), 1e-5,
                             f"error estimate {r.error:.3g}"))
    return out


def run_verify(suite: str, n: int, spec: QuadratureSpec, s_values=PROPOSITION_S) -> dict:
    if suite not in SUITES:
        raise HeisentraceError(f"unknown suite {suite!r}")
    if n not in SUPPORTED_N:
        raise CapabilityError(f"verification is implemented for n in {SUPPORTED_N}, got n={n}")
    want_thm = suite in ("all", "theorem")
    want_prop = suite in ("all", "proposition")
    checks: List[Check] = []
    failures: List[Failure] = []
    reports = {}
    symbols = registry.all_symbols(n)
    for name in sorted(symbols):
        rep = tail_consistency_check(symbols[name])
        checks.append(Check("tail consistency", name, 0.0 if rep.passed else 1.0, 0.0, rep.message))

    tasks = []
    if want_thm or want_prop:
        for name in sorted(symbols):
            tasks.append(("symbol", name, lambda sym=symbols[name]: _symbol_suite(
                sym, spec, want_thm, want_prop, s_values)))
    if suite in ("all", "lemmas"):
        tasks.append(("lemmas", "lemmas", lambda: (None, _lemma_checks(n, spec))))
    if suite in ("all", "weyl"):
        tasks.append(("weyl", "weyl", lambda: (None, _weyl_checks(n, spec))))

    def run(task):
        kind, subject, fn = task
        try:
            return subject, fn(), None
        except HeisentraceError as exc:
            return subject, None, Failure(subject, exc)

    with ThreadPoolExecutor(max_workers=worker_count(len(tasks))) as pool:
        results = list(pool.map(run, tasks))
    for subject, result, failure in results:
        if failure is not None:
            failures.append(failure)
            continue
        rep, cks = result
        if rep is not None:
            reports[subject] = rep.to_dict()
        checks.extend(cks)
    return {
        "schema": SCHEMA,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "suite": suite,
        "n": n,
        "spec": spec.to_dict(),
        "symbols": reports,
        "checks": [c.to_dict() for c in checks],
        "errors": [f.to_dict() for f in failures],
        "passed": not failures and all(c.passed for c in checks),
    }


def exit_code(report: dict) -> int:
    if report.get("errors"):
        return EXIT_ERROR
    return EXIT_OK if all(c["passed"] for c in report["checks"]) else EXIT_RESIDUAL


def stable_view(report: dict) -> dict:
    """The report without its timestamp, for run-to-run comparison."""
    return {k: v for k, v in report.items() if k != "timestamp"}


# ------------------------------------------------------------ output


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _checks_table(report: dict) -> str:
    rows = [("check", "subject", "value", "bound", "status")]
    for c in report["checks"]:
        rows.append((c["check"], c["subject"], f"{c['value']:.3e}", f"{c['bound']:.1e}",
                     "ok" if c["passed"] else "FAIL"))
    widths = [max(len(r[k]) for r in rows) for k in range(5)]
    lines = ["  ".join(r[k].ljust(widths[k]) for k in range(5)).rstrip() for r in rows]
    for e in report.get("errors", []):
        lines.append(f"ERROR {e['subject']}: {e['error']}: {e['message']}")
    failed = [c for c in report["checks"] if not c["passed"]]
    for c in failed:
        lines.append(f"FAILED {c['check']} [{c['subject']}] {c['detail']}".rstrip())
    return "\n".join(lines) + "\n"


def _checks_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "subject", "value", "bound", "passed"])
    for c in report["checks"]:
        w.writerow([c["check"], c["subject"], repr(c["value"]), repr(c["bound"]), c["passed"]])
    return buf.getvalue()


def table_csv(table: traces.LimitTable) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in table.rows():
        w.writerow({k: ("" if row[k] is None else repr(float(row[k]))) for k in CSV_COLUMNS})
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ commands


def resolve_symbol(ref: str, n: int) -> PrincipalSymbol:
    if ref in registry.NAMES:
        return registry.get(ref, n)
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        sym = load_symbol_file(path)
        if sym.n != n:
            raise CapabilityError(f"{ref} defines a symbol for n={sym.n}, but --n {n} was given")
        return sym
    raise HeisentraceError(f"unknown symbol {ref!r}; built-ins are {', '.join(registry.NAMES)}")


def load_spec(path: Optional[str]) -> QuadratureSpec:
    if not path:
        return QuadratureSpec()
    return QuadratureSpec.from_json(Path(path).read_text(encoding="utf-8"))


def cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    report = run_verify(args.suite, args.n, spec, tuple(args.s) if args.s else PROPOSITION_S)
    if args.format == "json":
        _emit(_dump_json(report), args.out)
    else:
        if args.out:
            Path(args.out).write_text(_dump_json(report), encoding="utf-8")
        sys.stdout.write(_checks_csv(report) if args.format == "csv" else _checks_table(report))
    return exit_code(report)


def cmd_trace(args) -> int:
    spec = load_spec(args.spec)
    sym = resolve_symbol(args.symbol, args.n)
    s_values = args.s or [1.0, -1.0]
    t = traces.tau(sym, spec)
    r = traces.res(sym, spec)
    tz = {s: traces.tau_z(sym, s, spec) for s in s_values}
    result = {
        "schema": SCHEMA,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "symbol": sym.name,
        "n": sym.n,
        "tau": {"value": _c(t.value), "error": t.error},
        "res": {"value": _c(r.value), "error": r.error},
        "tau_z": [{"s": s, "value": _c(v.value), "error": v.error} for s, v in tz.items()],
        "spec": spec.to_dict(),
    }
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for s, v in tz.items():
            (d / f"{sym.name}_s{s:g}.csv").write_text(table_csv(v.table), encoding="utf-8")
    if args.format == "json":
        _emit(_dump_json(result), args.out)
        return EXIT_OK
    lines = [f"symbol {sym.name} (n={sym.n})",
             f"tau   = {_fmt(t.value)}  +- {t.error:.2e}",
             f"Res   = {_fmt(r.value)}  +- {r.error:.2e}"]
    for s, v in tz.items():
        label = "tau_+" if s == 1 else "tau_-" if s == -1 else f"tau_z(s={s:g})"
        lines.append(f"{label} = {_fmt(v.value)}  +- {v.error:.2e}")
    text = "\n".join(lines) + "\n"
    if args.format == "csv":
        text = "".join(f"# s={s:g}\n" + table_csv(v.table) for s, v in tz.items())
    _emit(text, args.out)
    return EXIT_OK


def _parse_point(text: str, n: int) -> np.ndarray:
    try:
        v = np.array([float(p) for p in text.split(",")])
    except ValueError:
        raise HeisentraceError(f"cannot read the point {text!r}; expected comma-separated numbers") from None
    if v.shape != (2 * n,):
        raise HeisentraceError(f"the point needs {2 * n} coordinates for n={n}, got {len(v)}")
    return v


def _gaussian_of(sym: PrincipalSymbol) -> Optional[weyl.GaussianSymbol]:
    if sym.name in ("gaussian", "gaussian-pair"):
        return weyl.GaussianSymbol.centered(sym.n)
    return None


def cmd_sharp(args) -> int:
    spec = load_spec(args.spec)
    a = resolve_symbol(args.symbol, args.n)
    b = resolve_symbol(args.symbol2, args.n)
    v = _parse_point(args.v, args.n)
    res_ = weyl.sharp(a.sigma_plus, b.sigma_plus, v, spec, convention=args.convention)
    out = {"schema": SCHEMA, "left": a.name, "right": b.name, "v": v.tolist(),
           "convention": args.convention, "value": _c(res_.value), "error": float(res_.error)}
    lines = [f"({a.name} # {b.name})({args.v}) = {_fmt(res_.value)}  +- {float(res_.error):.2e}"
             f"  [{args.convention} normalization]"]
    ga, gb = _gaussian_of(a), _gaussian_of(b)
    if ga is not None and gb is not None:
        oracle = complex(weyl.gaussian_sharp_oracle(ga, gb, args.convention)(v))
        out["oracle"] = _c(oracle)
        out["discrepancy"] = abs(oracle - res_.value)
        lines.append(f"oracle = {_fmt(oracle)}  discrepancy {abs(oracle - res_.value):.2e}")
    if args.format == "json":
        _emit(_dump_json(out), args.out)
    else:
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_spec(args.spec)
    changes = {}
    if args.beta0 is not None:
        changes["beta0"] = args.beta0
    if args.steps is not None:
        changes["beta_steps"] = args.steps
    spec = spec.replace(**changes)
    sym = resolve_symbol(args.symbol, args.n)
    r = traces.tau_z(sym, args.s, spec)
    if args.format == "json":
        _emit(_dump_json({"schema": SCHEMA, "symbol": sym.name, "n": sym.n, "s": args.s,
                          "rows": r.table.rows(), "extrapolant": _c(r.value), "error": r.error}),
              args.out)
    else:
        _emit(table_csv(r.table), args.out)
    sys.stderr.write(f"extrapolant {_fmt(r.value)} +- {r.error:.2e}\n")
    return EXIT_OK


def cmd_spec(args) -> int:
    _emit(load_spec(args.spec).to_json() + "\n", args.out)
    return EXIT_OK


def cmd_symbols(args) -> int:
    lines = []
    for name in registry.NAMES:
        d = registry.expressions(name, args.n)
        tail = ", ".join(d["tail"]) if d["tail"] else "(Schwartz)"
        lines.append(f"{name}\n  sigma_+ = {d['sigma_plus']}\n  sigma_- = {d['sigma_minus']}\n  tail    = {tail}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=1, help="half the horizontal dimension (1 or 2)")
    common.add_argument("--spec", help="quadrature settings JSON (partial files allowed)")
    common.add_argument("--out", help="write output to this path")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")

    p = argparse.ArgumentParser(prog="heisentrace",
                                description="Trace identities for Heisenberg-calculus principal symbols.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--s", type=float, action="append", help="central coordinates for the proposition")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("trace", parents=[common], help="print tau, tau_z and Res of a symbol")
    t.add_argument("symbol")
    t.add_argument("--s", type=float, action="append")
    t.add_argument("--csv-dir", help="write beta-convergence tables here")
    t.set_defaults(func=cmd_trace)

    s = sub.add_parser("sharp", parents=[common], help="evaluate the sharp product of sigma_+ sides")
    s.add_argument("symbol")
    s.add_argument("symbol2")
    s.add_argument("--v", required=True, help="point as comma-separated coordinates (use --v=-1,0 for a leading minus)")
    s.add_argument("--convention", choices=weyl.CONVENTIONS, default="unital")
    s.set_defaults(func=cmd_sharp)

    w = sub.add_parser("sweep", parents=[common], help="beta-convergence table of tau_z as CSV")
    w.add_argument("symbol")
    w.add_argument("--s", type=float, default=1.0)
    w.add_argument("--beta0", type=float)
    w.add_argument("--steps", type=int)
    w.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("spec", parents=[common], help="print the quadrature settings")
    sp.set_defaults(func=cmd_spec)

    sy = sub.add_parser("symbols", parents=[common], help="list the built-in symbols")
    sy.set_defaults(func=cmd_symbols)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HeisentraceError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
