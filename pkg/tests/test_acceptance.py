"""Acceptance suite: ten criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the summary lines are
printed by the last test) or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

from heisentrace import registry
from heisentrace.quad import QuadratureSpec, gauss_legendre_interval
from heisentrace.symbols import constant_evaluator
from heisentrace.symexpr import parse, to_text
from heisentrace.traces import (
    check_I_l_vanishing,
    check_I_n_pv,
    check_main_theorem,
    check_proposition,
    error_trend_is_monotone,
    limit_order_study,
    pv_brute_force,
    res,
    tau,
    tau_z,
)
from heisentrace.weyl import GaussianSymbol, commutator_integral, gaussian_sharp_oracle, sharp
from strategies import asts

PI = math.pi
SPEC = QuadratureSpec()
RESULTS = {}
TITLES = {
    1: "main identity, Schwartz case, n=1",
    2: "main identity, tailed case, n=1",
    3: "parity at n=2",
    4: "I_l vanishing",
    5: "I_n principal value",
    6: "trace property and unit laws",
    7: "sharp-product oracle and point value",
    8: "delta-then-beta convergence",
    9: "unit symbol degeneracy",
    10: "parser round trip and registry forms",
}


def record(k, ok, detail):
    RESULTS[k] = (bool(ok), detail)
    assert ok, detail


def test_criterion_01_gaussian_n1():
    t0 = time.perf_counter()
    g = registry.get("gaussian", 1)
    thm = check_main_theorem(g, SPEC)
    dt = time.perf_counter() - t0
    ok = abs(thm.tau.value - 0.5) <= 1e-8 and thm.residual <= 1e-6 and dt < 10
    record(1, ok, f"tau={thm.tau.value.real:.12g}, residual={thm.residual:.2e}, {dt:.2f}s")


def test_criterion_02_parabolic_n1():
    t0 = time.perf_counter()
    p = registry.get("parabolic", 1)
    t, r = tau(p, SPEC), res(p, SPEC)
    tp = tau_z(p, 1.0, SPEC)
    pos = check_proposition(p, 1.0, SPEC, t, r, tp)
    neg = check_proposition(p, -1.0, SPEC, t, r)
    dt = time.perf_counter() - t0
    flip = abs(pos.rhs + neg.rhs) <= 1e-12 and abs(pos.rhs.imag) > 1.0
    ok = (abs(t.value) <= 1e-8 and abs(r.value + 0.5) <= 1e-8 and abs(tp.value - 1j / (8 * PI)) <= 1e-4
          and pos.residual <= 1e-4 and neg.residual <= 1e-4 and flip and dt < 60)
    record(2, ok, f"tau={abs(t.value):.1e}, Res={r.value.real:.12g}, tau_+={tp.value.imag:.12g}i, "
                  f"residuals {pos.residual:.1e}/{neg.residual:.1e}, sign flip {flip}, {dt:.2f}s")


def test_criterion_03_gaussian_n2():
    t0 = time.perf_counter()
    thm = check_main_theorem(registry.get("gaussian", 2), SPEC)
    dt = time.perf_counter() - t0
    ok = abs(thm.tau.value - 0.25) <= 1e-6 and thm.residual <= 1e-4 and dt < 300
    record(3, ok, f"tau={thm.tau.value.real:.12g}, residual={thm.residual:.2e}, {dt:.2f}s")


def test_criterion_04_I_l():
    worst = max(check_I_l_vanishing(l, n, s, SPEC).residual
                for n in (1, 2) for l in range(n) for s in (1.0, -1.0))
    record(4, worst <= 1e-8, f"worst residual {worst:.2e}")


def test_criterion_05_pv():
    worst, cross = 0.0, 0.0
    for n in (1, 2):
        for s in (1.0, -1.0, 2.0, -2.0):
            c = check_I_n_pv(n, s, SPEC)
            worst = max(worst, c.residual)
            cross = max(cross, abs(pv_brute_force(n, s) - c.expected))
    record(5, worst <= 1e-6 and cross <= 1e-6,
           f"worst residual {worst:.2e}, brute-force disagreement {cross:.2e}")


def test_criterion_06_trace_property():
    g = GaussianSymbol.centered(1)
    comm = [abs(commutator_integral(g, GaussianSymbol(1.0, c, 1.0), 1, SPEC).value)
            for c in ((1.0, 0.0), (0.0, 1.0), (0.5, -0.7))]
    t = np.linspace(-1, 1, 5)
    grid = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
    one = constant_evaluator(1.0)
    unit = 0.0
    for sym in (g, GaussianSymbol(1.0, (0.4, -0.3), 0.7)):
        ref = sym(grid)
        unit = max(unit, np.max(np.abs(sharp(sym, one, grid, SPEC).value - ref)),
                   np.max(np.abs(sharp(one, sym, grid, SPEC).value - ref)))
    ok = max(comm) <= 1e-5 and unit <= 1e-8
    record(6, ok, f"commutators {', '.join(f'{c:.1e}' for c in comm)}; unit law {unit:.1e}")


def _literal_brute_force():
    """(2 pi)^{-2} of the Gaussian oscillatory integral at v = 0 on a plain grid."""
    x, w = gauss_legendre_interval(-7.0, 7.0, 80)
    X1, X2, Y1, Y2 = np.meshgrid(x, x, x, x, indexing="ij", sparse=True)
    W = w[:, None, None, None] * w[None, :, None, None] * w[None, None, :, None] * w[None, None, None, :]
    f = np.exp(-(X1 ** 2 + X2 ** 2 + Y1 ** 2 + Y2 ** 2) + 2j * (X1 * Y2 - X2 * Y1))
    return complex(np.sum(W * f)) / (2 * PI) ** 2


def test_criterion_07_sharp_oracle():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(10):
        a, b = rng.uniform(0.5, 2.0, 2)
        g1, g2 = GaussianSymbol.centered(1, 1.0, a), GaussianSymbol.centered(1, 1.0, b)
        v = rng.uniform(-1.0, 1.0, size=(4, 2))
        worst = max(worst, float(np.max(np.abs(sharp(g1, g2, v, SPEC).value
                                               - gaussian_sharp_oracle(g1, g2)(v)))))
    brute = _literal_brute_force()
    g = GaussianSymbol.centered(1)
    default = sharp(g, g, [0.0, 0.0], SPEC).value
    literal = sharp(g, g, [0.0, 0.0], SPEC, convention="literal").value
    oracle_ok = worst <= 1e-6
    brute_ok = abs(brute - 0.125) <= 1e-6 and abs(literal - brute) <= 1e-6
    point_ok = abs(default - 0.125) <= 1e-6
    record(7, oracle_ok and brute_ok and point_ok,
           f"oracle {worst:.1e}; brute force {brute.real:.9g} matches literal normalization "
           f"{literal.real:.9g}; default (unital) point value {default.real:.9g} vs 1/8")


def test_criterion_08_limit_order():
    p = registry.get("parabolic", 1)
    study = limit_order_study(p, 1.0, SPEC, "delta-then-beta")
    target = tau_z(p, 1.0, SPEC).value
    ok = study.outer is not None
    gap, mono = math.inf, False
    if ok:
        gap = abs(study.outer.limit - target)
        mono = error_trend_is_monotone(study.outer)
    record(8, ok and gap <= 1e-3 and mono, f"gap to tau_z {gap:.1e}, monotone error trend {mono}")


def test_criterion_09_unit():
    worst, sides = 0.0, 0.0
    for n in (1, 2):
        u = registry.get("unit", n)
        thm = check_main_theorem(u, SPEC)
        vals = (thm.tau.value, thm.tau_plus.value, thm.tau_minus.value, res(u, SPEC).value)
        worst = max(worst, max(abs(v) for v in vals))
        sides = max(sides, abs(thm.lhs), abs(thm.rhs))
    record(9, worst <= 1e-10 and sides <= 1e-10, f"largest value {worst:.1e}, largest side {sides:.1e}")


@settings(max_examples=1000, suppress_health_check=[HealthCheck.too_slow], deadline=None, database=None)
@given(asts)
def _round_trip(e):
    assert parse(to_text(e)) == e


def test_criterion_10_parser():
    try:
        _round_trip()
        rt = True
    except AssertionError:
        rt = False
    rng = np.random.default_rng(99)
    worst = 0.0
    for n in (1, 2):
        x = rng.normal(scale=2.0, size=(100, 2 * n))
        for name in registry.NAMES:
            hand, expr = registry.get(name, n), registry.get(name, n, "expr")
            for side in ("sigma_plus", "sigma_minus"):
                a, b = getattr(hand, side)(x), getattr(expr, side)(x)
                worst = max(worst, float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(a)))))
    record(10, rt and worst <= 1e-14, f"round trip {'ok' if rt else 'failed'}, registry forms {worst:.1e}")


def summary_lines():
    lines = []
    for k in sorted(TITLES):
        if k not in RESULTS:
            lines.append(f"NOT RUN {k:2d} {TITLES[k]}")
            continue
        ok, detail = RESULTS[k]
        lines.append(f"{'PASS' if ok else 'FAIL'} {k:2d} {TITLES[k]}: {detail}")
    return lines


def test_zz_summary(capsys):
    with capsys.disabled():
        print()
        print("\n".join(summary_lines()))
    if len(RESULTS) < len(TITLES):
        pytest.skip("summary is partial: not every criterion ran")


if __name__ == "__main__":
    import sys

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
