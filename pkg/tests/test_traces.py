import math

import pytest

from heisentrace import registry
from heisentrace.errors import InputError, ValidationError
from heisentrace.quad import extrapolate_limit
from heisentrace.symbols import linear_combination, symbol_from_expressions
from heisentrace.traces import (
    TraceConstants,
    check_I_l_vanishing,
    check_I_n_pv,
    check_main_theorem,
    check_proposition,
    error_trend_is_monotone,
    gamma_integral_check,
    limit_order_study,
    pv_brute_force,
    pv_expected,
    regularized_center_ft,
    res,
    tau,
    tau_z,
    trace_report,
)

PI = math.pi


def test_constants():
    c1, c2 = TraceConstants(1), TraceConstants(2)
    assert c1.c_main == pytest.approx(-2 * PI ** 2)
    assert c2.c_main == pytest.approx((2 * PI) ** 3 / (4 * -1j))
    assert c1.epsilon == (2,) and c2.epsilon == (0, 2)
    assert c1.c_prop(1.0) == pytest.approx(-4 * PI ** 2)
    assert c2.c_prop(-1.0) == pytest.approx(-c2.c_prop(1.0))
    with pytest.raises(InputError):
        c1.c_prop(0.0)


def test_tau_examples(spec):
    assert abs(tau(registry.get("gaussian", 1), spec).value - 0.5) < 1e-12
    assert abs(tau(registry.get("unit", 1), spec).value) < 1e-12
    assert abs(tau(registry.get("parabolic", 1), spec).value) < 1e-12
    assert abs(tau(registry.get("gaussian", 2), spec).value - 0.25) < 1e-12


def test_tau_rejects_inconsistent_tail(spec):
    bad = symbol_from_expressions("bad", 1, "1/(1+r^4)^(1/2)", "-1/(1+r^4)^(1/2)", ["0", "2"])
    with pytest.raises(ValidationError):
        tau(bad, spec)


def test_res_examples(spec):
    assert res(registry.get("gaussian", 1), spec).value == 0
    assert abs(res(registry.get("parabolic", 1), spec).value + 0.5) < 1e-14
    cos2 = symbol_from_expressions("c", 1, "cos(2*theta1)*r^2/(1+r^4)", "cos(2*theta1)*r^2/(1+r^4)",
                                   ["0", "cos(2*theta1)"])
    assert abs(res(cos2, spec).value) < 1e-14


def test_tau_z_examples(spec):
    g = tau_z(registry.get("gaussian", 1), 1.0, spec)
    assert abs(g.value + 1 / (8 * PI ** 2)) < 1e-12
    assert g.reduction is not None and abs(g.reduction.value - g.value) <= 10 * (g.error + g.reduction.error) + 1e-15
    assert abs(tau_z(registry.get("unit", 1), 1.0, spec).value) < 1e-12
    p = tau_z(registry.get("parabolic", 1), 1.0, spec)
    assert abs(p.value - 1j / (8 * PI)) < 1e-10
    assert abs(tau_z(registry.get("parabolic", 1), -1.0, spec).value + 1j / (8 * PI)) < 1e-10


def test_theorem_examples(spec):
    for name in ("gaussian", "unit", "angular"):
        c = check_main_theorem(registry.get(name, 1), spec)
        assert c.residual <= max(1e-6, 10 * c.error)
    c = check_main_theorem(registry.get("gaussian", 1), spec)
    assert abs(c.lhs - 0.5) < 1e-12 and abs(c.rhs - 0.5) < 1e-10


def test_proposition_examples(spec):
    p = registry.get("parabolic", 1)
    pos, neg = check_proposition(p, 1.0, spec), check_proposition(p, -1.0, spec)
    assert pos.residual < 1e-10 and neg.residual < 1e-10
    assert abs(pos.rhs - (-0.5j * PI)) < 1e-12 and abs(neg.rhs - 0.5j * PI) < 1e-12
    g = check_proposition(registry.get("gaussian", 1), 1.0, spec)
    assert abs(g.lhs - 0.5) < 1e-10


def test_s_homogeneity(spec):
    p = registry.get("parabolic", 1)
    c = TraceConstants(1)
    for a, b in ((1.0, 2.0), (-1.0, -0.5)):
        va = c.c_prop(a) * tau_z(p, a, spec).value
        vb = c.c_prop(b) * tau_z(p, b, spec).value
        assert abs(va - vb) < 1e-8


def test_linearity(spec):
    p, a, g = registry.get("parabolic", 1), registry.get("angular", 1), registry.get("gaussian-pair", 1)
    combo = linear_combination([(2.0, p), (0.5 - 1j, a), (-3.0, g)])
    for fn in (lambda s: tau(s, spec).value, lambda s: res(s, spec).value,
               lambda s: tau_z(s, 1.0, spec).value, lambda s: tau_z(s, -1.0, spec).value):
        expected = 2.0 * fn(p) + (0.5 - 1j) * fn(a) - 3.0 * fn(g)
        assert abs(fn(combo) - expected) < 1e-8


@pytest.mark.parametrize("n,l,s", [(1, 0, 1.0), (2, 1, 1.0), (2, 0, -1.0)])
def test_I_l_examples(spec, n, l, s):
    assert check_I_l_vanishing(l, n, s, spec).residual <= 1e-8


@pytest.mark.parametrize("n,s,expected", [(1, 1.0, PI * 1j), (1, -1.0, -PI * 1j), (2, 1.0, -PI)])
def test_pv_examples(spec, n, s, expected):
    assert abs(pv_expected(n, s) - expected) < 1e-14
    c = check_I_n_pv(n, s, spec)
    assert c.residual <= 1e-6
    assert abs(pv_brute_force(n, s) - expected) < 1e-8


def test_pv_sign_variants():
    # with (z + is) the n = 1 value flips sign; at n = 2 both variants agree
    assert abs(pv_brute_force(1, 1.0, plus_sign=True) + PI * 1j) < 1e-8
    assert abs(pv_brute_force(2, 1.0, plus_sign=True) - pv_brute_force(2, 1.0)) < 1e-8


def test_gamma_reduction(spec):
    for k in (1, 2):
        _, diff = gamma_integral_check(k, 1 - 1j, spec)
        assert diff < 1e-10


def test_regularized_delta_limit_matches_delta_zero(spec):
    g = registry.get("gaussian", 1)
    beta = 0.05
    base = regularized_center_ft(g, 1.0, beta, 0.0, spec)
    pts = [(d, regularized_center_ft(g, 1.0, beta, d, spec).value) for d in spec.delta_schedule()]
    ex = extrapolate_limit(pts)
    assert abs(ex.limit - base.value) <= max(10 * ex.error, 1e-12)


def test_regularized_beta_limit_reproduces_tau_z(spec):
    p = registry.get("parabolic", 1)
    pts = [(b, regularized_center_ft(p, 1.0, b, 0.0, spec).value) for b in spec.beta_schedule()]
    ex = extrapolate_limit(pts)
    assert abs(ex.limit - tau_z(p, 1.0, spec).value) < 1e-4


def test_regularized_input_errors(spec):
    p = registry.get("parabolic", 1)
    with pytest.raises(InputError):
        regularized_center_ft(p, 1.0, 0.0, 0.0, spec)
    with pytest.raises(InputError):
        regularized_center_ft(p, 1.0, 0.0, 0.1, spec)
    with pytest.raises(InputError):
        regularized_center_ft(p, 0.0, 0.1, 0.0, spec)
    g = registry.get("gaussian", 1)
    assert abs(regularized_center_ft(g, 1.0, 0.0, 1e-9, spec).value - tau_z(g, 1.0, spec).value) < 1e-9


@pytest.mark.parametrize("n", [1, 2])
def test_limit_orders(spec, n):
    p = registry.get("parabolic", n)
    study = limit_order_study(p, 1.0, spec, "delta-then-beta")
    assert study.outer is not None
    assert abs(study.outer.limit - tau_z(p, 1.0, spec).value) < 1e-3
    assert error_trend_is_monotone(study.outer)
    reverse = limit_order_study(p, 1.0, spec, "beta-then-delta")
    assert reverse.outer is None and reverse.message != "ok"


def test_limit_orders_agree_for_schwartz(spec):
    g = registry.get("gaussian", 1)
    target = tau_z(g, 1.0, spec).value
    for order in ("delta-then-beta", "beta-then-delta"):
        study = limit_order_study(g, 1.0, spec, order)
        assert study.outer is not None and abs(study.outer.limit - target) < 1e-6


def test_report_round_trip(spec):
    rep = trace_report(registry.get("parabolic", 1), spec)
    d = rep.to_dict()
    assert d["res"]["value"]["re"] == pytest.approx(-0.5)
    assert d["proposition_residual_pos"] < 1e-10 and d["proposition_residual_neg"] < 1e-10
    assert {"beta", "value_re", "value_im", "extrapolant_re", "extrapolant_im", "err_est"} \
        <= set(d["convergence"]["tau_plus"]["rows"][0])
