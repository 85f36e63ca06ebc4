import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

from heisentrace import registry
from heisentrace.errors import DomainError, ParseError, UnboundVariableError, UnknownIdentifierError
from heisentrace.symexpr import evaluate, free_variables, parse, to_text
from strategies import asts


def test_examples_parse():
    for text in ("exp(-norm2(x))", "1/(1+r^4)^(1/2)", "cos(2*theta1)*r^4/(1+r^4)"):
        e = parse(text)
        assert parse(to_text(e)) == e


def test_examples_evaluate():
    assert evaluate(parse("exp(-norm2(x))"), {"x": np.zeros(2)}) == 1
    assert abs(evaluate(parse("1/(1+r^4)^(1/2)"), {"r": 1.0}) - 1 / math.sqrt(2)) < 1e-15
    with pytest.raises(DomainError):
        evaluate(parse("1/x1"), {"x1": 0.0})


def test_precedence():
    assert evaluate(parse("-2^2"), {}) == -4
    assert evaluate(parse("2^-1"), {}) == 0.5
    assert evaluate(parse("2^3^2"), {}) == 512
    assert evaluate(parse("1-2-3"), {}) == -4
    assert evaluate(parse("8/2/2"), {}) == 2
    assert evaluate(parse("2*3+4*5"), {}) == 26


def test_constants():
    assert evaluate(parse("i^2"), {}) == -1
    assert evaluate(parse("pi"), {}) == math.pi


def test_errors_carry_position():
    with pytest.raises(ParseError) as ei:
        parse("1 +\n  * 2")
    assert (ei.value.line, ei.value.column) == (2, 3)
    with pytest.raises(UnknownIdentifierError) as ei:
        parse("foo(x1)")
    assert ei.value.column == 1
    with pytest.raises(ParseError):
        parse("(1+2")
    with pytest.raises(UnboundVariableError):
        evaluate(parse("x1 + x2"), {"x1": 1.0})


def test_domain_errors():
    for text, b in (("sqrt(-1)", {}), ("(-1)^(1/2)", {}), ("2^(1/3)", {}), ("0^-1", {}),
                    ("sqrt(i)", {})):
        with pytest.raises(DomainError):
            evaluate(parse(text), b)


def test_vectorized():
    x = np.random.default_rng(0).normal(size=(7, 2))
    v = evaluate(parse("exp(-norm2(x))"), {"x": x})
    assert np.allclose(v, np.exp(-np.sum(x * x, axis=1)))


def test_free_variables():
    assert free_variables(parse("x1*r + cos(theta1) + pi")) == {"x1", "r", "theta1"}


# ---- round trip on random ASTs


@settings(max_examples=1000, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(asts)
def test_round_trip(e):
    assert parse(to_text(e)) == e


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("name", registry.NAMES)
def test_registry_forms_agree(name, n):
    x = np.random.default_rng(7).normal(scale=2.0, size=(100, 2 * n))
    hand, expr = registry.get(name, n), registry.get(name, n, "expr")
    for side in ("sigma_plus", "sigma_minus"):
        a, b = getattr(hand, side)(x), getattr(expr, side)(x)
        assert np.max(np.abs(a - b)) <= 1e-14 * max(1.0, np.max(np.abs(a)))
