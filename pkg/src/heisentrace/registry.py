"""Built-in symbols, each available as hand-coded numpy and as symexpr text."""

from __future__ import annotations

from typing import Dict

import numpy as np

from .errors import InputError
from .hgroup import GroupDims
from .symbols import (
    HOMOGENEOUS_TAIL,
    SCHWARTZ,
    PrincipalSymbol,
    SymbolEvaluator,
    TailDescriptor,
    constant_evaluator,
    ZERO,
    symbol_from_expressions,
)

NAMES = ("angular", "gaussian", "gaussian-pair", "parabolic", "unit")


def _r2(x):
    return np.sum(x * x, axis=-1)


def _gauss(x):
    return np.exp(-_r2(x))


def _parabolic(x):
    r2 = _r2(x)
    return 1.0 / np.sqrt(1.0 + r2 * r2)


def _angular(x):
    r2 = _r2(x)
    return (x[..., 0] ** 2 - x[..., 1] ** 2) * r2 / (1.0 + r2 * r2)


def _const(c):
    return lambda th: np.full(np.shape(th)[:-1], complex(c))


def _hand(name: str, n: int) -> PrincipalSymbol:
    dims = GroupDims(n)
    zeros = [_const(0.0)] * (n + 1)
    if name == "gaussian":
        g = SymbolEvaluator(_gauss, True, SCHWARTZ)
        return PrincipalSymbol(dims, g, ZERO, TailDescriptor(), name)
    if name == "gaussian-pair":
        g = SymbolEvaluator(_gauss, True, SCHWARTZ)
        return PrincipalSymbol(dims, g, g, TailDescriptor(), name)
    if name == "unit":
        one = constant_evaluator(1.0)
        return PrincipalSymbol(dims, one, one, TailDescriptor(tuple([_const(1.0)] + zeros[1:])), name)
    if name == "parabolic":
        plus = SymbolEvaluator(_parabolic, True, HOMOGENEOUS_TAIL)
        minus = SymbolEvaluator(lambda x: -_parabolic(x), True, HOMOGENEOUS_TAIL)
        coeffs = list(zeros)
        coeffs[1] = _const(1.0)
        return PrincipalSymbol(dims, plus, minus, TailDescriptor(tuple(coeffs)), name)
    if name == "angular":
        ev = SymbolEvaluator(_angular, True, HOMOGENEOUS_TAIL)

        def a0(th):
            return th[..., 0] ** 2 - th[..., 1] ** 2

        coeffs = list(zeros)
        coeffs[0] = a0
        if n == 2:
            # (x1^2 - x2^2) r^2/(1 + r^4) = (x1^2 - x2^2) r^{-2} (1 - r^{-4} + ...)
            coeffs[2] = lambda th: -a0(th)
        return PrincipalSymbol(dims, ev, ev, TailDescriptor(tuple(coeffs)), name)
    raise InputError(f"unknown symbol {name!r}; built-ins are {', '.join(NAMES)}")


def expressions(name: str, n: int) -> dict:
    """The symexpr text of a built-in symbol, in the symbol-file layout."""
    zeros = ["0"] * (n + 1)
    if name == "gaussian":
        d = {"sigma_plus": "exp(-norm2(x))", "sigma_minus": "0", "tail": []}
    elif name == "gaussian-pair":
        d = {"sigma_plus": "exp(-norm2(x))", "sigma_minus": "exp(-norm2(x))", "tail": []}
    elif name == "unit":
        d = {"sigma_plus": "1", "sigma_minus": "1", "tail": ["1"] + zeros[1:]}
    elif name == "parabolic":
        tail = list(zeros)
        tail[1] = "1"
        d = {"sigma_plus": "1/(1+r^4)^(1/2)", "sigma_minus": "-1/(1+r^4)^(1/2)", "tail": tail}
    elif name == "angular":
        tail = list(zeros)
        if n == 1:
            sigma = "cos(2*theta1)*r^4/(1+r^4)"
            tail[0] = "cos(2*theta1)"
        else:
            sigma = "(x1^2 - x2^2)*r^2/(1+r^4)"
            tail[0] = "x1^2 - x2^2"
            tail[2] = "-(x1^2 - x2^2)"
        d = {"sigma_plus": sigma, "sigma_minus": sigma, "tail": tail}
    else:
        raise InputError(f"unknown symbol {name!r}; built-ins are {', '.join(NAMES)}")
    return {"name": name, "n": n, **d}


def get(name: str, n: int = 1, form: str = "hand") -> PrincipalSymbol:
    """Look up a built-in symbol; ``form`` is "hand" or "expr"."""
    GroupDims(n)
    if form == "hand":
        return _hand(name, n)
    if form == "expr":
        d = expressions(name, n)
        return symbol_from_expressions(d["name"], n, d["sigma_plus"], d["sigma_minus"], d["tail"])
    raise InputError(f"form must be 'hand' or 'expr', got {form!r}")


def all_symbols(n: int = 1, form: str = "hand") -> Dict[str, PrincipalSymbol]:
    return {name: get(name, n, form) for name in NAMES}
