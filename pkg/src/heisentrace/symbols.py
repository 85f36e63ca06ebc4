"""Fourier-side principal symbols (sigma_+, sigma_-) with declared asymptotic tails.

A symbol is a pair of evaluators on R^{2n} together with the angular
coefficients a_{2l}, l = 0..n, of its large-|x| expansion

    sigma_+(x) ~ sum_l a_{2l}(x/|x|) |x|^{-2l}
    sigma_-(x) ~ sum_l (-1)^l a_{2l}(x/|x|) |x|^{-2l}

Evaluators are vectorized: they take an array of shape (..., 2n) and return
shape (...).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import symexpr
from .errors import InputError, SingularityError, ValidationError
from .hgroup import GroupDims

SCHWARTZ = "schwartz"
HOMOGENEOUS_TAIL = "homogeneous-tail"


@dataclass(frozen=True)
class SymbolEvaluator:
    fn: Callable
    smooth_at_origin: bool = True
    decay: str = SCHWARTZ
    # set when the evaluator is a known constant (the unit symbol and multiples)
    constant: Optional[complex] = None

    def __post_init__(self):
        if self.decay not in (SCHWARTZ, HOMOGENEOUS_TAIL):
            raise InputError(f"unknown decay class {self.decay!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(x), dtype=complex)
        return np.broadcast_to(out, x.shape[:-1]).copy() if out.shape != x.shape[:-1] else out


def constant_evaluator(c: complex, decay: str = HOMOGENEOUS_TAIL) -> SymbolEvaluator:
    c = complex(c)
    return SymbolEvaluator(lambda x: np.full(np.shape(x)[:-1], c), True, decay, c)


ZERO = SymbolEvaluator(lambda x: np.zeros(np.shape(x)[:-1], dtype=complex), True, SCHWARTZ, 0j)


@dataclass(frozen=True)
class TailDescriptor:
    """Angular coefficients a_0, a_2, ..., a_{2n}; empty for Schwartz symbols.

    Each coefficient maps unit vectors of shape (..., 2n) to shape (...).
    """

    coefficients: tuple = ()

    @property
    def is_schwartz(self) -> bool:
        return len(self.coefficients) == 0

    def a(self, l: int, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.is_schwartz:
            return np.zeros(theta.shape[:-1], dtype=complex)
        out = np.asarray(self.coefficients[l](theta), dtype=complex)
        return np.broadcast_to(out, theta.shape[:-1])


@dataclass(frozen=True)
class PrincipalSymbol:
    dims: GroupDims
    sigma_plus: SymbolEvaluator
    sigma_minus: SymbolEvaluator
    tail: TailDescriptor = field(default_factory=TailDescriptor)
    name: str = "symbol"

    def __post_init__(self):
        k = len(self.tail.coefficients)
        if k not in (0, self.n + 1):
            raise InputError(f"tail must list 0 or n+1 = {self.n + 1} coefficients, got {k}")
        if self.sigma_plus.decay != self.sigma_minus.decay:
            raise InputError("sigma_plus and sigma_minus must share a decay class")
        expected = SCHWARTZ if k == 0 else HOMOGENEOUS_TAIL
        if self.sigma_plus.decay != expected:
            raise InputError(
                f"decay class {self.sigma_plus.decay!r} does not match a tail of length {k}"
            )

    @property
    def n(self) -> int:
        return self.dims.n

    @property
    def is_schwartz(self) -> bool:
        return self.tail.is_schwartz

    def sigma(self, sign: int) -> SymbolEvaluator:
        return self.sigma_plus if sign > 0 else self.sigma_minus


# ------------------------------------------------------------ helpers


def _as_points(symbol: PrincipalSymbol, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (2 * symbol.n,):
        raise InputError(f"points must have {2 * symbol.n} coordinates, got shape {x.shape}")
    return x


def _polar(x: np.ndarray):
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularityError("tail terms are singular at x = 0")
    return r, x / r[..., None]


def _tail_sum(symbol: PrincipalSymbol, x: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    """sum_l weights[l] * w_{2l}(x) over the listed l."""
    out = np.zeros(x.shape[:-1], dtype=complex)
    if symbol.is_schwartz or not any(weights):
        return out
    r, theta = _polar(x)
    for l, c in enumerate(weights):
        if c:
            out = out + c * symbol.tail.a(l, theta) * r ** (-2.0 * l)
    return out


def epsilon(n: int, l: int) -> int:
    """epsilon_l = 1 - (-1)^{n+l}: 0 when n + l is even, 2 when odd."""
    return 1 - (-1) ** (n + l)


# ------------------------------------------------------------ operations


def eval_w(symbol: PrincipalSymbol, l: int, x):
    """w_{2l}(x) = a_{2l}(x/|x|) |x|^{-2l}; identically 0 for Schwartz symbols."""
    if not 0 <= l <= symbol.n:
        raise InputError(f"l must lie in 0..{symbol.n}, got {l}")
    x = _as_points(symbol, x)
    if symbol.is_schwartz:
        out = np.zeros(x.shape[:-1], dtype=complex)
    else:
        r, theta = _polar(x)
        out = symbol.tail.a(l, theta) * r ** (-2.0 * l)
    return complex(out) if out.ndim == 0 else out


def r_function(symbol: PrincipalSymbol, x):
    """R = sigma_+ - (-1)^n sigma_- - sum_{l<n} epsilon_l w_{2l}.

    This is the integrand of the trace; it decays like |x|^{-2n-2}.
    """
    x = _as_points(symbol, x)
    n = symbol.n
    out = symbol.sigma_plus(x) - (-1) ** n * symbol.sigma_minus(x)
    out = out - _tail_sum(symbol, x, [epsilon(n, l) for l in range(n)])
    return complex(out) if out.ndim == 0 else out


def remainder(symbol: PrincipalSymbol, sign: int, x, lmax: int):
    """sigma_sign minus the tail terms w_{2l}, l = 0..lmax, with the (-1)^l signs on the minus side."""
    x = _as_points(symbol, x)
    weights = [(1 if sign > 0 else (-1) ** l) for l in range(lmax + 1)]
    return symbol.sigma(sign)(x) - _tail_sum(symbol, x, weights)


def tilde_sigma(symbol: PrincipalSymbol, sign: int, x):
    """The truncated symbol: subtract the tail through l = n outside the unit ball, l = n-1 inside."""
    if sign not in (1, -1):
        raise InputError("sign must be +1 or -1")
    x = _as_points(symbol, x)
    n = symbol.n
    if symbol.is_schwartz:
        out = symbol.sigma(sign)(x)
    else:
        r = np.linalg.norm(x, axis=-1)
        outer = r >= 1
        out = remainder(symbol, sign, x, n - 1)
        if np.any(outer):
            r_o, theta_o = _polar(x[outer])
            c = 1 if sign > 0 else (-1) ** n
            out[outer] -= c * symbol.tail.a(n, theta_o) * r_o ** (-2.0 * n)
    return complex(out) if out.ndim == 0 else out


class TailReport(NamedTuple):
    radii: tuple
    plus: tuple
    minus: tuple
    passed: bool
    message: str


def default_theta_grid(n: int, m: int = 8) -> np.ndarray:
    from .quad import sphere_rule

    pts, _ = sphere_rule(n, m)
    return pts


def tail_consistency_check(symbol: PrincipalSymbol, r_ladder: Optional[Sequence[float]] = None,
                           theta_grid: Optional[np.ndarray] = None,
                           decay_factor: float = 0.1) -> TailReport:
    """Check that sigma_pm minus the declared tail is o(|x|^{-2n}).

    For each radius r the residual is ``max_theta |sigma(r theta) - tail| r^{2n}``.
    The check passes when the residuals do not increase along the ladder and
    the last is at most ``decay_factor`` times the first, or when everything
    sits at rounding level.
    """
    n = symbol.n
    radii = np.asarray(r_ladder if r_ladder is not None else 2.0 ** np.arange(1, 7), dtype=float)
    if np.any(radii < 1) or np.any(np.diff(radii) <= 0):
        raise InputError("radius ladder must be increasing and >= 1")
    theta = default_theta_grid(n) if theta_grid is None else np.asarray(theta_grid, dtype=float)
    res = {}
    scale = {}
    for sign in (1, -1):
        vals, scl = [], []
        for r in radii:
            x = r * theta
            rem = remainder(symbol, sign, x, n)
            vals.append(float(np.max(np.abs(rem))) * r ** (2 * n))
            mag = np.abs(symbol.sigma(sign)(x))
            scl.append(float(np.max(mag)) * r ** (2 * n))
        res[sign] = vals
        scale[sign] = scl

    problems = []
    for sign, label in ((1, "sigma_+"), (-1, "sigma_-")):
        v = res[sign]
        floor = [64 * np.finfo(float).eps * max(s, 1e-300) for s in scale[sign]]
        noisy = [a <= f for a, f in zip(v, floor)]
        if all(noisy):
            continue
        for k in range(len(v) - 1):
            if v[k + 1] > v[k] and not noisy[k + 1]:
                problems.append(f"{label} residual grows between r={radii[k]:g} and r={radii[k + 1]:g}")
                break
        if not (v[-1] <= decay_factor * v[0] or noisy[-1]):
            problems.append(f"{label} residual does not decay ({v[0]:.3g} -> {v[-1]:.3g})")
    return TailReport(tuple(float(r) for r in radii), tuple(res[1]), tuple(res[-1]), not problems,
                      "; ".join(problems) if problems else "ok")


def require_consistent_tail(symbol: PrincipalSymbol) -> TailReport:
    rep = tail_consistency_check(symbol)
    if not rep.passed:
        raise ValidationError(f"symbol {symbol.name!r}: inconsistent tail: {rep.message}")
    return rep


def linear_combination(terms: Sequence, name: str = "combination") -> PrincipalSymbol:
    """sum_k c_k * symbol_k with tails combined coefficientwise."""
    terms = [(complex(c), s) for c, s in terms]
    if not terms:
        raise InputError("need at least one term")
    dims = terms[0][1].dims
    if any(s.dims != dims for _, s in terms):
        raise InputError("all symbols must live on the same group")
    tailed = any(not s.is_schwartz for _, s in terms)

    def combine(evals):
        fns = [(c, e) for c, e in evals]
        consts = [c * e.constant if e.constant is not None else None for c, e in fns]
        const = sum(consts) if all(k is not None for k in consts) else None
        return SymbolEvaluator(
            lambda x: sum(c * e(x) for c, e in fns),
            all(e.smooth_at_origin for _, e in fns),
            HOMOGENEOUS_TAIL if tailed else SCHWARTZ,
            const,
        )

    plus = combine([(c, s.sigma_plus) for c, s in terms])
    minus = combine([(c, s.sigma_minus) for c, s in terms])
    if not tailed:
        return PrincipalSymbol(dims, plus, minus, TailDescriptor(), name)
    coeffs = []
    for l in range(dims.n + 1):
        parts = [(c, s.tail.coefficients[l]) for c, s in terms if not s.is_schwartz]
        coeffs.append(lambda th, parts=parts: sum(c * np.asarray(a(th), dtype=complex) for c, a in parts))
    return PrincipalSymbol(dims, plus, minus, TailDescriptor(tuple(coeffs)), name)


def scaled(symbol: PrincipalSymbol, c: complex, name: Optional[str] = None) -> PrincipalSymbol:
    return linear_combination([(c, symbol)], name or f"{c}*{symbol.name}")


# ------------------------------------------------------------ expressions


def angle_bindings(theta: np.ndarray) -> dict:
    """Chart angles of unit (or arbitrary nonzero) vectors.

    n = 1: theta1 is the polar angle.  n = 2: the Hopf chart
    x = (cos t1 cos t2, cos t1 sin t2, sin t1 cos t3, sin t1 sin t3).
    """
    d = theta.shape[-1]
    if d == 2:
        return {"theta1": np.arctan2(theta[..., 1], theta[..., 0])}
    if d == 4:
        rho1 = np.hypot(theta[..., 0], theta[..., 1])
        rho2 = np.hypot(theta[..., 2], theta[..., 3])
        return {
            "theta1": np.arctan2(rho2, rho1),
            "theta2": np.arctan2(theta[..., 1], theta[..., 0]),
            "theta3": np.arctan2(theta[..., 3], theta[..., 2]),
        }
    return {}


def _point_bindings(x: np.ndarray, with_radius: bool) -> dict:
    b = {"x": x}
    for k in range(x.shape[-1]):
        b[f"x{k + 1}"] = x[..., k]
    if with_radius:
        b["r"] = np.linalg.norm(x, axis=-1)
    b.update(angle_bindings(x))
    return b


def _allowed(n: int, with_radius: bool) -> set:
    names = {f"x{k}" for k in range(1, 2 * n + 1)} | {"x"}
    names |= {"theta1"} if n == 1 else {"theta1", "theta2", "theta3"}
    if with_radius:
        names.add("r")
    return names


def compile_expression(text: str, n: int, tail: bool = False):
    """Parse ``text`` into a vectorized evaluator.

    Symbol expressions see ``x``, ``x1..x2n``, ``r`` and the chart angles;
    tail expressions are functions on the sphere and see the unit-vector
    components and angles but not ``r``.
    """
    allowed = _allowed(n, not tail)
    expr = symexpr.parse(text, variables=allowed - {"x"})

    def fn(x):
        x = np.asarray(x, dtype=float)
        val = symexpr.evaluate(expr, _point_bindings(x, not tail))
        return np.broadcast_to(np.asarray(val, dtype=complex), x.shape[:-1])

    constant = None
    if not symexpr.free_variables(expr):
        constant = complex(symexpr.evaluate(expr, {}))
    return expr, fn, constant


def symbol_from_expressions(name: str, n: int, sigma_plus: str, sigma_minus: str,
                            tail: Sequence[str] = (), smooth_at_origin: bool = True) -> PrincipalSymbol:
    dims = GroupDims(n)
    decay = HOMOGENEOUS_TAIL if tail else SCHWARTZ
    evals = []
    for text in (sigma_plus, sigma_minus):
        _, fn, const = compile_expression(text, n)
        evals.append(SymbolEvaluator(fn, smooth_at_origin, decay, const))
    coeffs = tuple(compile_expression(t, n, tail=True)[1] for t in tail)
    return PrincipalSymbol(dims, evals[0], evals[1], TailDescriptor(coeffs), name)


def symbol_from_dict(data: dict) -> PrincipalSymbol:
    missing = {"name", "n", "sigma_plus", "sigma_minus"} - set(data)
    if missing:
        raise InputError(f"symbol definition lacks {sorted(missing)}")
    return symbol_from_expressions(
        str(data["name"]), int(data["n"]), str(data["sigma_plus"]), str(data["sigma_minus"]),
        [str(t) for t in data.get("tail", [])], bool(data.get("smooth_at_origin", True)),
    )


def load_symbol_file(path) -> PrincipalSymbol:
    """Read a symbol definition: {name, n, sigma_plus, sigma_minus, tail: [...]}."""
    return symbol_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
