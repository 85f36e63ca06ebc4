"""The sharp product of Schwartz symbols and a closed-form Gaussian oracle.

    (sigma # sigma')(v) = C_n int int e^{2i omega(x, y)} sigma(v + x) sigma'(v + y) dx dy

with C_n = pi^{-2n}, the constant for which the constant symbol 1 is the
unit.  ``convention="literal"`` selects C_n = (2 pi)^{-2n} instead.

Numerics: in the absolute variables x' = v + x, y' = v + y the phase is
2[omega(x', y') - omega(x', v) - omega(v, y')], so both symbols are sampled
once on a fixed Gauss-Legendre tensor grid and v only enters through
modulation factors.  The coupling e^{2i omega(x', y')} factorizes over the
coordinate pairs (x'_i, y'_{n+i}) and (x'_{n+i}, y'_i), which turns the
4n-dimensional sum into a few matrix products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import AccuracyError, CapabilityError, InputError
from .hgroup import GroupDims, symplectic_form
from .quad import QuadratureSpec, _check_n, gauss_legendre_interval
from .symbols import SCHWARTZ, PrincipalSymbol, SymbolEvaluator, TailDescriptor

CONVENTIONS = ("unital", "literal")


def sharp_constant(n: int, convention: str = "unital") -> float:
    if convention == "unital":
        return math.pi ** (-2 * n)
    if convention == "literal":
        return (2 * math.pi) ** (-2 * n)
    raise InputError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


@dataclass(frozen=True)
class GaussianSymbol:
    """amplitude * exp(-alpha |x - center|^2)."""

    amplitude: complex
    center: tuple
    alpha: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.ravel(self.center))
        if len(c) == 0 or len(c) % 2:
            raise InputError("center must have even length 2n")
        if not self.alpha > 0:
            raise InputError("alpha must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def centered(cls, n: int, amplitude: complex = 1.0, alpha: float = 1.0) -> "GaussianSymbol":
        return cls(amplitude, (0.0,) * (2 * GroupDims(n).n), alpha)

    @property
    def n(self) -> int:
        return len(self.center) // 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        d = x - np.asarray(self.center)
        return self.amplitude * np.exp(-self.alpha * np.sum(d * d, axis=-1))

    def evaluator(self) -> SymbolEvaluator:
        return SymbolEvaluator(self, True, SCHWARTZ)


Operand = Union[SymbolEvaluator, GaussianSymbol]


def _as_evaluator(s: Operand) -> SymbolEvaluator:
    if isinstance(s, GaussianSymbol):
        return s.evaluator()
    if isinstance(s, SymbolEvaluator):
        return s
    if callable(s):
        return SymbolEvaluator(s)
    raise InputError("operands must be SymbolEvaluator, GaussianSymbol or callables")


class SharpResult(NamedTuple):
    value: Union[complex, np.ndarray]
    error: Union[float, np.ndarray]


def _grid(n: int, order: int, window: float):
    return _box_grid([(-window, window)] * (2 * n), order)


def _box_grid(box, order: int):
    """Tensor Gauss-Legendre grid on a box given as per-axis (lo, hi) pairs."""
    rules = [gauss_legendre_interval(lo, hi, order) for lo, hi in box]
    axes = np.meshgrid(*[t for t, _ in rules], indexing="ij")
    X = np.stack(axes, axis=-1)
    W = np.ones([order] * len(box))
    for k, (_, w) in enumerate(rules):
        shape = [1] * len(box)
        shape[k] = order
        W = W * w.reshape(shape)
    return [t for t, _ in rules], X, W


_PROBE = 33
_SUPPORT_TOL = 1e-17


def support_box(f: SymbolEvaluator, n: int, window: float):
    """Per-axis interval outside which |f| is below 1e-17 of its peak, within [-window, window].

    Found from f on a uniform probe grid and padded by one probe step.
    """
    t = np.linspace(-window, window, _PROBE)
    axes = np.meshgrid(*([t] * (2 * n)), indexing="ij")
    vals = np.abs(f(np.stack(axes, axis=-1)))
    peak = float(np.max(vals))
    if not np.isfinite(peak):
        raise InputError("operand is not finite on the sampling window")
    if peak == 0:
        return [(-1.0, 1.0)] * (2 * n)
    big = vals > _SUPPORT_TOL * peak
    step = t[1] - t[0]
    box = []
    for k in range(2 * n):
        other = tuple(j for j in range(2 * n) if j != k)
        idx = np.nonzero(np.any(big, axis=other))[0]
        lo = max(-window, t[idx[0]] - step)
        hi = min(window, t[idx[-1]] + step)
        box.append((lo, hi))
    return box


def _sharp_fixed(f: SymbolEvaluator, g: SymbolEvaluator, V: np.ndarray, n: int,
                 order: int, window: float, boxes=None) -> np.ndarray:
    """Unnormalized double integral at each row of V (shape (M, 2n)) on one grid."""
    fbox, gbox = boxes if boxes is not None else ([(-window, window)] * (2 * n),) * 2
    tx, X, WX = _box_grid(fbox, order)
    ty, Y, WY = _box_grid(gbox, order)
    S0 = f(X) * WX
    T0 = g(Y) * WY
    # coupling factors: e^{2i x_i y_{n+i}} and e^{-2i x_{n+i} y_i}
    E = [np.exp(2j * np.outer(tx[i], ty[n + i])) for i in range(n)]
    Ec = [np.exp(-2j * np.outer(tx[n + i], ty[i])) for i in range(n)]
    out = np.empty(len(V), dtype=complex)
    # per-v modulation: S_v(x) = S0 e^{-2i omega(x, v)}, T_v(y) = T0 e^{-2i omega(v, y)}
    budget = max(1, (1 << 24) // S0.size)
    lead = (1,) * (2 * n)
    for lo in range(0, len(V), budget):
        Vb = V[lo:lo + budget].reshape((-1,) + lead + (2 * n,))
        S = S0[None] * np.exp(-2j * symplectic_form(X[None], Vb))
        T = T0[None] * np.exp(2j * symplectic_form(Y[None], Vb))   # omega(v, y) = -omega(y, v)
        if n == 1:
            # sum E(x1, y2) Ec(x2, y1) S(x1, x2) T(y1, y2)
            U = np.matmul(np.matmul(S, Ec[0]), T)
            out[lo:lo + len(Vb)] = np.einsum("kab,ab->k", U, E[0])
        else:
            # x3 -> y1, x4 -> y2 through Ec; y3 -> x1, y4 -> x2 through E
            St = np.einsum("kabcd,ce,df->kabef", S, Ec[0], Ec[1], optimize=True)
            Tt = np.einsum("kefgh,ag,bh->kefab", T, E[0], E[1], optimize=True)
            out[lo:lo + len(Vb)] = np.einsum("kabef,kefab->k", St, Tt, optimize=True)
    return out


def sharp(sigma: Operand, sigma2: Operand, v, spec: QuadratureSpec = QuadratureSpec(),
          convention: str = "unital", refine: bool = True) -> SharpResult:
    """(sigma # sigma2)(v) for Schwartz operands; ``v`` has shape (2n,) or (..., 2n).

    A constant operand c is handled exactly through the unit law
    (c # sigma = sigma # c = c sigma, scaled by 4^{-n} under the literal
    convention).  The error estimate is the change against a grid with
    three quarters of the nodes per axis.
    """
    f, g = _as_evaluator(sigma), _as_evaluator(sigma2)
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] % 2:
        raise InputError("v must have 2n coordinates")
    n = v.shape[-1] // 2
    _check_n(n)
    unit_scale = 1.0 if convention == "unital" else sharp_constant(n, "literal") / sharp_constant(n)
    sharp_constant(n, convention)
    if f.constant is not None or g.constant is not None:
        if f.constant is not None and g.constant is not None:
            val = np.full(v.shape[:-1], f.constant * g.constant, dtype=complex)
        elif g.constant is not None:
            val = g.constant * f(v)
        else:
            val = f.constant * g(v)
        val = unit_scale * np.asarray(val, dtype=complex)
        return SharpResult(val[()] if val.ndim == 0 else val,
                           0.0 if val.ndim == 0 else np.zeros(val.shape))
    for e in (f, g):
        if e.decay != SCHWARTZ:
            raise CapabilityError("the sharp product is implemented for Schwartz-class symbols only")
    V = v.reshape(-1, 2 * n)
    order = spec.sharp_order if n == 1 else spec.sharp_order_n2
    C = sharp_constant(n, convention)
    boxes = (support_box(f, n, spec.sharp_window), support_box(g, n, spec.sharp_window))
    fine = C * _sharp_fixed(f, g, V, n, order, spec.sharp_window, boxes)
    if refine:
        coarse = C * _sharp_fixed(f, g, V, n, max(4, (3 * order) // 4), spec.sharp_window, boxes)
        err = np.abs(fine - coarse) + 1e3 * np.finfo(float).eps * np.abs(fine)
        scale = max(1e-12, float(np.max(np.abs(fine))))
        if np.max(err) > 1e-3 * scale:
            raise AccuracyError("sharp product did not converge under grid refinement",
                                (complex(fine.flat[0]), complex(coarse.flat[0])))
    else:
        err = np.zeros(fine.shape)
    fine = fine.reshape(v.shape[:-1])
    err = err.reshape(v.shape[:-1])
    if fine.ndim == 0:
        return SharpResult(complex(fine), float(err))
    return SharpResult(fine, err)


# ------------------------------------------------------------ oracle


def _block(p, q, sgn, a, b):
    """int int e^{-a s^2 - b u^2 + 2 i sgn s u} shifted Gaussians, closed form.

    Equals pi/sqrt(1+ab) exp([2i sgn ab p q - b q^2 - a p^2]/(1+ab)).
    """
    d = 1.0 + a * b
    return math.pi / math.sqrt(d) * np.exp((2j * sgn * a * b * p * q - b * q * q - a * p * p) / d)


@dataclass(frozen=True)
class GaussianProduct:
    """Exact g # g2 for Gaussian symbols with arbitrary centers."""

    left: GaussianSymbol
    right: GaussianSymbol
    convention: str = "unital"

    def __post_init__(self):
        if self.left.n != self.right.n:
            raise InputError("Gaussian operands live in different dimensions")
        sharp_constant(self.left.n, self.convention)

    @property
    def n(self) -> int:
        return self.left.n

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        n = self.n
        a, b = self.left.alpha, self.right.alpha
        dx = v - np.asarray(self.left.center)
        dy = v - np.asarray(self.right.center)
        out = self.left.amplitude * self.right.amplitude * sharp_constant(n, self.convention)
        for i in range(n):
            out = out * _block(dx[..., i], dy[..., n + i], 1.0, a, b)
            out = out * _block(dx[..., n + i], dy[..., i], -1.0, a, b)
        return out

    def as_gaussian(self) -> GaussianSymbol:
        """The product as a single Gaussian; defined when both centers are 0."""
        if any(self.left.center) or any(self.right.center):
            raise InputError("the product is a plain Gaussian only for centered operands")
        a, b, n = self.left.alpha, self.right.alpha, self.n
        amp = self.left.amplitude * self.right.amplitude * math.pi ** (2 * n) \
            * sharp_constant(n, self.convention) / (1 + a * b) ** n
        return GaussianSymbol(amp, self.left.center, (a + b) / (1 + a * b))


def gaussian_sharp_oracle(g: GaussianSymbol, g2: GaussianSymbol,
                          convention: str = "unital") -> GaussianProduct:
    return GaussianProduct(g, g2, convention)


# ------------------------------------------------------------ derived operations


class CommutatorResult(NamedTuple):
    value: complex
    error: float


def commutator_integral(sigma: Operand, sigma2: Operand, n: int,
                        spec: QuadratureSpec = QuadratureSpec(), v_order: int = 32,
                        v_window: float = 6.0) -> CommutatorResult:
    """int [(sigma # sigma2)(v) - (sigma2 # sigma)(v)] dv over R^{2n}.

    The v-integral uses a Gauss-Legendre tensor grid on [-v_window, v_window]^{2n};
    the error estimate combines the change under a coarser v-grid with the
    sharp-product refinement estimates.
    """
    f, g = _as_evaluator(sigma), _as_evaluator(sigma2)
    _check_n(n)
    if sigma is sigma2 or f.constant is not None or g.constant is not None:
        return CommutatorResult(0j, 0.0)

    def integral(order):
        t, V, W = _grid(n, order, v_window)
        V = V.reshape(-1, 2 * n)
        W = W.reshape(-1)
        ab = sharp(f, g, V, spec)
        ba = sharp(g, f, V, spec)
        return complex(np.sum(W * (ab.value - ba.value))), float(np.sum(W * (ab.error + ba.error)))

    fine, qerr = integral(v_order)
    coarse, _ = integral(max(4, (3 * v_order) // 4))
    return CommutatorResult(fine, abs(fine - coarse) + qerr)


def pair_product(k: PrincipalSymbol, h: PrincipalSymbol, spec: QuadratureSpec = QuadratureSpec(),
                 name: Optional[str] = None) -> PrincipalSymbol:
    """Symbol pair of the product: (k_+ # h_+, h_- # k_-).

    The plus side is multiplicative, the minus side reverses the order.
    """
    if k.dims != h.dims:
        raise InputError("symbols live on different groups")
    if not (k.is_schwartz and h.is_schwartz):
        raise CapabilityError("products are implemented for Schwartz-class symbols only")
    kp, km, hp, hm = k.sigma_plus, k.sigma_minus, h.sigma_plus, h.sigma_minus

    def plus(x):
        return sharp(kp, hp, x, spec, refine=False).value

    def minus(x):
        return sharp(hm, km, x, spec, refine=False).value

    return PrincipalSymbol(k.dims, SymbolEvaluator(plus), SymbolEvaluator(minus), TailDescriptor(),
                           name or f"{k.name}#{h.name}")
