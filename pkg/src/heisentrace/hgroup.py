"""The Heisenberg group H_n = R^{2n} x R with its parabolic dilations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class GroupDims:
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")

    @property
    def Q(self) -> int:
        """Homogeneous dimension 2n + 2."""
        return 2 * self.n + 2

    @property
    def horizontal_dim(self) -> int:
        return 2 * self.n


@dataclass(frozen=True, eq=False)
class GroupElement:
    dims: GroupDims
    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (self.dims.horizontal_dim,):
            raise InputError(
                f"horizontal part must have length {self.dims.horizontal_dim}, got shape {x.shape}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.x, other.x) and self.t == other.t

    def __hash__(self):
        return hash((self.dims, tuple(self.x), self.t))

    def allclose(self, other: "GroupElement", atol: float = 1e-12) -> bool:
        _same_dims(self, other)
        return bool(np.allclose(self.x, other.x, rtol=0, atol=atol) and abs(self.t - other.t) <= atol)


def symplectic_form(x, y) -> float:
    """omega(x, y) = sum_i x_i y_{n+i} - x_{n+i} y_i.

    Accepts arrays with the 2n coordinates on the last axis and broadcasts
    over the leading axes.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape[-1] != y.shape[-1]:
        raise InputError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    d = x.shape[-1]
    if d == 0 or d % 2:
        raise InputError(f"symplectic vectors need even positive length, got {d}")
    n = d // 2
    out = np.sum(x[..., :n] * y[..., n:] - x[..., n:] * y[..., :n], axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _same_dims(a: GroupElement, b: GroupElement):
    if a.dims != b.dims:
        raise InputError(f"group dimension mismatch: n={a.dims.n} vs n={b.dims.n}")


def identity(dims: GroupDims) -> GroupElement:
    return GroupElement(dims, np.zeros(dims.horizontal_dim), 0.0)


def group_multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _same_dims(a, b)
    return GroupElement(a.dims, a.x + b.x, a.t + b.t + 0.5 * symplectic_form(a.x, b.x))


def inverse(a: GroupElement) -> GroupElement:
    return GroupElement(a.dims, -a.x, -a.t)


def dilate(lam: float, a: GroupElement) -> GroupElement:
    if not lam > 0:
        raise InputError(f"dilation parameter must be positive, got {lam!r}")
    return GroupElement(a.dims, lam * a.x, lam * lam * a.t)
