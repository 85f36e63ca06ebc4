"""Quadrature and limit-extraction engines.

Integrals over R^{2n} are done in spherical coordinates: a radial rule
(tanh-sinh by default) times a sphere rule on S^{2n-1}.  Every limit
(beta -> 0, delta -> 0, eps -> 0) is evaluated on a geometric schedule and
Richardson-extrapolated by :func:`extrapolate_limit`.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import AccuracyError, CapabilityError, InputError

EPS = np.finfo(float).eps
SUPPORTED_N = (1, 2)
RADIAL_SCHEMES = ("double-exponential", "gauss-legendre", "gauss-laguerre")

@dataclass(frozen=True)
class QuadratureSpec:
    radial_order: int = 24
    radial_scheme: str = "double-exponential"
    sphere_order: int = 16
    truncation_radius: float = 40.0
    tail_truncation_radius: float = 1.0e4
    beta0: float = 0.25
    beta_steps: int = 10
    delta0: float = 0.25
    delta_steps: int = 14
    pv_epsilon0: float = 0.5
    pv_epsilon_steps: int = 12
    sharp_order: int = 96
    sharp_order_n2: int = 48
    sharp_window: float = 9.0
    refine_rtol: float = 1e-6

    def __post_init__(self):
        for name in ("radial_order", "sphere_order", "sharp_order", "sharp_order_n2"):
            if getattr(self, name) < 4:
                raise InputError(f"{name} must be >= 4")
        if self.radial_scheme not in RADIAL_SCHEMES:
            raise InputError(f"unknown radial_scheme {self.radial_scheme!r}")
        if not (self.truncation_radius > 1 and self.tail_truncation_radius > 1):
            raise InputError("truncation radii must exceed 1")
        for name in ("beta0", "delta0", "pv_epsilon0", "sharp_window"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        for name in ("beta_steps", "delta_steps", "pv_epsilon_steps"):
            if getattr(self, name) < 2:
                raise InputError(f"{name} must be >= 2 (at least three schedule points)")

    def beta_schedule(self) -> np.ndarray:
        return self.beta0 * 0.5 ** np.arange(self.beta_steps + 1)

    def delta_schedule(self) -> np.ndarray:
        return self.delta0 * 0.5 ** np.arange(self.delta_steps + 1)

    def pv_epsilon_schedule(self) -> np.ndarray:
        return self.pv_epsilon0 * 0.5 ** np.arange(self.pv_epsilon_steps + 1)

    def coarsened(self) -> "QuadratureSpec":
        """The lower-resolution companion used for refinement error estimates."""
        return dataclasses.replace(
            self,
            radial_order=max(4, (2 * self.radial_order) // 3),
            sphere_order=max(4, (2 * self.sphere_order) // 3),
        )

    def replace(self, **changes) -> "QuadratureSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown quadrature settings: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "QuadratureSpec":
        return cls.from_dict(json.loads(text))


class QuadResult(NamedTuple):
    value: complex
    error: float


def _check_n(n: int):
    if n not in SUPPORTED_N:
        raise CapabilityError(f"sphere quadrature is implemented for n in {SUPPORTED_N}, got n={n}")


# ------------------------------------------------------------ 1D rules


def tanh_sinh(order: int, t_max: float = 3.5):
    """Tanh-sinh nodes on (-1, 1).

    Returns ``(x, d, w)`` with ``d = 1 - |x|`` computed without cancellation,
    so that callers can place nodes next to an endpoint accurately.
    """
    h = t_max / order
    t = h * np.arange(-order, order + 1)
    u = 0.5 * np.pi * np.sinh(t)
    au = np.abs(u)
    e = np.exp(-2.0 * au)
    d = 2.0 * e / (1.0 + e)
    x = np.sign(u) * (1.0 - d)
    # sech(u)^2 = 4 e^{-2|u|} / (1 + e^{-2|u|})^2
    w = h * 0.5 * np.pi * np.cosh(t) * 4.0 * e / (1.0 + e) ** 2
    return x, d, w


def tanh_sinh_interval(a: float, b: float, order: int):
    """Nodes and weights of the tanh-sinh rule mapped onto [a, b]."""
    x, d, w = tanh_sinh(order)
    half = 0.5 * (b - a)
    nodes = np.where(x < 0, a + half * d, b - half * d)
    return nodes, w * half


def gauss_legendre_interval(a: float, b: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), w * half


# ------------------------------------------------------------ sphere rules


def sphere_rule(n: int, order: int):
    """Product rule on S^{2n-1} with the unnormalized surface measure.

    S^1 is the trapezoid rule in the angle.  S^3 is parametrized by
    ``t = sin^2(eta)`` and two circle angles::

        x = (sqrt(1-t) cos a, sqrt(1-t) sin a, sqrt(t) cos b, sqrt(t) sin b)

    for which the surface measure is ``dt da db / 2``; Gauss-Legendre in t,
    trapezoid in a and b.
    """
    _check_n(n)
    if n == 1:
        m = 4 * order
        theta = 2.0 * np.pi * np.arange(m) / m
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return pts, np.full(m, 2.0 * np.pi / m)
    t, wt = gauss_legendre_interval(0.0, 1.0, order)
    m = 2 * order
    ang = 2.0 * np.pi * np.arange(m) / m
    T, A, B = np.meshgrid(t, ang, ang, indexing="ij")
    c, s = np.sqrt(1.0 - T), np.sqrt(T)
    pts = np.stack([c * np.cos(A), c * np.sin(A), s * np.cos(B), s * np.sin(B)], axis=-1)
    w = (wt[:, None, None] * np.full((m, m), 0.5 * (2.0 * np.pi / m) ** 2)).ravel()
    return pts.reshape(-1, 4), w


def sphere_area(n: int) -> float:
    _check_n(n)
    return 2.0 * np.pi ** n / math.factorial(n - 1)


def integrate_sphere(g: Callable, n: int, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """Integral of ``g`` over S^{2n-1}; ``g`` maps an (M, 2n) array of unit vectors to (M,)."""
    pts, w = sphere_rule(n, spec.sphere_order)
    vals = np.broadcast_to(np.asarray(g(pts), dtype=complex), w.shape)
    return complex(vals @ w)


# ------------------------------------------------------------ radial rules


class RadialRule(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray
    # radius where the algebraic tail was cut off (None: no tail correction)
    cutoff: Optional[float]


def noise_limited_radius(n: int, requested: float) -> float:
    """Cutoff where rounding in (symbol - tail), ~ eps r^{2n}, meets the truncation error ~ r^{-4}."""
    return float(min(requested, EPS ** (-1.0 / (2 * n + 4))))


def _panel_edges(radius: float) -> list:
    edges = [0.0, 1.0]
    while edges[-1] < radius:
        edges.append(min(2.0 * edges[-1], radius))
    return edges


def radial_rule(n: int, spec: QuadratureSpec, algebraic_tail: bool = False) -> RadialRule:
    """Rule for int_0^inf F(r) dr on the panels [0,1], [1,2], [2,4], ... up to R.

    Doubling panels resolve every length scale between 1 and R with the same
    relative accuracy, which is what both Gaussian decay and the
    beta-dependent knee at r ~ beta^{-1/2} need.  ``double-exponential`` puts
    a tanh-sinh rule on every panel (endpoint singularities at r = 0 are
    harmless); ``gauss-legendre`` uses Gauss-Legendre panels instead.  For
    algebraic tails R is ``tail_truncation_radius`` (capped where rounding
    would dominate) and the caller adds an r^{-3} correction beyond it.
    """
    if spec.radial_scheme == "gauss-laguerre":
        if algebraic_tail:
            raise CapabilityError("gauss-laguerre radial rule needs exponentially decaying integrands")
        x, w = np.polynomial.laguerre.laggauss(spec.radial_order)
        return RadialRule(x, w * np.exp(x), None)
    if algebraic_tail:
        radius = noise_limited_radius(n, spec.tail_truncation_radius)
    else:
        radius = spec.truncation_radius
    edges = _panel_edges(radius)
    panel = tanh_sinh_interval if spec.radial_scheme == "double-exponential" else gauss_legendre_interval
    nodes, weights = [], []
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        rule = tanh_sinh_interval if k == 0 else panel
        x, w = rule(a, b, spec.radial_order)
        nodes.append(x)
        weights.append(w)
    return RadialRule(np.concatenate(nodes), np.concatenate(weights), radius if algebraic_tail else None)


def sphere_profile(f: Callable, n: int, radii: np.ndarray, sphere_order: int,
                   chunk: int = 1 << 21) -> np.ndarray:
    """``P(r) = int_{S^{2n-1}} f(r theta) dtheta`` at every radius in ``radii``."""
    pts, w = sphere_rule(n, sphere_order)
    radii = np.asarray(radii, dtype=float)
    out = np.empty(radii.shape, dtype=complex)
    step = max(1, chunk // len(w))
    for lo in range(0, len(radii), step):
        r = radii[lo:lo + step]
        X = r[:, None, None] * pts[None, :, :]
        vals = np.asarray(f(X), dtype=complex)
        out[lo:lo + step] = np.broadcast_to(vals, X.shape[:2]) @ w
    return out


def tail_correction(n: int, cutoff: float, profile_at_cutoff: complex) -> complex:
    """int_R^inf of an integrand ~ C r^{-3} matched to its value at R."""
    return profile_at_cutoff * cutoff ** (2 * n - 1) * cutoff / 2.0


def two_term_tail(n: int, r1: float, p1: complex, r2: float, p2: complex) -> complex:
    """int_{r2}^inf of C1 r^{-3} + C2 r^{-5}, fitted to the radial integrand at r1 < r2.

    ``p1``, ``p2`` are sphere profiles; the radial integrand is ``p r^{2n-1}``.
    """
    g1, g2 = p1 * r1 ** (2 * n - 1), p2 * r2 ** (2 * n - 1)
    # g = C1 r^-3 + C2 r^-5  =>  g r^5 = C1 r^2 + C2
    c1 = (g2 * r2 ** 5 - g1 * r1 ** 5) / (r2 ** 2 - r1 ** 2)
    c2 = g2 * r2 ** 5 - c1 * r2 ** 2
    return c1 / (2 * r2 ** 2) + c2 / (4 * r2 ** 4)


def _plane_once(f, n, spec, algebraic_tail, magnitude=None):
    rule = radial_rule(n, spec, algebraic_tail)
    prof = sphere_profile(f, n, rule.nodes, spec.sphere_order)
    terms = prof * rule.nodes ** (2 * n - 1) * rule.weights
    value = complex(np.sum(terms))
    corr = 0j
    corr_err = 0.0
    if rule.cutoff is not None:
        R = rule.cutoff
        edges = _panel_edges(R)
        a, b = edges[-2], edges[-3]
        pb, pa, pR = sphere_profile(f, n, np.array([b, a, R]), spec.sphere_order)
        corr = two_term_tail(n, a, pa, R, pR)
        # the same model fitted one panel earlier must predict the last panel
        # plus the correction; the model error falls like r^{-4}
        last = complex(np.sum(terms[rule.nodes > a]))
        miss = abs(two_term_tail(n, b, pb, a, pa) - (last + corr))
        corr_err = miss * (a / R) ** 4
    scale = float(np.sum(np.abs(terms)))
    if magnitude is not None:
        mprof = sphere_profile(magnitude, n, rule.nodes, spec.sphere_order)
        scale = max(scale, float(np.sum(np.abs(mprof) * rule.nodes ** (2 * n - 1) * rule.weights)))
    floor = 64 * EPS * scale
    return value + corr, corr_err, floor


def integrate_plane(f: Callable, n: int, spec: QuadratureSpec = QuadratureSpec(),
                    origin_singular: bool = False, algebraic_tail: bool = False,
                    refine: bool = True, magnitude: Optional[Callable] = None) -> QuadResult:
    """``int_{R^{2n}} f(x) dx`` with an order-refinement error estimate.

    ``f`` maps an array of shape (..., 2n) to shape (...).  Integrands that
    blow up at the origin slower than ``|x|^{-(2n-1)}`` are handled by the
    endpoint clustering of the tanh-sinh rule (``origin_singular`` is
    accepted for clarity; no node is ever placed at x = 0).  Set
    ``algebraic_tail`` for integrands decaying like ``|x|^{-2n-2}``.
    ``magnitude`` optionally gives the size of the terms that cancel inside
    ``f``; it sets the rounding floor of the error estimate.
    """
    _check_n(n)
    del origin_singular
    fine, corr, floor = _plane_once(f, n, spec, algebraic_tail, magnitude)
    if not refine:
        return QuadResult(fine, corr + floor)
    coarse, _, _ = _plane_once(f, n, spec.coarsened(), algebraic_tail)
    err = abs(fine - coarse) + corr + floor
    if err > max(spec.refine_rtol * abs(fine), 2 * floor, 1e-13):
        raise AccuracyError(
            f"plane integral did not converge under refinement: {fine} vs {coarse}",
            (fine, coarse),
        )
    return QuadResult(fine, err)


# ------------------------------------------------------------ extrapolation


class Extrapolation(NamedTuple):
    limit: complex
    error: float
    # Richardson columns; columns[j][k] is the j-th column entry built from points k..k+j
    columns: tuple
    powers: tuple


def _snap(p: float) -> float:
    r = round(p)
    return float(r) if abs(p - r) < 0.25 and r >= 1 else p


def extrapolate_limit(points: Sequence, noise: float = 0.0) -> Extrapolation:
    """Richardson extrapolation of ``v(beta)`` to ``beta -> 0``.

    ``points`` is a sequence of ``(beta_k, v_k)`` on a geometric schedule.
    Each column's leading power is estimated from the ratio of its last
    successive differences (snapped to an integer when close), which also
    handles ``beta log beta`` terms: they are eliminated by two columns of
    power one.  The error estimate is the difference between the chosen
    column and the previous one at the finest point.

    ``noise`` is an absolute level below which differences are treated as
    rounding; a sequence that settles below it is accepted as converged.
    """
    pts = list(points)
    if len(pts) < 3:
        raise InputError("extrapolation needs at least three points")
    betas = np.array([float(b) for b, _ in pts])
    vals = np.array([complex(v) for _, v in pts])
    if np.any(betas <= 0) or np.any(np.diff(betas) >= 0):
        raise InputError("schedule must be positive and strictly decreasing")
    q = betas[0] / betas[1]
    if not np.allclose(betas[:-1] / betas[1:], q, rtol=1e-9):
        raise InputError("schedule must be geometric")
    floor = max(noise, 64 * EPS * float(np.max(np.abs(vals))))

    columns = [vals]
    powers = []
    best = (vals[-1], abs(vals[-1] - vals[-2]), 0)
    col = vals
    while len(col) >= 3:
        d1, d2 = col[-3] - col[-2], col[-2] - col[-1]
        if abs(d1) <= floor and abs(d2) <= floor:
            # column has settled to rounding level
            spread = max(abs(d1), abs(d2))
            if spread <= best[1]:
                best = (col[-1], spread, len(columns) - 1)
            break
        if abs(d2) <= floor:
            # an isolated coincidence, not convergence: the ratio is meaningless
            break
        ratio = abs(d1 / d2)
        p = math.log(ratio) / math.log(q) if ratio > 0 else 0.0
        if not 0.25 <= p <= 16.0:
            break
        p = _snap(p)
        f = q ** p
        nxt = (f * col[1:] - col[:-1]) / (f - 1.0)
        powers.append(p)
        columns.append(nxt)
        err = abs(nxt[-1] - col[-1])
        if err <= best[1]:
            best = (nxt[-1], err, len(columns) - 1)
        col = nxt

    if len(columns) == 1 and best[1] > floor:
        # no column could be formed: the raw differences must at least shrink
        # geometrically, otherwise this is drift (e.g. log beta growth)
        d = np.abs(np.diff(vals))
        if d[-1] * q ** 0.25 > d[-2]:
            raise AccuracyError("sequence is not converging", tuple(vals[-2:]))
    return Extrapolation(complex(best[0]), float(best[1]), tuple(columns), tuple(powers))


def progressive_extrapolation(points: Sequence, noise: float = 0.0):
    """Extrapolants using the first k points, k = 3..len(points).

    Returns a list of (k, limit, error) triples; entries whose extrapolation
    failed carry ``None``.
    """
    out = []
    for k in range(3, len(points) + 1):
        try:
            ex = extrapolate_limit(points[:k], noise=noise)
            out.append((k, ex.limit, ex.error))
        except AccuracyError:
            out.append((k, None, None))
    return out


# ------------------------------------------------------------ principal values


def half_line_integral(h: Callable, a: float, order: int, scale: float = 1.0) -> complex:
    """int_a^inf h(z) dz for h decaying at least like z^{-2}.

    [a, a + scale] by tanh-sinh, [a + scale, inf) through z = a + scale/u.
    """
    z0, w0 = tanh_sinh_interval(a, a + scale, order)
    u, wu = tanh_sinh_interval(0.0, 1.0, order)
    z1 = a + scale / u
    w1 = wu * scale / u ** 2
    return complex(np.sum(w0 * h(z0)) + np.sum(w1 * h(z1)))


def pv_integral_real_line(g: Callable, epsilons: Optional[Sequence[float]] = None,
                          spec: QuadratureSpec = QuadratureSpec(), scale: float = 1.0):
    """Principal value ``lim_{eps->0} int_{|z|>=eps} g(z) dz``.

    Evaluates the excised integral on the schedule, as
    ``int_eps^inf (g(z) + g(-z)) dz``, and extrapolates.  Returns
    ``(limit, error, table)`` where ``table`` lists ``(eps, value)``.
    """
    eps = spec.pv_epsilon_schedule() if epsilons is None else np.asarray(epsilons, float)

    def h(z):
        return g(z) + g(-z)

    table = []
    mags = []
    for e in eps:
        table.append((float(e), half_line_integral(h, float(e), spec.radial_order, scale)))
        mags.append(abs(half_line_integral(lambda z: np.abs(h(z)), float(e), spec.radial_order, scale)))
    noise = 64 * EPS * max(mags)
    ex = extrapolate_limit(table, noise=noise)
    return ex.limit, ex.error, table
