"""The trace functionals tau, tau_z, Res and checkers for the identities between them.

Conventions
-----------
tau(k)    = (2 pi)^{-n} int R(x) dx
tau_z(k)  = n!/(2 pi)^{2n+1} lim_{beta->0} int [sigma_+ K_+ + sigma_- K_-] dx,
            K_pm = (beta |x|^2 + delta -/+ i s)^{-(n+1)}, delta = 0
Res(k)    = -1/(2 (2 pi)^n) int_{S^{2n-1}} a_{2n}
tau_pm    = tau_z at s = +1 / s = -1

The beta-regularized integral of a tailed symbol is split at |x| = 1.
Inside the unit ball the full symbol is integrated numerically.  Outside,
the remainder sigma - sum_{l<=n} w_{2l} (which decays like |x|^{-2n-2}) is
integrated numerically and the tail terms w_{2l} are integrated in closed
form after the substitution z = beta r^2, so nothing that grows as
beta -> 0 is ever formed by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import AccuracyError, InputError, ValidationError
from .quad import (
    EPS,
    QuadratureSpec,
    _check_n,
    extrapolate_limit,
    half_line_integral,
    integrate_plane,
    integrate_sphere,
    progressive_extrapolation,
    pv_integral_real_line,
    radial_rule,
    sphere_rule,
    gauss_legendre_interval,
)
from .symbols import PrincipalSymbol, epsilon, r_function, tail_consistency_check


class Estimate(NamedTuple):
    value: complex
    error: float


def minus_is_power(s: float, k: int) -> complex:
    """(-i s)^k by repeated multiplication of the literal -i*s."""
    base = complex(0.0, -float(s))
    out = 1 + 0j
    for _ in range(k):
        out *= base
    return out


@dataclass(frozen=True)
class TraceConstants:
    n: int
    epsilon: Tuple[int, ...] = field(init=False)
    c_main: complex = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")
        n = self.n
        object.__setattr__(self, "epsilon", tuple(epsilon(n, l) for l in range(n)))
        i_pow = 1j ** (n + 1) if n + 1 < 4 else [1, 1j, -1, -1j][(n + 1) % 4]
        object.__setattr__(self, "c_main", (2 * math.pi) ** (n + 1) / (2 * math.factorial(n) * i_pow))
        # adding the proposition at s = +1 and s = -1 must give the theorem:
        # c_prop(+1) tau_+ + c_prop(-1) tau_- = 2 tau
        cp, cm = self.c_prop(1.0), self.c_prop(-1.0)
        if not (abs(cm - (-1) ** (n + 1) * cp) <= 1e-12 * abs(cp)
                and abs(cp / 2 - self.c_main) <= 1e-12 * abs(cp)):
            raise ValidationError("theorem and proposition constants are inconsistent")

    def c_prop(self, s: float) -> complex:
        if s == 0:
            raise InputError("s must be nonzero")
        return (2 * math.pi) ** (self.n + 1) * minus_is_power(s, self.n + 1) / math.factorial(self.n)

    @property
    def tau_z_prefactor(self) -> float:
        return math.factorial(self.n) / (2 * math.pi) ** (2 * self.n + 1)


def _require_tail(symbol: PrincipalSymbol):
    rep = tail_consistency_check(symbol)
    if not rep.passed:
        raise ValidationError(f"symbol {symbol.name!r} has an inconsistent tail: {rep.message}")


def _check_s(s: float):
    if not np.isfinite(s) or s == 0:
        raise InputError("the central coordinate s must be a nonzero real")


# ------------------------------------------------------------ tau, Res


def tau(symbol: PrincipalSymbol, spec: QuadratureSpec = QuadratureSpec(),
        check_tail: bool = True) -> Estimate:
    """(2 pi)^{-n} int R."""
    n = symbol.n
    _check_n(n)
    if check_tail:
        _require_tail(symbol)
    res = integrate_plane(lambda x: r_function(symbol, x), n, spec,
                          origin_singular=not symbol.is_schwartz,
                          algebraic_tail=not symbol.is_schwartz,
                          magnitude=lambda x: _r_magnitude(symbol, x))
    scale = (2 * math.pi) ** (-n)
    return Estimate(res.value * scale, res.error * scale)


def _r_magnitude(symbol: PrincipalSymbol, x) -> np.ndarray:
    """Size of the terms that cancel in R, for the rounding floor."""
    out = np.abs(symbol.sigma_plus(x)) + np.abs(symbol.sigma_minus(x))
    if not symbol.is_schwartz:
        r = np.linalg.norm(x, axis=-1)
        th = x / r[..., None]
        for l in range(symbol.n):
            out = out + 2 * np.abs(symbol.tail.a(l, th)) * r ** (-2.0 * l)
    return out


def res(symbol: PrincipalSymbol, spec: QuadratureSpec = QuadratureSpec()) -> Estimate:
    """-1/(2 (2 pi)^n) times the sphere integral of a_{2n}; 0 without a tail."""
    n = symbol.n
    _check_n(n)
    if symbol.is_schwartz:
        return Estimate(0j, 0.0)
    scale = -1.0 / (2 * (2 * math.pi) ** n)

    def a2n(th):
        return symbol.tail.a(n, th)

    fine = integrate_sphere(a2n, n, spec)
    coarse = integrate_sphere(a2n, n, spec.coarsened())
    err = abs(fine - coarse) + 64 * EPS * abs(fine)
    return Estimate(fine * scale, err * abs(scale))


# ------------------------------------------------------------ beta-regularized integral


def _tail_radial_integral(n: int, l: int, beta: float, c: complex) -> Tuple[complex, float]:
    """int_1^inf r^{2n-1-2l} (beta r^2 - c)^{-(n+1)} dr in closed form.

    Returns the value and the sum of the magnitudes of the summed terms (a
    rounding-noise scale).  With z = beta r^2 the integral is
    beta^{l-n}/2 int_beta^inf z^m (z - c)^{-N} dz, m = n-l-1, N = n+1.
    """
    N = n + 1
    m = n - l - 1
    u = beta - c
    terms = []
    if m >= 0:
        for j in range(m + 1):
            terms.append(math.comb(m, j) * c ** (m - j) * u ** (j - N + 1) / (N - j - 1))
    else:
        # 1/(z (z-c)^N) = A/z + sum_j B_j (z-c)^{-j}; A + B_1 = 0 merges the logs
        A = (-c) ** (-N)
        terms.append(A * np.log(u / beta))
        for j in range(2, N + 1):
            B = (-1) ** (N - j) / c ** (N - j + 1)
            terms.append(B * u ** (1 - j) / (j - 1))
    pre = 0.5 * beta ** (l - n)
    return pre * complex(sum(terms)), pre * float(sum(abs(t) for t in terms))


class _Profiles(NamedTuple):
    n: int
    nodes: np.ndarray
    weights: np.ndarray          # radial weights times r^{2n-1}
    plus: np.ndarray             # sphere profile of sigma_+ (inside) / remainder (outside)
    minus: np.ndarray
    cutoff: Optional[float]
    cut_plus: complex
    cut_minus: complex
    moments: np.ndarray          # int_S a_{2l}, l = 0..n (empty for Schwartz)
    abs_plus: np.ndarray         # sphere integrals of |.|, for rounding estimates
    abs_minus: np.ndarray
    abs_moments: np.ndarray


def _sphere_profiles(symbol: PrincipalSymbol, sign: int, radii: np.ndarray, order: int,
                     chunk: int = 1 << 20):
    """Sphere integrals of the split integrand and of |sigma| at each radius."""
    n = symbol.n
    pts, w = sphere_rule(n, order)
    tailed = not symbol.is_schwartz
    weights = [(1 if sign > 0 else (-1) ** l) for l in range(n + 1)]
    amps = [symbol.tail.a(l, pts) for l in range(n + 1)] if tailed else []
    prof = np.empty(radii.shape, dtype=complex)
    aprof = np.empty(radii.shape)
    step = max(1, chunk // len(w))
    for lo in range(0, len(radii), step):
        r = radii[lo:lo + step]
        vals = symbol.sigma(sign)(r[:, None, None] * pts[None, :, :])
        aprof[lo:lo + step] = np.abs(vals) @ w
        if tailed:
            outer = r >= 1
            tail = sum(c * amps[l][None, :] * r[outer, None] ** (-2.0 * l)
                       for l, c in enumerate(weights))
            vals[outer] = vals[outer] - tail
        prof[lo:lo + step] = vals @ w
    return prof, aprof


def _profiles(symbol: PrincipalSymbol, spec: QuadratureSpec) -> _Profiles:
    n = symbol.n
    tailed = not symbol.is_schwartz
    rule = radial_rule(n, spec, algebraic_tail=tailed)
    r = rule.nodes
    weights = rule.weights * r ** (2 * n - 1)
    profs = {}
    absprofs = {}
    cuts = {}
    for sign in (1, -1):
        profs[sign], absprofs[sign] = _sphere_profiles(symbol, sign, r, spec.sphere_order)
        cuts[sign] = (_sphere_profiles(symbol, sign, np.array([rule.cutoff]), spec.sphere_order)[0][0]
                      if rule.cutoff is not None else 0j)
    moments = np.array([integrate_sphere(lambda th, l=l: symbol.tail.a(l, th), n, spec)
                        for l in range(n + 1)]) if tailed else np.zeros(0, dtype=complex)
    abs_moments = np.array([integrate_sphere(lambda th, l=l: np.abs(symbol.tail.a(l, th)), n, spec).real
                            for l in range(n + 1)]) if tailed else np.zeros(0)
    return _Profiles(n, r, weights, profs[1], profs[-1], rule.cutoff, cuts[1], cuts[-1], moments,
                     absprofs[1], absprofs[-1], abs_moments)


_TAIL_RULE = gauss_legendre_interval(0.0, 1.0, 48)


def _regularized(p: _Profiles, s: float, beta: float, delta: float) -> Tuple[complex, float]:
    """int [sigma_+ K_+ + sigma_- K_-] dx (no prefactor) and its noise scale."""
    n = p.n
    N = n + 1
    total = 0j
    scale = 0.0
    for sign, prof, aprof, cut in ((1, p.plus, p.abs_plus, p.cut_plus),
                                   (-1, p.minus, p.abs_minus, p.cut_minus)):
        c = complex(-delta, sign * s)
        kern = (beta * p.nodes ** 2 - c) ** (-N)
        terms = p.weights * prof * kern
        total += complex(np.sum(terms))
        scale += float(np.sum(p.weights * aprof * np.abs(kern)))
        if p.cutoff is not None:
            # beyond the cutoff the remainder profile is matched to C r^{-3}, and
            # int_R^inf r^{-3} K(beta r^2) dr = R^{-2} int_0^1 u K(beta R^2/u^2) du
            R = p.cutoff
            C = cut * R ** (2 * n + 2)
            u, wu = _TAIL_RULE
            total += C * R ** -2 * complex(np.sum(wu * u * (beta * R * R / (u * u) - c) ** (-N)))
        for l, (A, absA) in enumerate(zip(p.moments, p.abs_moments)):
            if absA == 0:
                continue
            t, mag = _tail_radial_integral(n, l, beta, c)
            f = 1 if sign > 0 else (-1) ** l
            total += f * A * t
            scale += absA * mag
    return total, scale


class LimitTable(NamedTuple):
    """A schedule of regularized values and the extrapolated limit."""

    parameter: str
    points: tuple                # (parameter value, value) pairs, prefactor included
    limit: complex
    error: float
    progressive: tuple           # (k, limit or None, error or None) using the first k points
    noise: float = 0.0           # rounding level of the values

    def rows(self) -> List[dict]:
        """CSV rows: beta, value_re, value_im, extrapolant_re, extrapolant_im, err_est."""
        prog = {k: (lim, err) for k, lim, err in self.progressive}
        out = []
        for k, (b, v) in enumerate(self.points, start=1):
            lim, err = prog.get(k, (None, None))
            out.append({
                "beta": b,
                "value_re": v.real,
                "value_im": v.imag,
                "extrapolant_re": None if lim is None else lim.real,
                "extrapolant_im": None if lim is None else lim.imag,
                "err_est": err,
            })
        return out


def _limit(parameter: str, values: Sequence[float], fn, noise_fn=None) -> LimitTable:
    pts = []
    noise = 0.0
    for b in values:
        v, sc = fn(float(b))
        pts.append((float(b), complex(v)))
        noise = max(noise, 64 * EPS * sc)
    ex = extrapolate_limit(pts, noise=noise)
    prog = progressive_extrapolation(pts, noise=noise)
    return LimitTable(parameter, tuple(pts), ex.limit, ex.error, tuple(prog), noise)


class TauZResult(NamedTuple):
    value: complex
    error: float
    table: LimitTable
    reduction: Optional[Estimate]   # beta-free value for Schwartz symbols


def tau_z(symbol: PrincipalSymbol, s: float, spec: QuadratureSpec = QuadratureSpec(),
          check_tail: bool = True) -> TauZResult:
    """Evaluation trace at the central point (0, s) via the beta -> 0 limit.

    The error combines the extrapolation estimate with the change under a
    coarser quadrature.  For Schwartz symbols the beta-free value
    n!/(2 pi)^{2n+1} [int sigma_+/(-is)^{n+1} + int sigma_-/(is)^{n+1}] is
    also computed and must agree.
    """
    _check_s(s)
    n = symbol.n
    _check_n(n)
    if check_tail:
        _require_tail(symbol)
    pre = TraceConstants(n).tau_z_prefactor
    tables = []
    for sp in (spec, spec.coarsened()):
        prof = _profiles(symbol, sp)
        tables.append(_limit("beta", sp.beta_schedule(),
                             lambda b, prof=prof: _scaled(_regularized(prof, s, b, 0.0), pre)))
    fine, coarse = tables
    err = fine.error + abs(fine.limit - coarse.limit)
    reduction = None
    if symbol.is_schwartz:
        reduction = _schwartz_reduction(symbol, s, spec)
        gap = abs(reduction.value - fine.limit)
        if gap > 10 * (err + reduction.error) + 1e-13:
            raise AccuracyError(
                f"tau_z beta-limit {fine.limit} disagrees with the beta-free value {reduction.value}",
                (fine.limit, reduction.value),
            )
    return TauZResult(fine.limit, err, fine, reduction)


def _scaled(pair, pre):
    return pair[0] * pre, pair[1] * pre


def _schwartz_reduction(symbol: PrincipalSymbol, s: float, spec: QuadratureSpec) -> Estimate:
    n = symbol.n
    pre = TraceConstants(n).tau_z_prefactor
    ip = integrate_plane(symbol.sigma_plus, n, spec)
    im = integrate_plane(symbol.sigma_minus, n, spec)
    kp = 1.0 / minus_is_power(s, n + 1)
    km = 1.0 / minus_is_power(-s, n + 1)
    val = pre * (ip.value * kp + im.value * km)
    err = pre * (ip.error * abs(kp) + im.error * abs(km))
    return Estimate(val, err)


def regularized_center_ft(symbol: PrincipalSymbol, s: float, beta: float, delta: float = 0.0,
                          spec: QuadratureSpec = QuadratureSpec()) -> Estimate:
    """n!/(2 pi)^{2n+1} int [sigma_+/(beta r^2 + delta - is)^{n+1} + sigma_-/(beta r^2 + delta + is)^{n+1}]."""
    _check_s(s)
    if beta < 0 or delta < 0:
        raise InputError("beta and delta must be nonnegative")
    if beta == 0 and delta == 0:
        raise InputError("beta = delta = 0 is the unregularized limit; use tau_z")
    if beta == 0 and not symbol.is_schwartz:
        raise InputError("beta = 0 diverges for symbols with a homogeneous tail")
    n = symbol.n
    _check_n(n)
    pre = TraceConstants(n).tau_z_prefactor
    vals = []
    for sp in (spec, spec.coarsened()):
        vals.append(_regularized(_profiles(symbol, sp), s, beta, delta))
    (v, sc), (vc, _) = vals
    return Estimate(pre * v, pre * (abs(v - vc) + 64 * EPS * sc))


class OrderStudy(NamedTuple):
    order: str                    # "delta-then-beta" or "beta-then-delta"
    inner: tuple                  # inner LimitTable per outer parameter value (None if it failed)
    outer: Optional[LimitTable]
    message: str


def limit_order_study(symbol: PrincipalSymbol, s: float, spec: QuadratureSpec = QuadratureSpec(),
                      order: str = "delta-then-beta") -> OrderStudy:
    """Take the two regularization limits in the given order.

    For "delta-then-beta", each beta on the schedule gets a delta -> 0
    extrapolation and the results are then extrapolated in beta.  The other
    order is reported as well; it diverges for symbols with a tail since the
    delta-regularized integral alone is not convergent at beta = 0.
    """
    _check_s(s)
    n = symbol.n
    _check_n(n)
    pre = TraceConstants(n).tau_z_prefactor
    prof = _profiles(symbol, spec)
    if order == "delta-then-beta":
        outer_name, outer_vals, inner_name, inner_vals = "beta", spec.beta_schedule(), "delta", spec.delta_schedule()
    elif order == "beta-then-delta":
        outer_name, outer_vals, inner_name, inner_vals = "delta", spec.delta_schedule(), "beta", spec.beta_schedule()
    else:
        raise InputError(f"unknown limit order {order!r}")

    def value(b, d):
        return _scaled(_regularized(prof, s, b, d), pre)

    inner = []
    outer_pts = []
    failures = []
    for o in outer_vals:
        if order == "delta-then-beta":
            fn = lambda d, o=o: value(float(o), d)
            # delta = 0 is a legitimate evaluation here; extrapolate on the delta schedule
        else:
            fn = lambda b, o=o: value(b, float(o))
        try:
            t = _limit(inner_name, inner_vals, fn)
        except AccuracyError as exc:
            inner.append(None)
            failures.append(f"{inner_name} -> 0 failed at {outer_name}={float(o):g}: {exc}")
            continue
        inner.append(t)
        outer_pts.append((float(o), t.limit, t.error))
    outer = None
    msg = "; ".join(failures) if failures else "ok"
    if len(outer_pts) >= 3 and not failures:
        noise = max(e for _, _, e in outer_pts)
        pts = [(o, v) for o, v, _ in outer_pts]
        try:
            ex = extrapolate_limit(pts, noise=noise)
            prog = progressive_extrapolation(pts, noise=noise)
            outer = LimitTable(outer_name, tuple(pts), ex.limit, ex.error + noise, tuple(prog), noise)
        except AccuracyError as exc:
            msg = f"{outer_name} -> 0 failed: {exc}"
    elif not failures:
        msg = "too few converged inner limits"
    return OrderStudy(order, tuple(inner), outer, msg)


def error_trend_is_monotone(table: LimitTable, last: int = 4) -> bool:
    """Progressive error estimates do not increase over the last ``last`` schedule points.

    An increase that stays below the table's rounding level is not counted.
    """
    errs = [e for _, _, e in table.progressive[-last:]]
    if len(errs) < last or any(e is None for e in errs):
        return False
    return all(b <= a or b <= table.noise for a, b in zip(errs[:-1], errs[1:]))


def gamma_integral_check(n: int, c: complex, spec: QuadratureSpec = QuadratureSpec()) -> Tuple[complex, float]:
    """int_0^inf t^n e^{-ct} dt against n!/c^{n+1}; returns (value, |difference|)."""
    c = complex(c)
    if c.real <= 0:
        raise InputError("the Gamma integral needs Re c > 0")
    rule = radial_rule(1, spec.replace(truncation_radius=max(spec.truncation_radius, 40.0 / c.real)))
    t = rule.nodes
    val = complex(np.sum(rule.weights * t ** n * np.exp(-c * t)))
    exact = math.factorial(n) / c ** (n + 1)
    return val, abs(val - exact)


# ------------------------------------------------------------ identities


class TheoremCheck(NamedTuple):
    residual: float
    error: float
    lhs: complex
    rhs: complex
    tau: Estimate
    tau_plus: TauZResult
    tau_minus: TauZResult


def check_main_theorem(symbol: PrincipalSymbol, spec: QuadratureSpec = QuadratureSpec(),
                       tau_value: Optional[Estimate] = None,
                       tau_plus: Optional[TauZResult] = None,
                       tau_minus: Optional[TauZResult] = None) -> TheoremCheck:
    """|tau - c_main (tau_+ - (-1)^n tau_-)| with a combined error estimate."""
    n = symbol.n
    const = TraceConstants(n)
    t = tau_value or tau(symbol, spec)
    tp = tau_plus or tau_z(symbol, 1.0, spec)
    tm = tau_minus or tau_z(symbol, -1.0, spec)
    rhs = const.c_main * (tp.value - (-1) ** n * tm.value)
    err = t.error + abs(const.c_main) * (tp.error + tm.error)
    return TheoremCheck(abs(t.value - rhs), err, t.value, rhs, t, tp, tm)


class PropositionCheck(NamedTuple):
    s: float
    residual: float
    error: float
    lhs: complex
    rhs: complex
    tau_z: TauZResult


def check_proposition(symbol: PrincipalSymbol, s: float, spec: QuadratureSpec = QuadratureSpec(),
                      tau_value: Optional[Estimate] = None, res_value: Optional[Estimate] = None,
                      tau_z_value: Optional[TauZResult] = None) -> PropositionCheck:
    """|c_prop(s) tau_z - (tau + sign(s) pi i Res)|."""
    _check_s(s)
    const = TraceConstants(symbol.n)
    t = tau_value or tau(symbol, spec)
    r = res_value or res(symbol, spec)
    tz = tau_z_value or tau_z(symbol, s, spec)
    cp = const.c_prop(s)
    sgn = 1.0 if s > 0 else -1.0
    lhs = cp * tz.value
    rhs = t.value + sgn * math.pi * 1j * r.value
    err = abs(cp) * tz.error + t.error + math.pi * r.error
    return PropositionCheck(float(s), abs(lhs - rhs), err, lhs, rhs, tz)


# ------------------------------------------------------------ lemma checks


class LemmaCheck(NamedTuple):
    value: complex
    expected: complex
    residual: float
    error: float
    table: tuple


def check_I_l_vanishing(l: int, n: int, s: float, spec: QuadratureSpec = QuadratureSpec()) -> LemmaCheck:
    """int_R z^{n-l-1} (beta z - i s)^{-(n+1)} dz on the beta schedule, extrapolated; expected 0."""
    _check_s(s)
    if not 0 <= l <= n - 1:
        raise InputError(f"l must lie in 0..n-1 = 0..{n - 1}")
    m = n - l - 1
    N = n + 1
    order = 2 * spec.radial_order
    pts = []
    noise = 0.0
    for beta in spec.beta_schedule():
        def g(z, beta=beta):
            return z ** m / (beta * z - 1j * s) ** N

        def h(z, g=g):
            return g(z) + g(-z)

        scale = abs(s) / beta
        v = half_line_integral(h, 0.0, order, scale)
        mag = half_line_integral(lambda z, g=g: np.abs(g(z)) + np.abs(g(-z)), 0.0, order, scale)
        pts.append((float(beta), v))
        noise = max(noise, 64 * EPS * abs(mag))
    ex = extrapolate_limit(pts, noise=noise)
    return LemmaCheck(ex.limit, 0j, abs(ex.limit), ex.error + noise, tuple(pts))


def pv_expected(n: int, s: float) -> complex:
    """Residue-theorem value of PV int z^{-1} (z - is)^{-(n+1)} dz: -/+ pi i/(-is)^{n+1} for s >/< 0."""
    _check_s(s)
    sgn = 1.0 if s > 0 else -1.0
    return -sgn * math.pi * 1j / minus_is_power(s, n + 1)


def pv_integrand(n: int, s: float):
    N = n + 1
    return lambda z: 1.0 / (z * (z - 1j * s) ** N)


def check_I_n_pv(n: int, s: float, spec: QuadratureSpec = QuadratureSpec()) -> LemmaCheck:
    """Excised-interval limit of int z^{-1}(z - is)^{-(n+1)} against the residue value."""
    _check_s(s)
    val, err, table = pv_integral_real_line(pv_integrand(n, s), spec=spec, scale=abs(s))
    exp = pv_expected(n, s)
    return LemmaCheck(val, exp, abs(val - exp), err, tuple(table))


def pv_brute_force(n: int, s: float, order: int = 200, plus_sign: bool = False) -> complex:
    """Independent PV value: the symmetrized integrand is regular at 0.

    int_0^inf [g(z) + g(-z)] dz with Gauss-Legendre on z = |s| t/(1-t).
    ``plus_sign`` uses (z + is) in place of (z - is).
    """
    _check_s(s)
    N = n + 1
    shift = -1j * s if plus_sign else 1j * s
    t, w = gauss_legendre_interval(0.0, 1.0, order)
    z = abs(s) * t / (1 - t)
    jac = abs(s) / (1 - t) ** 2
    # (1/z)[(z-c)^{-N} - (-z-c)^{-N}] evaluated without cancellation at small z
    a = (z - shift) ** (-N)
    b = (-z - shift) ** (-N)
    h = (a - b) / z
    return complex(np.sum(w * jac * h))


# ------------------------------------------------------------ report


@dataclass
class TraceReport:
    name: str
    n: int
    tau: Estimate
    tau_plus: TauZResult
    tau_minus: TauZResult
    res: Estimate
    theorem_residual: float
    theorem_error: float
    proposition: Tuple[PropositionCheck, ...]
    spec: QuadratureSpec

    @property
    def proposition_residual_pos(self) -> float:
        vals = [p.residual for p in self.proposition if p.s > 0]
        return max(vals) if vals else 0.0

    @property
    def proposition_residual_neg(self) -> float:
        vals = [p.residual for p in self.proposition if p.s < 0]
        return max(vals) if vals else 0.0

    def to_dict(self) -> dict:
        def c(z):
            return {"re": float(z.real), "im": float(z.imag)}

        def est(e):
            return {"value": c(e.value), "error": float(e.error)}

        def table(t: LimitTable):
            return {"parameter": t.parameter, "rows": [
                {k: v for k, v in row.items()} for row in t.rows()]}

        return {
            "name": self.name,
            "n": self.n,
            "tau": est(self.tau),
            "tau_plus": est(self.tau_plus),
            "tau_minus": est(self.tau_minus),
            "res": est(self.res),
            "theorem_residual": float(self.theorem_residual),
            "theorem_error": float(self.theorem_error),
            "proposition_residual_pos": float(self.proposition_residual_pos),
            "proposition_residual_neg": float(self.proposition_residual_neg),
            "proposition": [
                {"s": p.s, "residual": float(p.residual), "error": float(p.error),
                 "lhs": c(p.lhs), "rhs": c(p.rhs), "tau_z": est(p.tau_z)}
                for p in self.proposition
            ],
            "convergence": {
                "tau_plus": table(self.tau_plus.table),
                "tau_minus": table(self.tau_minus.table),
            },
            "spec": self.spec.to_dict(),
        }


def trace_report(symbol: PrincipalSymbol, spec: QuadratureSpec = QuadratureSpec(),
                 s_values: Sequence[float] = (1.0, -1.0, 2.0, -0.5)) -> TraceReport:
    _check_n(symbol.n)
    _require_tail(symbol)
    t = tau(symbol, spec, check_tail=False)
    r = res(symbol, spec)
    cache = {}
    for s in sorted(set(float(v) for v in s_values) | {1.0, -1.0}, key=lambda v: (-np.sign(v), abs(v))):
        cache[s] = tau_z(symbol, s, spec, check_tail=False)
    thm = check_main_theorem(symbol, spec, t, cache[1.0], cache[-1.0])
    props = tuple(check_proposition(symbol, s, spec, t, r, cache[float(s)]) for s in s_values)
    return TraceReport(symbol.name, symbol.n, t, cache[1.0], cache[-1.0], r,
                       thm.residual, thm.error, props, spec)
