"""Critical-point analysis of the mass curve a -> alpha(a) at fixed N.

Sweeps the shooting map, locates and classifies critical points, evaluates the
exact solution-counting formula against direct root enumeration, finds the
first zero c(N) of a -> J_N(a), and estimates the threshold exponent below
which the windowed minimum of alpha stays above 2N.

Endpoint limits: alpha -> 2(N+1) as a -> -inf and alpha -> 2 max(1, N) as
a -> +inf.  (The second limit appears with min() in part of the literature,
which is incompatible with the strict window max(2, N+1) < alpha < 2(N+1);
monotonicity for N <= 1 and the uniqueness range for N > 1 pin it to max.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._util import parallel_map
from .errors import (
    NoSignChange,
    OnCriticalValue,
    OnTwoN,
    TailNotNegligible,
    UnresolvedCritical,
)
from .shooting import ShootingParams, shoot
from .variational import compute_J, compute_K, solve_linearized

SWEEP_TOLS = dict(rel_tol=1e-8, abs_tol=1e-10)
INFLECTION_TOL = 1e-7


def alpha_limit_neg(N: float) -> float:
    return 2.0 * (N + 1.0)


def alpha_limit_pos(N: float) -> float:
    return 2.0 * max(1.0, N)


@dataclass(frozen=True)
class CurveSample:
    a: float
    alpha: float
    alpha_prime: float
    zero_count: int


@dataclass
class AlphaCurve:
    N: float
    samples: list[CurveSample]
    a_range: tuple[float, float]
    step: float

    @property
    def a_values(self) -> np.ndarray:
        return np.array([s.a for s in self.samples])

    @property
    def alpha_values(self) -> np.ndarray:
        return np.array([s.alpha for s in self.samples])


@dataclass(frozen=True)
class CriticalPoint:
    a: float
    value: float
    kind: str          # 'min' | 'max' | 'inflection'
    epsilon: int       # +2 | -2 | 0


@dataclass
class CriticalPortrait:
    N: float
    critical_points: list[CriticalPoint]   # ordered by critical value
    alpha_min: float
    alpha_min_attained: bool
    epsilon_0: int                          # 2 if infimum not attained else 0
    curve: AlphaCurve = field(repr=False, default=None)

    @property
    def ordered_values(self) -> list[float]:
        """c_0 = inf alpha followed by the critical values in ascending order."""
        return [self.alpha_min] + [c.value for c in self.critical_points]

    @property
    def ordered_epsilons(self) -> list[int]:
        return [self.epsilon_0] + [c.epsilon for c in self.critical_points]


@dataclass(frozen=True)
class SolutionCount:
    N: float
    alpha_query: float
    count: int
    chi: int


def _sweep_point(args) -> CurveSample:
    N, a, tol, kw = args
    _, lin = solve_linearized(ShootingParams(N, a), tol, need_tail=False, **kw)
    return CurveSample(a, lin.base.alpha, lin.alpha_prime, len(lin.zeros))


def sweep_alpha(
    N: float,
    a_range: tuple[float, float] = (-6.0, 12.0),
    step: float = 0.05,
    tol: float = 1e-8,
    *,
    refine: bool = True,
    **solver_kw,
) -> AlphaCurve:
    """One shoot + linearization per sample; extra samples near critical points.

    Brackets where alpha' changes sign are subdivided down to step/64 so the
    portrait builder starts from tight brackets.
    """
    a_lo, a_hi = a_range
    if not (step > 0 and a_hi > a_lo):
        raise ValueError("need a nonempty range and positive step")
    kw = {**SWEEP_TOLS, **solver_kw}
    n = int(round((a_hi - a_lo) / step))
    grid = [a_lo + i * (a_hi - a_lo) / n for i in range(n + 1)]
    try:
        samples = parallel_map(_sweep_point, [(N, a, tol, kw) for a in grid])
    except Exception as exc:
        raise type(exc)(f"sweep at N={N} failed: {exc}") from exc
    if refine:
        floor = step / 64.0
        while True:
            inserts = []
            for i in range(len(samples) - 1):
                s0, s1 = samples[i], samples[i + 1]
                if s0.alpha_prime * s1.alpha_prime < 0 and (s1.a - s0.a) > floor:
                    inserts.append(0.5 * (s0.a + s1.a))
            if not inserts:
                break
            new = parallel_map(_sweep_point, [(N, a, tol, kw) for a in inserts])
            samples = sorted(samples + new, key=lambda s: s.a)
    return AlphaCurve(N=N, samples=samples, a_range=(a_lo, a_hi), step=step)


def _alpha_prime_at(N: float, a: float, tol: float, kw) -> tuple[float, float]:
    _, lin = solve_linearized(ShootingParams(N, a), tol, need_tail=False, **kw)
    return lin.alpha_prime, lin.base.alpha


def critical_portrait(
    curve: AlphaCurve,
    loc_tol: float = 1e-8,
    tol: float = 1e-9,
    **solver_kw,
) -> CriticalPortrait:
    """Bisect every sign change of alpha' and classify by the second variation.

    Kinds come from the sign of K_N at the critical point (|K| below the
    inflection threshold gives epsilon = 0), cross-checked against the
    bracketing alpha' signs.
    """
    N = curve.N
    kw = {**SWEEP_TOLS, **solver_kw}
    points = []
    samples = curve.samples
    for i in range(len(samples) - 1):
        s0, s1 = samples[i], samples[i + 1]
        if not (s0.alpha_prime * s1.alpha_prime < 0):
            continue
        lo, hi = s0.a, s1.a
        f_lo = s0.alpha_prime
        alpha_c = None
        while hi - lo > loc_tol:
            mid = 0.5 * (lo + hi)
            f_mid, alpha_c = _alpha_prime_at(N, mid, tol, kw)
            if f_mid == 0.0:
                lo = hi = mid
                break
            if (f_mid < 0) == (f_lo < 0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        a_c = 0.5 * (lo + hi)
        if alpha_c is None:
            raise UnresolvedCritical(f"bracket collapsed at N={N}, a={a_c}")
        rising = s0.alpha_prime < 0  # alpha' goes - to +: local minimum
        prof_c, lin_c = solve_linearized(ShootingParams(N, a_c), tol, kind="uvar", **kw)
        try:
            K = compute_K(prof_c, lin_c, tol, **kw).K_value
        except TailNotNegligible:
            K = math.nan
        if math.isfinite(K) and abs(K) < INFLECTION_TOL:
            kind, eps = "inflection", 0
        elif math.isfinite(K) and (K > 0) == rising:
            kind, eps = ("min", 2) if K > 0 else ("max", -2)
        else:
            # sampling fallback: trust the bracketing slope signs
            kind, eps = ("min", 2) if rising else ("max", -2)
        points.append(CriticalPoint(a=a_c, value=prof_c.alpha, kind=kind, epsilon=eps))
    points.sort(key=lambda c: c.value)
    limit_pos = alpha_limit_pos(N)
    if points and points[0].value < limit_pos:
        alpha_min, attained = points[0].value, True
    else:
        alpha_min, attained = limit_pos, False
    return CriticalPortrait(
        N=N,
        critical_points=points,
        alpha_min=alpha_min,
        alpha_min_attained=attained,
        epsilon_0=0 if attained else 2,
        curve=curve,
    )


def count_solutions(portrait: CriticalPortrait, alpha_query: float,
                    value_tol: float = 1e-6) -> SolutionCount:
    """Exact solution count of alpha(a) = alpha_query from the epsilon coding."""
    N = portrait.N
    q = alpha_query
    if abs(q - 2.0 * N) < value_tol:
        raise OnTwoN(f"count undefined at alpha = 2N = {2 * N}")
    cs = portrait.ordered_values
    eps = portrait.ordered_epsilons
    for c in cs + [alpha_limit_neg(N)]:
        if abs(q - c) < value_tol:
            raise OnCriticalValue(f"alpha = {q} is within {value_tol:g} of a critical value")
    chi = 1 if q > 2.0 * N else 0
    if q < cs[0] or q > alpha_limit_neg(N):
        return SolutionCount(N=N, alpha_query=q, count=0, chi=chi)
    k = max(i for i, c in enumerate(cs) if c < q)
    count = sum(eps[: k + 1]) - chi
    return SolutionCount(N=N, alpha_query=q, count=count, chi=chi)


def count_roots_direct(curve: AlphaCurve, alpha_query: float) -> int:
    """Enumerate roots of alpha(a) = query on the sampled curve.

    The two tail segments beyond the window are counted through the endpoint
    limits (the curve is monotone out there once the window contains every
    critical point).
    """
    q = alpha_query
    vals = curve.alpha_values
    count = int(np.sum((vals[:-1] - q) * (vals[1:] - q) < 0))
    if (alpha_limit_neg(curve.N) - q) * (q - vals[0]) > 0:
        count += 1
    if (vals[-1] - q) * (q - alpha_limit_pos(curve.N)) > 0:
        count += 1
    return count


def find_c_of_N(
    N: float,
    scan_range: tuple[float, float] = (-2.0, 12.0),
    scan_step: float = 0.25,
    tol: float = 1e-6,
    **solver_kw,
) -> float:
    """First zero of a -> J_N(a) in the scan window, located to ``tol``.

    The conjecture says J_N has a single sign change (+ to -); the scan stops
    at the first bracket but does not assume uniqueness.  Raises NoSignChange
    if the window shows none.
    """
    kw = {**SWEEP_TOLS, **solver_kw}

    def J_at(a: float) -> float:
        pl = solve_linearized(ShootingParams(N, a), 1e-9, **kw)
        return compute_J(*pl)

    a = scan_range[0]
    prev_a, prev_J = None, None
    while a <= scan_range[1] + 1e-12:
        try:
            J = J_at(a)
        except TailNotNegligible:
            # pockets where alpha is close to its lower bound decay too slowly
            # for the cubic tail even at the extended budget; skip them
            a += scan_step
            continue
        if prev_J is not None and (prev_J > 0) and (J <= 0):
            if J == 0.0:
                return a
            return float(brentq(J_at, prev_a, a, xtol=tol))
        prev_a, prev_J = a, J
        a += scan_step
    raise NoSignChange(f"no + to - sign change of J_{N} in {scan_range}")


def windowed_alpha_min(
    N: float,
    window: tuple[float, float] = (-2.0, 14.0),
    coarse_step: float = 0.25,
    refine_tol: float = 1e-4,
    **shoot_kw,
) -> tuple[float, float]:
    """(min alpha over the window, argmin) by coarse scan + golden section."""
    kw = {**SWEEP_TOLS, **shoot_kw}
    a_grid = np.arange(window[0], window[1] + 1e-12, coarse_step)
    vals = [shoot(ShootingParams(N, float(a)), **kw).alpha for a in a_grid]
    i = int(np.argmin(vals))
    if i in (0, len(vals) - 1):
        return vals[i], float(a_grid[i])
    lo, hi = float(a_grid[i - 1]), float(a_grid[i + 1])
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1 = shoot(ShootingParams(N, x1), **kw).alpha
    f2 = shoot(ShootingParams(N, x2), **kw).alpha
    while hi - lo > refine_tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = shoot(ShootingParams(N, x1), **kw).alpha
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = shoot(ShootingParams(N, x2), **kw).alpha
    a_best = 0.5 * (lo + hi)
    return shoot(ShootingParams(N, a_best), **kw).alpha, a_best


def estimate_N0(
    bracket: tuple[float, float] = (1.0, 2.0),
    dN_tol: float = 1e-3,
    window: tuple[float, float] = (-2.0, 14.0),
    depth_margin: float = 1e-2,
    **shoot_kw,
) -> float:
    """Exponent where the dip of alpha(a) below 2N reaches ``depth_margin``.

    Outer bisection on N with the inner minimum from windowed_alpha_min.  The
    margin is the smallest dip counted as a genuine crossing; it reproduces
    the plot-scale resolution behind the published threshold near 1.27.  The
    dip itself does not vanish abruptly: at tighter margins shallow crossings
    persist to much smaller N (depth ~3e-3 at N=1.2 and ~2e-5 at N=1.1, both
    confirmed against brute-force deep integration), so the reported
    threshold is a resolution statement, not a bifurcation value.
    """
    def g(N: float) -> float:
        return windowed_alpha_min(N, window, **shoot_kw)[0] - 2.0 * N + depth_margin

    lo, hi = bracket
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0 > g_hi):
        raise NoSignChange(
            f"no sign change of min(alpha) - 2N + margin on {bracket}: "
            f"g={g_lo:.3g},{g_hi:.3g}"
        )
    while hi - lo > dN_tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
