"""Acceptance suite: the exit criteria of the build, one callable per criterion.

Each criterion returns a CriterionResult with its pinned tolerances baked in;
the CLI `verify` command and the pytest acceptance module both run these.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .branches import continue_branch, count_at_level, detect_bifurcations, kelvin_pairing
from .curves import (
    count_roots_direct,
    count_solutions,
    critical_portrait,
    estimate_N0,
    find_c_of_N,
    sweep_alpha,
)
from .errors import TailNotNegligible
from .legendre import bifurcation_exponent, legendre_residual
from .shooting import STANDARD_T_GRID, ShootingParams, a_star, explicit_solution, shoot
from .variational import (
    compute_J,
    compute_K,
    largest_zero_velocity,
    largest_zero_velocity_fd,
    second_difference_alpha,
    solve_linearized,
)

TIGHT = dict(rel_tol=3e-14, abs_tol=1e-15)
SEED = 20080317


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def criterion_1() -> tuple[bool, str]:
    """Closed-form anchor at N in {1, 2, 4, 10, 25}."""
    t0 = time.time()
    worst_alpha, worst_point = 0.0, 0.0
    for N in (1.0, 2.0, 4.0, 10.0, 25.0):
        p = shoot(ShootingParams(N, a_star(N)), **TIGHT)
        worst_alpha = max(worst_alpha, abs(p.alpha - (N + 2.0)) / (N + 2.0))
        ex = explicit_solution(N)
        dv = np.max(np.abs(p.v(STANDARD_T_GRID)[0] - ex.v(STANDARD_T_GRID)[0]))
        worst_point = max(worst_point, float(dv))
    dt = time.time() - t0
    ok = worst_alpha < 1e-6 and worst_point < 1e-8 and dt < 5.0
    return ok, (f"max rel alpha err {worst_alpha:.2e} (<1e-6), "
                f"max pointwise err {worst_point:.2e} (<1e-8), {dt:.1f}s (<5s)")


def criterion_2(n_samples: int = 500) -> tuple[bool, str]:
    """Pohozaev window, strict, over random (N, a) samples."""
    rng = np.random.default_rng(SEED)
    worst = math.inf
    for _ in range(n_samples):
        N = float(np.exp(rng.uniform(math.log(0.3), math.log(30.0))))
        a = float(rng.uniform(-6.0, 6.0))
        alpha = shoot(ShootingParams(N, a), 1e-8, rel_tol=1e-8, abs_tol=1e-10).alpha
        lo, hi = max(2.0, N + 1.0), 2.0 * (N + 1.0)
        margin = min(alpha - lo, hi - alpha)
        worst = min(worst, margin)
        if margin <= 0.0:
            return False, f"violation at N={N:.4f}, a={a:.4f}: alpha={alpha:.8f}"
    return True, f"{n_samples} samples strictly inside; smallest margin {worst:.3e}"


def criterion_3() -> tuple[bool, str]:
    """Bifurcation exponents located to 1e-3; alpha' vanishes at the exact N_k."""
    t0 = time.time()
    crossings = detect_bifurcations(4, dN_tol=1e-3)
    dev = max(abs(N_hat - bifurcation_exponent(k)) for k, N_hat, _ in crossings)
    slopes = []
    for k in (2, 3, 4):
        N_k = bifurcation_exponent(k)
        _, lin = solve_linearized(ShootingParams(N_k, a_star(N_k)),
                                  rel_tol=1e-12, abs_tol=1e-14, need_tail=False)
        slopes.append(abs(lin.alpha_prime))
    dt = time.time() - t0
    ok = dev < 1e-3 and max(slopes) < 1e-5 and dt < 60.0
    return ok, (f"crossing dev {dev:.2e} (<1e-3), |alpha'(a*)| max {max(slopes):.2e} "
                f"(<1e-5), {dt:.1f}s (<60s)")


def criterion_4() -> tuple[bool, str]:
    """phi at (N_k, a*) equals the normalized P_k with exactly k zeros, k = 2, 3."""
    worst = 0.0
    for k in (2, 3):
        N_k = bifurcation_exponent(k)
        _, lin = solve_linearized(ShootingParams(N_k, a_star(N_k)),
                                  rel_tol=1e-12, abs_tol=1e-14)
        if len(lin.zeros) != k:
            return False, f"k={k}: {len(lin.zeros)} zeros, expected {k}"
        worst = max(worst, legendre_residual(k, lin))
    return worst < 1e-7, f"max |phi - P_k| = {worst:.2e} (<1e-7); zero counts exact"


def criterion_5() -> tuple[bool, str]:
    """Quadrature J against the exact triple-product values."""
    vals = {}
    for N in (4.0, 10.0, 18.0):
        pl = solve_linearized(ShootingParams(N, a_star(N)), rel_tol=1e-12, abs_tol=1e-14)
        vals[N] = compute_J(*pl)
    ok = (abs(vals[4.0] - 12.0 / 35.0) < 1e-6
          and abs(vals[10.0]) < 1e-6 and vals[18.0] > 0.0)
    return ok, (f"J(4)={vals[4.0]:.9f} (12/35 within 1e-6), "
                f"J(10)={vals[10.0]:.2e} (0 within 1e-6), J(18)={vals[18.0]:.6f} (>0)")


def criterion_6(n_pairs: int = 20) -> tuple[bool, str]:
    """alpha''(a) = 2 K_N(a) against a central second difference, 1e-3 relative."""
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    tested = 0
    while tested < n_pairs:
        N = float(rng.uniform(2.5, 16.0))
        a = a_star(N) + float(rng.uniform(-1.2, 1.2))
        try:
            pl = solve_linearized(ShootingParams(N, a), kind="uvar",
                                  rel_tol=1e-11, abs_tol=1e-13)
            sv = compute_K(*pl)
        except TailNotNegligible:
            continue
        if abs(2.0 * sv.K_value) <= 0.01:
            continue
        fd = second_difference_alpha(ShootingParams(N, a))
        if abs(fd) <= 0.01:
            continue
        rel = abs(2.0 * sv.K_value - fd) / abs(fd)
        worst = max(worst, rel)
        tested += 1
        if rel >= 1e-3:
            return False, f"mismatch at N={N:.4f}, a={a:.4f}: rel {rel:.2e}"
    return True, f"{tested} pairs, worst relative deviation {worst:.2e} (<1e-3)"


def criterion_7() -> tuple[bool, str]:
    """Threshold exponent reproduction."""
    t0 = time.time()
    n0 = estimate_N0((1.0, 2.0))
    dt = time.time() - t0
    ok = 1.25 < n0 < 1.29 and dt < 300.0
    return ok, f"N0 = {n0:.4f} (in (1.25, 1.29)), {dt:.1f}s (<300s)"


def criterion_8() -> tuple[bool, str]:
    """Multiplicity at level N+2 across the k = 2, 3, 4 regimes."""
    t0 = time.time()
    counts = {N: count_at_level(N) for N in (5.0, 11.0, 19.0)}
    dt = time.time() - t0
    ok = counts[5.0] >= 2 and counts[11.0] >= 4 and counts[19.0] >= 6 and dt < 180.0
    return ok, (f"counts {counts[5.0]}/{counts[11.0]}/{counts[19.0]} "
                f"(>=2/4/6), {dt:.1f}s (<180s)")


def criterion_9() -> tuple[bool, str]:
    """Counting formula equals direct enumeration for generic levels."""
    rng = np.random.default_rng(SEED + 9)
    checked = 0
    for N in (3.0, 6.0, 12.0, 25.0):
        curve = sweep_alpha(N, (-6.0, 12.0), 0.1)
        portrait = critical_portrait(curve)
        crit_vals = portrait.ordered_values + [2.0 * N, 2.0 * (N + 1.0)]
        lo = portrait.alpha_min + 0.05
        hi = 2.0 * (N + 1.0) - 0.05
        done = 0
        while done < 10:
            q = float(rng.uniform(lo, hi))
            if min(abs(q - c) for c in crit_vals) < 1e-3:
                continue
            formula = count_solutions(portrait, q).count
            direct = count_roots_direct(curve, q)
            if formula != direct:
                return False, (f"N={N}, alpha={q:.6f}: formula {formula} != "
                               f"enumeration {direct}")
            done += 1
            checked += 1
    return True, f"{checked} (N, alpha) pairs: formula == enumeration exactly"


def criterion_10() -> tuple[bool, str]:
    """Kelvin pairing of the k = 3 half-branches and the k = 2 minus branch."""
    arc3p = continue_branch(3, +1, N_window=(2.05, 13.0), max_points=40)
    arc3m = continue_branch(3, -1, N_window=(2.05, 13.0), max_points=40)
    arc2m = continue_branch(2, -1, N_window=(2.05, 8.0), max_points=40)
    rep_pm = kelvin_pairing(arc3p, arc3m, n_samples=10)
    rep_mp = kelvin_pairing(arc3m, arc3p, n_samples=10)
    rep_2 = kelvin_pairing(arc2m, None, n_samples=10)
    worst = max(rep_pm.max_residual, rep_mp.max_residual, rep_2.max_residual)
    ok = rep_pm.ok and rep_mp.ok and rep_2.ok
    return ok, (f"residuals: C3+->C3- {rep_pm.max_residual:.2e}, "
                f"C3-->C3+ {rep_mp.max_residual:.2e}, C2- self {rep_2.max_residual:.2e} "
                f"(all <1e-4); worst {worst:.2e}")


def criterion_11() -> tuple[bool, str]:
    """Tangency of c(N) with a*_N at odd exponents; strict inequality elsewhere."""
    c10, c28 = find_c_of_N(10.0), find_c_of_N(28.0)
    d10 = abs(c10 - a_star(10.0))
    d28 = abs(c28 - a_star(28.0))
    gaps = {N: find_c_of_N(N) - a_star(N) for N in (4.0, 6.0, 18.0)}
    ok = d10 < 1e-4 and d28 < 1e-4 and all(g > 0 for g in gaps.values())
    gap_s = ", ".join(f"c({int(N)})-a*={g:+.4f}" for N, g in gaps.items())
    return ok, f"|c(10)-a*|={d10:.2e}, |c(28)-a*|={d28:.2e} (<1e-4); {gap_s} (>0)"


def criterion_12() -> tuple[bool, str]:
    """Largest-zero velocity formula against finite differences, 5 percent."""
    points = [
        (6.0, a_star(6.0) + 0.5),
        (8.0, a_star(8.0) + 0.3),
        (5.0, a_star(5.0)),
        (12.0, a_star(12.0) - 0.4),
        (25.0, 1.0),
    ]
    worst = 0.0
    for N, a in points:
        params = ShootingParams(N, a)
        v = largest_zero_velocity(params, rel_tol=1e-11, abs_tol=1e-13)
        fd = largest_zero_velocity_fd(params, h=1e-3, rel_tol=1e-11, abs_tol=1e-13)
        rel = abs(v - fd) / max(abs(fd), 1e-12)
        worst = max(worst, rel)
        if rel >= 0.05:
            return False, f"mismatch at N={N}, a={a:.4f}: rel {rel:.3f}"
    return True, f"5 points, worst relative deviation {worst:.2%} (<5%)"


CRITERIA = {
    1: ("closed-form anchor", criterion_1),
    2: ("Pohozaev window", criterion_2),
    3: ("spectral bifurcation points", criterion_3),
    4: ("Legendre oracle", criterion_4),
    5: ("Gaunt cross-check", criterion_5),
    6: ("second-variation identity", criterion_6),
    7: ("N0 reproduction", criterion_7),
    8: ("multiplicity at level N+2", criterion_8),
    9: ("counting formula equivalence", criterion_9),
    10: ("Kelvin pairing", criterion_10),
    11: ("c(N) tangency", criterion_11),
    12: ("largest-zero dynamics", criterion_12),
}


def run_criterion(cid: int) -> CriterionResult:
    name, fn = CRITERIA[cid]
    t0 = time.time()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, not an abort
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(cid=cid, name=name, passed=passed,
                           detail=detail, elapsed=time.time() - t0)


def run_acceptance(ids=None, echo: bool = False) -> list[CriterionResult]:
    results = []
    for cid in sorted(ids or CRITERIA):
        r = run_criterion(cid)
        results.append(r)
        if echo:
            print(f"{'PASS' if r.passed else 'FAIL'} C{r.cid:<2d} {r.name}: "
                  f"{r.detail} [{r.elapsed:.1f}s]", flush=True)
    return results
