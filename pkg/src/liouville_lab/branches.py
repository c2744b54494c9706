"""Branches of nontrivial solutions at mass level alpha = N + 2.

The PDE branches (mu, f) with f = u - u*_N are realized in shooting
coordinates as the level set G(N, a) := alpha_N(a) - (N+2) = 0 in the (N, a)
plane, excluding the trivial curve a = a*_N (on which G vanishes identically).
Arcs are traced by pseudo-arclength continuation seeded next to the
bifurcation points (N_k, a*_{N_k}); each accepted point records the number of
zeros of f, which must stay equal to k along the arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CrossingNotFound,
    PairingFailure,
    SeedFailure,
    ZeroCountJump,
)
from .legendre import bifurcation_exponent, eigenvalue
from .shooting import ShootingParams, a_star, shoot, solve_radial
from .variational import solve_linearized

BRANCH_TOLS = dict(rel_tol=1e-10, abs_tol=1e-12)
LEVEL_TOL = 1e-8


@dataclass(frozen=True)
class BranchPoint:
    N: float
    a: float
    arclength_s: float
    f_at_zero: float          # a - a*_N
    zero_count: int

    @property
    def mu(self) -> float:
        return 2.0 * (self.N + 2.0)


@dataclass
class BranchArc:
    k: int
    sign: int                  # +1 | -1
    points: list[BranchPoint]
    origin: tuple[float, float]
    terminated_by: str         # 'budget' | 'continuation_failure' | 'N_window_exit'

    @property
    def N_values(self) -> np.ndarray:
        return np.array([p.N for p in self.points])

    @property
    def a_values(self) -> np.ndarray:
        return np.array([p.a for p in self.points])


def level_gap(N: float, a: float, tol: float = 1e-9, **kw) -> float:
    """G(N, a) = alpha(a) - (N + 2) at fixed N."""
    kw = {**BRANCH_TOLS, **kw}
    return shoot(ShootingParams(N, a), tol, **kw).alpha - (N + 2.0)


def zero_count_of_f(N: float, a: float, tol: float = 1e-9, **kw) -> int:
    """Number of zeros of f = u_a - u*_N in (0, r_max)."""
    kw = {**BRANCH_TOLS, **kw}
    _, traj, _ = solve_radial(ShootingParams(N, a), tol, kind="uf", track=2, **kw)
    return len(traj.events)


def detect_bifurcations(k_max: int, dN_tol: float = 1e-3, **kw) -> list[tuple[int, float, float]]:
    """Locate the sign changes of N -> alpha'(a*_N) near each exponent N_k.

    Returns (k, located crossing, mu_k) for k = 2..k_max; the crossing must
    fall within dN_tol of the exact N_k = k(k+1) - 2.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    kw = {**BRANCH_TOLS, **kw}

    def slope(N: float) -> float:
        _, lin = solve_linearized(ShootingParams(N, a_star(N)), need_tail=False, **kw)
        return lin.alpha_prime

    out = []
    for k in range(2, k_max + 1):
        N_k = bifurcation_exponent(k)
        lo, hi = N_k - 0.4, N_k + 0.4
        f_lo, f_hi = slope(lo), slope(hi)
        if f_lo * f_hi >= 0:
            raise CrossingNotFound(
                f"alpha'(a*_N) does not change sign on [{lo}, {hi}] (k={k})"
            )
        N_hat = float(brentq(slope, lo, hi, xtol=dN_tol / 4))
        out.append((k, N_hat, eigenvalue(k)))
    return out


def _seed_branch(k: int, sign: int, delta: float, tol: float, kw) -> tuple[float, float]:
    """Nontrivial root of G(., a_seed) near N_k with a_seed = a*_{N_k} + sign*delta.

    The scan rejects the trivial curve (where a*_N equals a_seed) and takes the
    remaining root closest to N_k.
    """
    N_k = bifurcation_exponent(k)
    a_seed = a_star(N_k) + sign * delta
    grid = np.arange(N_k - 1.2, N_k + 1.6001, 0.04)
    vals = [level_gap(float(N), a_seed, tol, **kw) for N in grid]
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0 or vals[i] * vals[i + 1] >= 0:
            continue
        root = float(brentq(lambda N: level_gap(N, a_seed, tol, **kw),
                            float(grid[i]), float(grid[i + 1]), xtol=1e-10))
        if abs(a_star(root) - a_seed) < delta / 4.0:
            continue  # that's the trivial curve
        roots.append(root)
    if not roots:
        raise SeedFailure(
            f"no nontrivial level-set root near (N_{k}, a*{'+' if sign > 0 else '-'}{delta})"
        )
    return min(roots, key=lambda N: abs(N - N_k)), a_seed


def continue_branch(
    k: int,
    sign: int,
    N_window: tuple[float, float] = (2.05, 40.0),
    max_points: int = 80,
    delta: float = 0.05,
    step0: float = 0.02,
    step_floor: float = 1e-4,
    step_cap: float = 0.25,
    tol: float = 1e-9,
    **solver_kw,
) -> BranchArc:
    """Pseudo-arclength continuation of one half-branch C_k^sign.

    Each predictor step along the unit tangent is corrected by a Newton
    iteration on (G = 0, tangent . (x - x_pred) = 0), with dG/da = alpha'(a)
    from the linearization and dG/dN by finite difference.  The zero count of
    f is recorded at every accepted point and must stay equal to k.
    """
    if k < 2:
        raise ValueError("branches exist for k >= 2")
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    N_k = bifurcation_exponent(k)
    if not (N_window[0] < N_k < N_window[1]):
        raise ValueError("window must contain the bifurcation exponent")
    kw = {**BRANCH_TOLS, **solver_kw}

    def gap_and_slope(N: float, a: float) -> tuple[float, float]:
        _, lin = solve_linearized(ShootingParams(N, a), tol, need_tail=False, **kw)
        return lin.base.alpha - (N + 2.0), lin.alpha_prime

    def gap_N_derivative(N: float, a: float, g0: float, dN: float = 1e-5) -> float:
        return (level_gap(N + dN, a, tol, **kw) - g0) / dN

    def newton(N, a, tau, x_pred, max_iter=8):
        for _ in range(max_iter):
            g, ga = gap_and_slope(N, a)
            if abs(g) < LEVEL_TOL and abs(tau[0] * (N - x_pred[0]) + tau[1] * (a - x_pred[1])) < 1e-10:
                return N, a, True
            gn = gap_N_derivative(N, a, g)
            h = tau[0] * (N - x_pred[0]) + tau[1] * (a - x_pred[1])
            det = gn * tau[1] - ga * tau[0]
            if det == 0.0 or not math.isfinite(det):
                return N, a, False
            dN = (-g * tau[1] + ga * h) / det
            da = (-gn * h + g * tau[0]) / det
            N, a = N + dN, a + da
            if not (math.isfinite(N) and math.isfinite(a)):
                return N, a, False
        g, _ = gap_and_slope(N, a)
        return N, a, abs(g) < LEVEL_TOL

    N0, a0 = _seed_branch(k, sign, delta, tol, kw)
    origin = (N_k, a_star(N_k))
    points = [BranchPoint(N=N0, a=a0, arclength_s=0.0,
                          f_at_zero=a0 - a_star(N0),
                          zero_count=zero_count_of_f(N0, a0, tol, **kw))]
    if points[0].zero_count != k:
        raise ZeroCountJump(
            f"seed point of C_{k}^{'+' if sign > 0 else '-'} has "
            f"{points[0].zero_count} zeros, expected {k}"
        )
    # initial tangent: away from the bifurcation origin
    d = np.array([N0 - origin[0], a0 - origin[1]])
    nrm = np.hypot(*d)
    tau = d / nrm if nrm > 1e-12 else np.array([0.0, float(sign)])

    step = step0
    s_acc = 0.0
    terminated = "budget"
    while len(points) < max_points:
        last = points[-1]
        x_pred = (last.N + step * tau[0], last.a + step * tau[1])
        N_new, a_new, ok = newton(x_pred[0], x_pred[1], tau, x_pred)
        if not ok:
            step *= 0.5
            if step < step_floor:
                terminated = "continuation_failure"
                break
            continue
        if not (N_window[0] <= N_new <= N_window[1]):
            terminated = "N_window_exit"
            break
        zc = zero_count_of_f(N_new, a_new, tol, **kw)
        if zc != k:
            raise ZeroCountJump(
                f"zero count jumped {k} -> {zc} at (N={N_new:.6f}, a={a_new:.6f})"
            )
        f0 = a_new - a_star(N_new)
        if sign * f0 <= 0:
            terminated = "continuation_failure"  # crossed the trivial curve
            break
        ds = math.hypot(N_new - last.N, a_new - last.a)
        s_acc += ds
        points.append(BranchPoint(N=N_new, a=a_new, arclength_s=s_acc,
                                  f_at_zero=f0, zero_count=zc))
        d = np.array([N_new - last.N, a_new - last.a])
        tau = d / np.hypot(*d)
        step = min(step * 1.4, step_cap)
    return BranchArc(k=k, sign=sign, points=points, origin=origin,
                     terminated_by=terminated)


def count_at_level(
    N: float,
    window: tuple[float, float] = (-6.0, 12.0),
    step: float = 0.05,
    dedup: float = 1e-5,
    tol: float = 1e-9,
    **solver_kw,
) -> int:
    """Distinct roots of alpha_N(a) = N + 2 across the window, trivial one included.

    The trivial root a*_N is exact by construction and is merged with any
    bracketed root closer than ``dedup``.
    """
    kw = {**BRANCH_TOLS, **solver_kw}
    grid = np.arange(window[0], window[1] + 1e-12, step)
    vals = [shoot(ShootingParams(N, float(a)), tol, **kw).alpha - (N + 2.0)
            for a in grid]
    roots = [a_star(N)]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0 or vals[i] * vals[i + 1] >= 0:
            continue
        root = float(brentq(
            lambda a: shoot(ShootingParams(N, a), tol, **kw).alpha - (N + 2.0),
            float(grid[i]), float(grid[i + 1]), xtol=1e-10,
        ))
        roots.append(root)
    roots.sort()
    out = [roots[0]]
    for r in roots[1:]:
        if r - out[-1] > dedup:
            out.append(r)
    return len(out)


@dataclass(frozen=True)
class PairingSample:
    N: float
    a: float
    a_image: float
    a_on_partner: float
    residual: float


@dataclass
class KelvinPairingReport:
    k: int
    samples: list[PairingSample]
    max_residual: float
    ok: bool


def kelvin_pairing(
    arc_plus: BranchArc,
    arc_minus: BranchArc | None,
    n_samples: int = 10,
    tol: float = 1e-4,
    **solver_kw,
) -> KelvinPairingReport:
    """Check that inversion maps branch points onto the partner branch.

    The Kelvin image of the profile at (N, a) has central value beta(a), so the
    image point is (N, beta).  For odd k the partner is the opposite
    half-branch; for even k each half-branch maps to itself (pass the same arc
    or None).  Each image is polished to the nearest level-set root; the
    residual is the distance between beta and that root.
    """
    kw = {**BRANCH_TOLS, **solver_kw}
    k = arc_plus.k
    partner = arc_minus if arc_minus is not None else arc_plus
    if partner.k != k:
        raise ValueError("arcs must share the zero-count label k")
    pts = arc_plus.points
    idx = np.unique(np.linspace(0, len(pts) - 1, min(n_samples, len(pts))).astype(int))
    samples = []
    for i in idx:
        p = pts[i]
        prof = shoot(ShootingParams(p.N, p.a), 1e-10, **kw)
        a_img = prof.beta
        expected_sign = -1 if k % 2 else +1
        if math.copysign(1.0, a_img - a_star(p.N)) != math.copysign(
            1.0, expected_sign * p.f_at_zero
        ):
            raise PairingFailure(
                f"Kelvin image sign wrong at (N={p.N:.6f}, a={p.a:.6f})"
            )
        # polish the image onto the level set
        def g(a):
            return shoot(ShootingParams(p.N, a), 1e-10, **kw).alpha - (p.N + 2.0)
        h = 0.02
        root = None
        for widen in range(6):
            lo, hi = a_img - h, a_img + h
            g_lo, g_hi = g(lo), g(hi)
            if g_lo * g_hi < 0:
                root = float(brentq(g, lo, hi, xtol=1e-11))
                break
            h *= 2.0
        if root is None:
            raise PairingFailure(
                f"no level-set root near Kelvin image a={a_img:.6f} at N={p.N:.6f}"
            )
        # the polished root must belong to the partner arc's zero-count class
        zc = zero_count_of_f(p.N, root, 1e-9, **kw)
        if zc != k:
            raise PairingFailure(
                f"Kelvin image at N={p.N:.6f} lands on a zero-count-{zc} root"
            )
        samples.append(PairingSample(N=p.N, a=p.a, a_image=a_img,
                                     a_on_partner=root, residual=abs(root - a_img)))
    max_res = max(s.residual for s in samples)
    return KelvinPairingReport(k=k, samples=samples, max_residual=max_res,
                               ok=max_res < tol)


def write_branch_csv(path, arcs: list[BranchArc]) -> None:
    from .csvio import write_csv

    rows = []
    for arc in arcs:
        for p in arc.points:
            rows.append([arc.k, arc.sign, p.arclength_s, p.N, p.a,
                         p.f_at_zero, p.mu, p.zero_count])
    write_csv(
        path,
        ["k", "sign", "s", "N", "a", "f_at_zero", "mu", "zero_count"],
        rows,
        meta={"arcs": len(arcs)},
    )
