"""Linearization and second variation of the shooting map.

The linearized solution phi_a (phi(0)=1, phi'(0)=0) rides along the base
trajectory as extra state components; its asymptotic slope gives alpha'(a) and
its zeros drive the critical-point machinery.  The cubic functional J_N and
the second-variation functional K_N (alpha'' = 2 K_N) are quadratures of the
stored trajectories.

Far-field extraction: once u follows its first-integral closed form (see
shooting.far_field_constants), the linearized equation becomes
w'' = -2 q^2 sech^2(q (t - t_c)) w, whose solutions are spanned by tanh(x) and
x tanh(x) - 1 with x = q (t - t_c).  Fitting (w, w') at the endpoint to that
basis yields the slope -alpha'(a) and intercept without chasing the slowly
decaying flux.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._util import composite_gl5
from .errors import NoLargestZero, ParamMismatch, TailNotNegligible
from .ivp import Trajectory
from .shooting import (
    RadialProfile,
    ShootingParams,
    log_weight,
    shoot,
    solve_radial,
)

# |alpha'| below this declares phi_a bounded (critical point of alpha)
BOUNDEDNESS_TOL = 1e-6

# improper integrals are cut where their integrand drops below this
TAIL_THRESHOLD = 1e-14


def log_weight_vec(ts: np.ndarray, N: float) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    pos = ts > 0
    out = np.empty_like(ts)
    tp = ts[pos]
    out[pos] = 2 * tp + N * (2 * tp + np.log1p(np.exp(-2 * tp)))
    tn = ts[~pos]
    out[~pos] = 2 * tn + N * np.log1p(np.exp(2 * tn))
    return out


@dataclass
class LinearizedProfile:
    """phi_a alongside its base profile, in t = log r coordinates."""

    base: RadialProfile
    trajectory: Trajectory              # (v, v', w, w') nodes
    zeros: list[float]                  # r-values of the zeros of phi
    alpha_prime: float
    intercept: float
    largest_zero: float | None
    bounded: bool
    j_tail_ok: bool = True
    _w_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    @property
    def t0(self) -> float:
        return float(self.trajectory.times[0])

    @property
    def t_max(self) -> float:
        return math.log(self.base.r_max)

    def w(self, t):
        t = np.asarray(t, dtype=float)
        out = self._w_fn(np.atleast_1d(t))
        if t.ndim == 0:
            return float(out[0][0]), float(out[1][0])
        return out[0], out[1]

    def phi(self, r):
        return self.w(np.log(np.asarray(r, dtype=float)))[0]


@dataclass
class SecondVariationProfile:
    """psi_a (second derivative of u_a in a) and the functional K_N(a)."""

    base: LinearizedProfile
    psi_trajectory: Trajectory          # full (v, v', w, w', psi, psi') nodes
    K_value: float
    K_flux: float                       # -psi'(t_end)/2, endpoint cross-check


@dataclass
class VariationalDiagnostics:
    params: ShootingParams
    alpha: float
    alpha_prime: float
    J_value: float
    K_value: float
    zero_count: int
    bounded: bool


def _far_field_mode(q, t_c, t_end, w_end, wp_end):
    """Coefficients (A, B) of w = A tanh(x) + B (x tanh(x) - 1), x = q (t - t_c)."""
    x = q * (t_end - t_c)
    th = math.tanh(x)
    sc2 = 1.0 - th * th
    m11, m12 = th, x * th - 1.0
    m21, m22 = q * sc2, q * (th + x * sc2)
    det = m11 * m22 - m12 * m21
    A = (w_end * m22 - m12 * wp_end) / det
    B = (m11 * wp_end - w_end * m21) / det
    return A, B


def _w_eval_factory(params, traj, t_lo, t_hi, q, t_c, A, B):
    """Piecewise (w, w'): Taylor / dense / far-field basis."""
    e2a = math.exp(2.0 * params.a)
    p2, p4 = -e2a / 2.0, -e2a * (params.N - e2a) / 8.0

    def ev(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        w = np.empty_like(ts)
        wp = np.empty_like(ts)
        lo = ts < t_lo
        hi = ts > t_hi
        mid = ~(lo | hi)
        if lo.any():
            r2 = np.exp(2.0 * ts[lo])
            w[lo] = 1.0 + p2 * r2 + p4 * r2 * r2
            wp[lo] = 2.0 * p2 * r2 + 4.0 * p4 * r2 * r2
        if mid.any():
            sol = traj(ts[mid])
            w[mid] = sol[2]
            wp[mid] = sol[3]
        if hi.any():
            x = q * (ts[hi] - t_c)
            th = np.tanh(x)
            sc2 = 1.0 - th * th
            w[hi] = A * th + B * (x * th - 1.0)
            wp[hi] = A * q * sc2 + B * q * (th + x * sc2)
        return np.vstack([w, wp])

    return ev


def _tail_ready_factory(params, kind):
    """Checkpoint predicate: past the bump and all improper integrands tiny."""
    N = params.N

    def ready(t, y) -> bool:
        if t < 2.0 or -y[1] <= max(2.0, N + 1.0):
            return False
        x = log_weight(t, N) + 2.0 * float(y[0])
        e = math.exp(x) if x < 700.0 else math.inf
        w = float(y[2])
        vals = [abs(e * w**3)]
        if kind == "uvar":
            vals.append(abs(e * (float(y[4]) + 2.0 * w * w)))
        return max(vals) < TAIL_THRESHOLD

    return ready


def solve_linearized(
    params: ShootingParams,
    tol: float = 1e-9,
    *,
    kind: str = "ulin",
    need_tail: bool = True,
    **solver_kw,
) -> tuple[RadialProfile, LinearizedProfile]:
    """One joint integration producing both the base profile and phi_a."""
    extra = _tail_ready_factory(params, kind) if need_tail else None
    profile, traj, monitor = solve_radial(
        params, tol, kind=kind, track=2, extra_ready=extra, **solver_kw
    )
    t_end = math.log(profile.r_max)
    y_end = np.asarray(traj(t_end), dtype=float)
    q = profile.alpha - (params.N + 1.0)
    # recover the far-field center from the stored closed form
    # (beta = log(2q) + q t_c)
    t_c = (profile.beta - math.log(2.0 * q)) / q
    A, B = _far_field_mode(q, t_c, t_end, float(y_end[2]), float(y_end[3]))
    alpha_prime = -B * q
    intercept = A - B + alpha_prime * t_c
    zeros = [math.exp(ev.t) for ev in traj.events]
    lin = LinearizedProfile(
        base=profile,
        trajectory=traj,
        zeros=zeros,
        alpha_prime=alpha_prime,
        intercept=intercept,
        largest_zero=zeros[-1] if zeros else None,
        bounded=abs(alpha_prime) < BOUNDEDNESS_TOL,
        j_tail_ok=monitor.extra_ok,
    )
    lin._w_fn = _w_eval_factory(params, traj, profile.t0, t_end, q, t_c, A, B)
    return profile, lin


def linearize(profile: RadialProfile, tol: float = 1e-9, **solver_kw) -> LinearizedProfile:
    """Solve the linearized problem along (a re-integration of) ``profile``.

    The joint run replays u_a so that phi rides on exactly the grid the error
    control chooses for the pair; its alpha is cross-checked against the input
    profile.
    """
    base, lin = solve_linearized(profile.params, tol, **solver_kw)
    if abs(base.alpha - profile.alpha) > 1e-6 * max(1.0, abs(profile.alpha)):
        raise ParamMismatch(
            f"joint re-integration alpha {base.alpha:.9f} does not match "
            f"profile alpha {profile.alpha:.9f}"
        )
    lin.base = profile
    return lin


def alpha_prime(params: ShootingParams, tol: float = 1e-9, **solver_kw) -> float:
    """alpha'(a) from the asymptotic slope of phi_a."""
    _, lin = solve_linearized(params, tol, need_tail=False, **solver_kw)
    return lin.alpha_prime


def alpha_prime_fd(params: ShootingParams, h: float = 1e-5, **shoot_kw) -> float:
    """Central-difference cross-check of alpha'."""
    hi = shoot(ShootingParams(params.N, params.a + h), **shoot_kw).alpha
    lo = shoot(ShootingParams(params.N, params.a - h), **shoot_kw).alpha
    return (hi - lo) / (2.0 * h)


def second_difference_alpha(params: ShootingParams, h: float = 0.02, **shoot_kw) -> float:
    """Fourth-order central second difference of a -> alpha(a).

    The five-point stencil keeps the truncation error ~h^4 so h can stay large
    enough that solver noise (amplified by 1/h^2) does not dominate.
    """
    shoot_kw.setdefault("rel_tol", 1e-12)
    shoot_kw.setdefault("abs_tol", 1e-14)
    N, a = params.N, params.a
    vals = [shoot(ShootingParams(N, a + k * h), **shoot_kw).alpha for k in (-2, -1, 0, 1, 2)]
    return (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)


def _trajectory_quadrature(lin: LinearizedProfile, values: Callable) -> float:
    """Composite GL5 along the stored step grid of the joint trajectory."""
    traj = lin.trajectory
    t_end = math.log(lin.base.r_max)
    breaks = traj.times[traj.times <= t_end]
    if breaks[-1] < t_end:
        breaks = np.append(breaks, t_end)
    return composite_gl5(values, breaks)


def compute_J(profile: RadialProfile, linearized: LinearizedProfile,
              tail_threshold: float = TAIL_THRESHOLD) -> float:
    """J_N(a) = int (1+r^2)^N e^{2u} phi^3 r dr by quadrature along the trajectory."""
    params = profile.params
    if params != linearized.base.params:
        raise ParamMismatch("profile and linearization computed at different parameters")
    if not linearized.j_tail_ok:
        raise TailNotNegligible(
            f"cubic integrand did not fall below {tail_threshold:g} within the radial budget"
        )
    N = params.N
    traj = linearized.trajectory

    def integrand(ts):
        sol = traj(ts)
        return np.exp(log_weight_vec(ts, N) + 2.0 * sol[0]) * sol[2] ** 3

    r0 = math.exp(linearized.t0)
    origin = math.exp(2.0 * params.a) * r0 * r0 / 2.0
    return origin + _trajectory_quadrature(linearized, integrand)


def compute_K(profile: RadialProfile, linearized: LinearizedProfile,
              tol: float = 1e-9, **solver_kw) -> SecondVariationProfile:
    """K_N(a) = int (1+r^2)^N e^{2u} (psi + 2 phi^2) r dr, with alpha'' = 2 K_N.

    psi is integrated jointly with (u, phi) so all three share one grid; the
    quadrature uses the same tail-cut policy as compute_J.
    """
    params = profile.params
    if params != linearized.base.params:
        raise ParamMismatch("profile and linearization computed at different parameters")
    if linearized.trajectory.states.shape[1] == 6:
        lin6 = linearized  # already a second-variation run; reuse its grid
    else:
        _, lin6 = solve_linearized(params, tol, kind="uvar", **solver_kw)
    if not lin6.j_tail_ok:
        raise TailNotNegligible(
            "second-variation integrand did not fall below threshold within the radial budget"
        )
    traj = lin6.trajectory
    N = params.N

    def integrand(ts):
        sol = traj(ts)
        return np.exp(log_weight_vec(ts, N) + 2.0 * sol[0]) * (sol[4] + 2.0 * sol[2] ** 2)

    r0 = math.exp(lin6.t0)
    origin = 2.0 * math.exp(2.0 * params.a) * r0 * r0 / 2.0  # psi ~ 0, phi ~ 1 near 0
    K = origin + _trajectory_quadrature(lin6, integrand)
    t_end = math.log(lin6.base.r_max)
    K_flux = -float(np.asarray(traj(t_end))[5]) / 2.0
    return SecondVariationProfile(
        base=linearized, psi_trajectory=traj, K_value=K, K_flux=K_flux
    )


def largest_zero(params: ShootingParams, tol: float = 1e-9, **solver_kw) -> float:
    """r(a), the largest zero of phi_a; NoLargestZero if phi has none."""
    _, lin = solve_linearized(params, tol, need_tail=False, **solver_kw)
    if lin.largest_zero is None:
        raise NoLargestZero(f"phi has no zero at (N={params.N}, a={params.a})")
    return lin.largest_zero


def largest_zero_velocity(
    params: ShootingParams,
    h: float = 1e-3,
    tol: float = 1e-9,
    *,
    validate: bool = False,
    **solver_kw,
) -> float:
    """dr/da of the largest zero via the boundary-flux identity.

        dr/da = -4 / (r |phi'(r)|^2) * int_0^{r} (1+r^2)^N e^{2u} phi^3 r dr

    evaluated at r = r(a).  Requires phi_a unbounded with at least one zero;
    with ``validate=True`` the value is cross-checked against the central
    finite difference of a -> r(a) with step h.
    """
    _, lin = solve_linearized(params, tol, **solver_kw)
    if lin.bounded or not lin.zeros:
        raise NoLargestZero(
            "zero-velocity formula needs an unbounded phi with a largest zero "
            f"(bounded={lin.bounded}, zeros={len(lin.zeros)})"
        )
    r_z = lin.largest_zero
    t_z = math.log(r_z)
    wp = lin.w(t_z)[1]          # dw/dt = r phi'(r)
    phi_p = wp / r_z
    N = params.N
    traj = lin.trajectory

    def integrand(ts):
        sol = traj(ts)
        return np.exp(log_weight_vec(ts, N) + 2.0 * sol[0]) * sol[2] ** 3

    breaks = traj.times[traj.times < t_z]
    breaks = np.append(breaks, t_z)
    r0 = math.exp(lin.t0)
    trunc = math.exp(2.0 * params.a) * r0 * r0 / 2.0 + composite_gl5(integrand, breaks)
    vel = -4.0 * trunc / (r_z * phi_p * phi_p)
    if validate:
        fd = largest_zero_velocity_fd(params, h, tol, **solver_kw)
        if abs(fd - vel) > 0.05 * max(abs(vel), abs(fd)):
            raise NoLargestZero(
                f"zero-velocity formula {vel:.6g} disagrees with finite difference {fd:.6g}"
            )
    return vel


def largest_zero_velocity_fd(params: ShootingParams, h: float = 1e-3,
                             tol: float = 1e-9, **solver_kw) -> float:
    """Central finite difference of a -> r(a)."""
    N, a = params.N, params.a
    r_hi = largest_zero(ShootingParams(N, a + h), tol, **solver_kw)
    r_lo = largest_zero(ShootingParams(N, a - h), tol, **solver_kw)
    return (r_hi - r_lo) / (2.0 * h)


def diagnostics(params: ShootingParams, tol: float = 1e-9, **solver_kw) -> VariationalDiagnostics:
    """alpha, alpha', J, K and the zero count in one joint second-variation run."""
    profile, lin6 = solve_linearized(params, tol, kind="uvar", **solver_kw)
    J = compute_J(profile, lin6)
    sv = compute_K(profile, lin6, tol, **solver_kw)
    return VariationalDiagnostics(
        params=params,
        alpha=profile.alpha,
        alpha_prime=lin6.alpha_prime,
        J_value=J,
        K_value=sv.K_value,
        zero_count=len(lin6.zeros),
        bounded=lin6.bounded,
    )


def write_diagnostics_csv(path, rows: list[VariationalDiagnostics]) -> None:
    from .csvio import write_csv

    write_csv(
        path,
        ["N", "a", "alpha", "alpha_prime", "J", "K", "zero_count", "bounded"],
        [
            [d.params.N, d.params.a, d.alpha, d.alpha_prime, d.J_value, d.K_value,
             d.zero_count, int(d.bounded)]
            for d in rows
        ],
    )
