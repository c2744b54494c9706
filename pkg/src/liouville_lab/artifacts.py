"""Figure-data emitters: one frozen CSV per published figure.

These functions only orchestrate the solver modules and serialize results;
every artifact is reproducible byte-for-byte from its parameters.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ._util import parallel_map
from .branches import continue_branch, write_branch_csv
from .csvio import write_csv
from .curves import critical_portrait, find_c_of_N, sweep_alpha
from .errors import NoSignChange, TailNotNegligible
from .legendre import bifurcation_exponent
from .shooting import ShootingParams, a_star, shoot
from .variational import compute_J, diagnostics, solve_linearized

SHOOT_TOLS = dict(rel_tol=1e-9, abs_tol=1e-11)


def _alpha_row(args):
    N, a = args
    return (N, a, shoot(ShootingParams(N, a), 1e-9, **SHOOT_TOLS).alpha)


def alpha_samples(N: float, window: tuple[float, float], step: float) -> list[tuple]:
    n = int(round((window[1] - window[0]) / step))
    grid = [window[0] + i * (window[1] - window[0]) / n for i in range(n + 1)]
    return parallel_map(_alpha_row, [(N, a) for a in grid])


def emit_fig1(out_dir, k_max: int = 3, max_points: int = 60) -> Path:
    """Bifurcation diagram data: arcs C_k^+- in the (N, a) plane."""
    arcs = []
    for k in range(2, k_max + 1):
        N_k = bifurcation_exponent(k)
        hi = min(40.0, N_k + 4.0)
        for sign in (+1, -1):
            arcs.append(continue_branch(k, sign, N_window=(2.05, hi),
                                        max_points=max_points))
    path = Path(out_dir) / "fig1.csv"
    write_branch_csv(path, arcs)
    return path


def emit_fig2(out_dir, step: float = 0.1) -> Path:
    """Mass curves a -> alpha(a): N = 25 plus N = 1..12."""
    rows = []
    rows += alpha_samples(25.0, (-6.0, 12.0), step)
    for N in range(1, 13):
        rows += alpha_samples(float(N), (-6.0, 10.0), step)
    return write_csv(Path(out_dir) / "fig2.csv", ["N", "a", "alpha"], rows,
                     meta={"step": step}, command="figures")


def emit_fig3(out_dir, step: float = 0.1) -> Path:
    """alpha - 2N data: N = N_k (k = 2..5) and odd N = 1..19."""
    rows = []
    Ns = [bifurcation_exponent(k) for k in (2, 3, 4, 5)] + list(range(1, 20, 2))
    for N in Ns:
        rows += [(N, a, al - 2.0 * N) for (_, a, al) in alpha_samples(float(N), (-6.0, 10.0), step)]
    return write_csv(Path(out_dir) / "fig3.csv", ["N", "a", "alpha_minus_2N"], rows,
                     meta={"step": step}, command="figures")


def emit_fig4(out_dir, N_grid=None, step: float = 0.1) -> Path:
    """Critical points and critical values (divided by 4N) versus N."""
    if N_grid is None:
        N_grid = np.arange(1.5, 20.01, 0.5)
    rows = []
    for N in N_grid:
        curve = sweep_alpha(float(N), (-4.0, 8.0), step)
        portrait = critical_portrait(curve)
        for c in portrait.critical_points:
            rows.append((float(N), c.a, c.value / (4.0 * N), c.epsilon))
    return write_csv(
        Path(out_dir) / "fig4.csv",
        ["N", "critical_a", "critical_value_over_4N", "epsilon"],
        rows, meta={"step": step}, command="figures",
    )


def emit_fig5(out_dir, step: float = 0.1) -> tuple[Path, Path]:
    """J_N curves for odd N <= 11 plus the c(N) locus with its a*_N reference."""
    rows = []
    for N in (1.0, 3.0, 5.0, 7.0, 9.0, 11.0):
        a = -2.0
        while a <= 6.0 + 1e-9:
            try:
                pl = solve_linearized(ShootingParams(N, a), 1e-9, **SHOOT_TOLS)
                rows.append((N, a, compute_J(*pl)))
            except TailNotNegligible:
                pass
            a += step
    p1 = write_csv(Path(out_dir) / "fig5.csv", ["N", "a", "J"], rows,
                   meta={"step": step}, command="figures")
    rows_c = []
    for N in np.arange(2.5, 30.01, 0.5):
        try:
            c = find_c_of_N(float(N))
        except NoSignChange:
            continue
        rows_c.append((float(N), c, a_star(float(N))))
    p2 = write_csv(Path(out_dir) / "fig5_cn.csv", ["N", "c_of_N", "a_star"], rows_c,
                   command="figures")
    return p1, p2


def emit_fig6(out_dir, N_grid=None) -> Path:
    """J_N(a*_N) and K_N(a*_N) versus N."""
    if N_grid is None:
        N_grid = np.arange(2.5, 30.01, 0.5)
    rows = []
    for N in N_grid:
        d = diagnostics(ShootingParams(float(N), a_star(float(N))), 1e-9, **SHOOT_TOLS)
        rows.append((float(N), d.J_value, d.K_value))
    return write_csv(Path(out_dir) / "fig6.csv", ["N", "J_at_astar", "K_at_astar"],
                     rows, command="figures")


def emit_all(out_dir, fast: bool = False) -> list[Path]:
    """All six figure CSVs; ``fast`` coarsens the sweeps for smoke runs."""
    step = 0.25 if fast else 0.1
    paths = [
        emit_fig1(out_dir, k_max=3, max_points=30 if fast else 60),
        emit_fig2(out_dir, step=step),
        emit_fig3(out_dir, step=step),
        emit_fig4(out_dir, N_grid=np.arange(2.0, 20.01, 1.0 if fast else 0.5), step=step),
        *emit_fig5(out_dir, step=0.25 if fast else 0.1),
        emit_fig6(out_dir, N_grid=np.arange(2.5, 30.01, 1.0 if fast else 0.5)),
    ]
    return paths
