"""One renderer per reference figure.

Every function reads frozen CSVs through reader.load_table and draws; nothing
here integrates, differentiates or optimizes.  The only analytic elements are
axis-reference overlays (the trivial-solution locus a*_N = log(2(N+2))/2 and
constant guide lines) prescribed by the figure captions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import load_table

GRAY = "0.45"


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    input_csv_paths: tuple[str, ...]
    axis_labels: tuple[str, ...]
    overlays: tuple[str, ...] = ()


SPECS = {
    1: FigureSpec(1, ("fig1.csv",), ("N", "f(0)", "N", "a"),
                  overlays=("trivial line", "a*_N locus", "bifurcation dots")),
    2: FigureSpec(2, ("fig2.csv",), ("a", "alpha"),
                  overlays=("(a*_N, N+2) dots",)),
    3: FigureSpec(3, ("fig3.csv",), ("a", "alpha", "a", "alpha - 2N")),
    4: FigureSpec(4, ("fig4.csv",), ("N", "critical points", "N", "values / 4N")),
    5: FigureSpec(5, ("fig5.csv", "fig5_cn.csv"), ("a", "J_N", "N", "c(N)"),
                  overlays=("a*_N dotted reference",)),
    6: FigureSpec(6, ("fig6.csv",), ("N", "J(a*_N)", "N", "K(a*_N)")),
}


def _style():
    plt.rcParams.update({
        "font.size": 9,
        "axes.spines.top": False,
        "axes.spines.right": False,
        "lines.linewidth": 1.1,
        "figure.dpi": 120,
    })


def _save(fig, out_dir, name, fmt) -> Path:
    out = Path(out_dir) / f"{name}.{fmt}"
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"CreationDate": None} if fmt == "pdf" else None
    fig.savefig(out, metadata=metadata)
    plt.close(fig)
    return out


def _a_star(N):
    return 0.5 * np.log(2.0 * (N + 2.0))


def _two_panels():
    _style()
    return plt.subplots(1, 2, figsize=(8.0, 3.2), constrained_layout=True)


def render_fig1(in_dir, out_dir, fmt="pdf") -> Path:
    """Bifurcation diagram: (N, f(0)) on the left, (N, a) on the right."""
    t = load_table(Path(in_dir) / "fig1.csv",
                   ["k", "sign", "s", "N", "a", "f_at_zero", "mu", "zero_count"])
    fig, (ax_l, ax_r) = _two_panels()
    ks = sorted(set(int(k) for k in t["k"]))
    colors = plt.cm.tab10(np.linspace(0, 1, 10))
    N_hi = float(np.max(t["N"])) + 1.0
    N_line = np.linspace(2.0, N_hi, 200)
    ax_l.axhline(0.0, color="k", lw=0.8)
    ax_r.plot(N_line, _a_star(N_line), color="k", lw=0.8)
    for k in ks:
        for sign in (1, -1):
            sel = (t["k"] == k) & (t["sign"] == sign)
            if not np.any(sel):
                continue
            order = np.argsort(t["s"][sel])
            label = f"$C_{k}^{'+' if sign > 0 else '-'}$"
            ax_l.plot(t["N"][sel][order], t["f_at_zero"][sel][order],
                      color=colors[k % 10], label=label if sign > 0 else None)
            ax_r.plot(t["N"][sel][order], t["a"][sel][order], color=colors[k % 10])
        N_k = k * (k + 1) - 2.0
        ax_l.plot([N_k], [0.0], "o", color=GRAY, ms=4)
        ax_r.plot([N_k], [_a_star(N_k)], "o", color=GRAY, ms=4)
    ax_l.set_xlabel("N"), ax_l.set_ylabel("f(0)")
    ax_r.set_xlabel("N"), ax_r.set_ylabel("a")
    ax_l.legend(frameon=False, fontsize=8)
    return _save(fig, out_dir, "fig1", fmt)


def render_fig2(in_dir, out_dir, fmt="pdf") -> Path:
    """Mass curves: N = 25 alone, then N = 1..12, gray dot at (a*_N, N+2)."""
    t = load_table(Path(in_dir) / "fig2.csv", ["N", "a", "alpha"])
    fig, (ax_l, ax_r) = _two_panels()
    for ax, Ns in ((ax_l, [25.0]), (ax_r, [float(n) for n in range(1, 13)])):
        for N in Ns:
            sel = t["N"] == N
            if not np.any(sel):
                continue
            order = np.argsort(t["a"][sel])
            ax.plot(t["a"][sel][order], t["alpha"][sel][order], lw=0.9)
            ax.plot([_a_star(N)], [N + 2.0], "o", color=GRAY, ms=4)
        ax.set_xlabel("a"), ax.set_ylabel(r"$\alpha(a)$")
    return _save(fig, out_dir, "fig2", fmt)


def render_fig3(in_dir, out_dir, fmt="pdf") -> Path:
    """alpha(a) at the bifurcation exponents (left); alpha - 2N for odd N (right)."""
    t = load_table(Path(in_dir) / "fig3.csv", ["N", "a", "alpha_minus_2N"])
    fig, (ax_l, ax_r) = _two_panels()
    for N in (4.0, 10.0, 18.0, 28.0):
        sel = t["N"] == N
        if not np.any(sel):
            continue
        order = np.argsort(t["a"][sel])
        ax_l.plot(t["a"][sel][order], t["alpha_minus_2N"][sel][order] + 2.0 * N,
                  label=f"N={int(N)}")
    for N in range(1, 20, 2):
        sel = t["N"] == float(N)
        if not np.any(sel):
            continue
        order = np.argsort(t["a"][sel])
        ax_r.plot(t["a"][sel][order], t["alpha_minus_2N"][sel][order], lw=0.9)
    ax_r.axhline(0.0, color="k", lw=0.7)
    ax_l.set_xlabel("a"), ax_l.set_ylabel(r"$\alpha(a)$")
    ax_r.set_xlabel("a"), ax_r.set_ylabel(r"$\alpha(a) - 2N$")
    ax_l.legend(frameon=False, fontsize=8)
    return _save(fig, out_dir, "fig3", fmt)


def render_fig4(in_dir, out_dir, fmt="pdf") -> Path:
    """Critical points (left) and critical values over 4N (right) versus N."""
    t = load_table(Path(in_dir) / "fig4.csv",
                   ["N", "critical_a", "critical_value_over_4N", "epsilon"])
    fig, (ax_l, ax_r) = _two_panels()
    ax_l.plot(t["N"], t["critical_a"], ".", ms=3.5)
    ax_r.plot(t["N"], t["critical_value_over_4N"], ".", ms=3.5)
    ax_r.axhline(0.5, color=GRAY, lw=0.7, ls=":")  # alpha = 2N guide
    ax_l.set_xlabel("N"), ax_l.set_ylabel("critical points of $\\alpha$")
    ax_r.set_xlabel("N"), ax_r.set_ylabel("critical values / 4N")
    return _save(fig, out_dir, "fig4", fmt)


def render_fig5(in_dir, out_dir, fmt="pdf") -> Path:
    """J_N curves (left); c(N) with the dotted a*_N reference (right)."""
    t = load_table(Path(in_dir) / "fig5.csv", ["N", "a", "J"])
    tc = load_table(Path(in_dir) / "fig5_cn.csv", ["N", "c_of_N", "a_star"])
    fig, (ax_l, ax_r) = _two_panels()
    for N in sorted(set(t["N"])):
        sel = t["N"] == N
        order = np.argsort(t["a"][sel])
        ax_l.plot(t["a"][sel][order], t["J"][sel][order], lw=0.9,
                  label=f"N={int(N)}")
    ax_l.axhline(0.0, color="k", lw=0.7)
    order = np.argsort(tc["N"])
    ax_r.plot(tc["N"][order], tc["c_of_N"][order], lw=1.2)
    ax_r.plot(tc["N"][order], tc["a_star"][order], ls=":", color="k", lw=1.0)
    ax_l.set_xlabel("a"), ax_l.set_ylabel(r"$J_N(a)$")
    ax_r.set_xlabel("N"), ax_r.set_ylabel("c(N)")
    ax_l.legend(frameon=False, fontsize=7)
    return _save(fig, out_dir, "fig5", fmt)


def render_fig6(in_dir, out_dir, fmt="pdf") -> Path:
    """J and K at the explicit center a*_N, versus N."""
    t = load_table(Path(in_dir) / "fig6.csv", ["N", "J_at_astar", "K_at_astar"])
    fig, (ax_l, ax_r) = _two_panels()
    order = np.argsort(t["N"])
    ax_l.plot(t["N"][order], t["J_at_astar"][order])
    ax_r.plot(t["N"][order], t["K_at_astar"][order])
    for ax in (ax_l, ax_r):
        ax.axhline(0.0, color="k", lw=0.7)
        ax.set_xlabel("N")
    ax_l.set_ylabel(r"$J_N(a^*_N)$")
    ax_r.set_ylabel(r"$K_N(a^*_N)$")
    return _save(fig, out_dir, "fig6", fmt)


RENDERERS = {
    1: render_fig1,
    2: render_fig2,
    3: render_fig3,
    4: render_fig4,
    5: render_fig5,
    6: render_fig6,
}


def render(figure_id: int, in_dir, out_dir, fmt: str = "pdf") -> Path:
    if figure_id not in RENDERERS:
        raise ValueError(f"unknown figure id {figure_id}")
    return RENDERERS[figure_id](in_dir, out_dir, fmt)


def render_all(in_dir, out_dir, fmt: str = "pdf") -> list[Path]:
    return [render(i, in_dir, out_dir, fmt) for i in sorted(RENDERERS)]
