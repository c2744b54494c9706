"""Command-line front end: figure data, counts, portraits, and verification."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .csvio import write_csv, write_json
from .errors import ConfigError, LiouvilleError


@dataclass
class RunConfig:
    command: str
    parameters: dict
    out_dir: Path
    format: str = "csv"

    def artifact(self, name: str, columns, rows, meta=None):
        meta = dict(meta or {})
        meta.update({k: v for k, v in self.parameters.items() if v is not None})
        writer = write_csv if self.format == "csv" else write_json
        ext = "csv" if self.format == "csv" else "json"
        return writer(self.out_dir / f"{name}.{ext}", columns, rows,
                      meta=meta, command=self.command)


def _positive(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="liouville-lab",
        description="Radial solution family of the weighted planar Liouville equation: "
                    "mass curves, critical portraits, solution counts, and branch data.",
    )
    p.add_argument("--version", action="version", version=f"liouville-lab {__version__}")
    p.add_argument("--out-dir", default="out", help="artifact directory (default ./out)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("alpha-curve", help="sweep a -> alpha(a) at fixed N")
    s.add_argument("--N", type=_positive, required=True)
    s.add_argument("--a-min", type=float, default=-6.0)
    s.add_argument("--a-max", type=float, default=12.0)
    s.add_argument("--step", type=_positive, default=0.05)

    s = sub.add_parser("critical-points", help="critical portrait of alpha at fixed N")
    s.add_argument("--N", type=_positive, required=True)
    s.add_argument("--a-min", type=float, default=-6.0)
    s.add_argument("--a-max", type=float, default=12.0)
    s.add_argument("--step", type=_positive, default=0.05)

    s = sub.add_parser("count", help="count radial solutions at a mass level")
    s.add_argument("--N", type=_positive, required=True)
    s.add_argument("--alpha", type=float, default=None,
                   help="mass level (default: N+2 via direct level-set roots)")
    s.add_argument("--a-min", type=float, default=-6.0)
    s.add_argument("--a-max", type=float, default=12.0)
    s.add_argument("--step", type=_positive, default=0.05)

    s = sub.add_parser("branches", help="trace solution branches at level N+2")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--sign", choices=("+", "-", "both"), default="both")
    s.add_argument("--n-min", type=float, default=2.05)
    s.add_argument("--n-max", type=float, default=40.0)
    s.add_argument("--max-points", type=int, default=60)
    s.add_argument("--delta", type=_positive, default=0.05)

    s = sub.add_parser("jn-curve", help="a -> J_N(a) at fixed N")
    s.add_argument("--N", type=_positive, required=True)
    s.add_argument("--a-min", type=float, default=-2.0)
    s.add_argument("--a-max", type=float, default=6.0)
    s.add_argument("--step", type=_positive, default=0.1)

    s = sub.add_parser("kn-curve", help="a -> K_N(a) at fixed N")
    s.add_argument("--N", type=_positive, required=True)
    s.add_argument("--a-min", type=float, default=-2.0)
    s.add_argument("--a-max", type=float, default=6.0)
    s.add_argument("--step", type=_positive, default=0.1)

    s = sub.add_parser("c-of-n", help="first zero of a -> J_N(a)")
    s.add_argument("--N", type=_positive, action="append", required=True,
                   help="repeatable")

    s = sub.add_parser("n0", help="threshold exponent for min alpha < 2N")
    s.add_argument("--bracket", type=float, nargs=2, default=(1.0, 2.0))
    s.add_argument("--depth-margin", type=_positive, default=1e-2)

    s = sub.add_parser("figures", help="emit all six figure CSVs")
    s.add_argument("--fast", action="store_true", help="coarse grids for smoke runs")

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--criteria", default=None,
                   help="comma-separated criterion numbers (default all)")
    return p


def cmd_alpha_curve(cfg: RunConfig) -> str:
    from .curves import sweep_alpha

    P = cfg.parameters
    if P["a_max"] <= P["a_min"]:
        raise ConfigError("need a-min < a-max")
    curve = sweep_alpha(P["N"], (P["a_min"], P["a_max"]), P["step"])
    rows = [(curve.N, s.a, s.alpha, s.alpha_prime, s.zero_count) for s in curve.samples]
    cfg.artifact("alpha_curve", ["N", "a", "alpha", "alpha_prime", "zero_count"], rows)
    alphas = curve.alpha_values
    return (f"alpha-curve N={curve.N}: {len(rows)} samples, "
            f"alpha in [{alphas.min():.6f}, {alphas.max():.6f}], "
            f"min-2N={alphas.min() - 2 * curve.N:+.6f}")


def cmd_critical_points(cfg: RunConfig) -> str:
    from .curves import critical_portrait, sweep_alpha

    P = cfg.parameters
    curve = sweep_alpha(P["N"], (P["a_min"], P["a_max"]), P["step"])
    portrait = critical_portrait(curve)
    rows = [(portrait.N, c.a, c.value, c.kind, c.epsilon) for c in portrait.critical_points]
    cfg.artifact("critical_points", ["N", "a", "value", "kind", "epsilon"], rows,
                 meta={"alpha_min": portrait.alpha_min,
                       "attained": portrait.alpha_min_attained,
                       "epsilon_0": portrait.epsilon_0})
    return (f"critical-points N={portrait.N}: {len(rows)} critical points, "
            f"alpha_min={portrait.alpha_min:.6f} "
            f"({'attained' if portrait.alpha_min_attained else 'not attained'})")


def cmd_count(cfg: RunConfig) -> str:
    P = cfg.parameters
    window = (P["a_min"], P["a_max"])
    if P["alpha"] is None:
        from .branches import count_at_level

        n = count_at_level(P["N"], window, P["step"])
        cfg.artifact("count", ["N", "alpha", "count"], [(P["N"], P["N"] + 2.0, n)])
        return f"count N={P['N']} at level alpha=N+2={P['N'] + 2}: {n} solutions"
    from .curves import count_roots_direct, count_solutions, critical_portrait, sweep_alpha

    curve = sweep_alpha(P["N"], window, P["step"])
    portrait = critical_portrait(curve)
    sc = count_solutions(portrait, P["alpha"])
    direct = count_roots_direct(curve, P["alpha"])
    cfg.artifact("count", ["N", "alpha", "count", "chi", "direct"],
                 [(sc.N, sc.alpha_query, sc.count, sc.chi, direct)])
    return (f"count N={sc.N} alpha={sc.alpha_query}: {sc.count} solutions "
            f"(chi={sc.chi}, direct enumeration {direct})")


def cmd_branches(cfg: RunConfig) -> str:
    from .branches import continue_branch, write_branch_csv

    P = cfg.parameters
    if P["k"] < 2:
        raise ConfigError("k must be >= 2")
    signs = {"+": [1], "-": [-1], "both": [1, -1]}[P["sign"]]
    arcs = [
        continue_branch(P["k"], s, (P["n_min"], P["n_max"]), P["max_points"],
                        delta=P["delta"])
        for s in signs
    ]
    write_branch_csv(cfg.out_dir / "branches.csv", arcs)
    spans = ", ".join(
        f"C_{a.k}^{'+' if a.sign > 0 else '-'}: {len(a.points)} pts "
        f"N in [{a.N_values.min():.3f}, {a.N_values.max():.3f}] ({a.terminated_by})"
        for a in arcs
    )
    return f"branches k={P['k']}: {spans}"


def cmd_jn_curve(cfg: RunConfig) -> str:
    from .errors import TailNotNegligible
    from .shooting import ShootingParams
    from .variational import compute_J, solve_linearized

    P = cfg.parameters
    rows = []
    a = P["a_min"]
    while a <= P["a_max"] + 1e-12:
        try:
            pl = solve_linearized(ShootingParams(P["N"], a), 1e-9)
            rows.append((P["N"], a, compute_J(*pl)))
        except TailNotNegligible:
            pass
        a += P["step"]
    cfg.artifact("jn_curve", ["N", "a", "J"], rows)
    return f"jn-curve N={P['N']}: {len(rows)} samples"


def cmd_kn_curve(cfg: RunConfig) -> str:
    from .shooting import ShootingParams
    from .variational import compute_K, solve_linearized

    P = cfg.parameters
    rows = []
    a = P["a_min"]
    while a <= P["a_max"] + 1e-12:
        pl = solve_linearized(ShootingParams(P["N"], a), 1e-9, kind="uvar")
        rows.append((P["N"], a, compute_K(*pl).K_value))
        a += P["step"]
    cfg.artifact("kn_curve", ["N", "a", "K"], rows)
    return f"kn-curve N={P['N']}: {len(rows)} samples"


def cmd_c_of_n(cfg: RunConfig) -> str:
    from .curves import find_c_of_N
    from .shooting import a_star

    rows = []
    for N in cfg.parameters["N"]:
        c = find_c_of_N(N)
        rows.append((N, c, a_star(N)))
    cfg.artifact("c_of_n", ["N", "c_of_N", "a_star"], rows)
    return "; ".join(f"c({N})={c:.6f} (a*={astar:.6f})" for N, c, astar in rows)


def cmd_n0(cfg: RunConfig) -> str:
    from .curves import estimate_N0

    P = cfg.parameters
    lo, hi = P["bracket"]
    if not lo < hi:
        raise ConfigError("bracket must be ordered")
    n0 = estimate_N0((lo, hi), depth_margin=P["depth_margin"])
    cfg.artifact("n0", ["bracket_lo", "bracket_hi", "depth_margin", "N0"],
                 [(lo, hi, P["depth_margin"], n0)])
    return f"n0: threshold exponent = {n0:.4f} (bracket {lo}..{hi})"


def cmd_figures(cfg: RunConfig) -> str:
    from .artifacts import emit_all

    paths = emit_all(cfg.out_dir, fast=cfg.parameters["fast"])
    return "figures: wrote " + ", ".join(p.name for p in paths)


def cmd_verify(cfg: RunConfig) -> str:
    from .acceptance import run_acceptance

    only = cfg.parameters.get("criteria")
    ids = [int(x) for x in only.split(",")] if only else None
    results = run_acceptance(ids, echo=True)
    rows = [(r.cid, r.name, int(r.passed), r.elapsed, r.detail) for r in results]
    cfg.artifact("verify_report", ["criterion", "name", "passed", "seconds", "detail"], rows)
    n_fail = sum(1 for r in results if not r.passed)
    if n_fail:
        raise LiouvilleError(f"{n_fail} acceptance criteria failed")
    return f"verify: all {len(results)} criteria passed"


COMMANDS = {
    "alpha-curve": cmd_alpha_curve,
    "critical-points": cmd_critical_points,
    "count": cmd_count,
    "branches": cmd_branches,
    "jn-curve": cmd_jn_curve,
    "kn-curve": cmd_kn_curve,
    "c-of-n": cmd_c_of_n,
    "n0": cmd_n0,
    "figures": cmd_figures,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "out_dir", "format")}
    cfg = RunConfig(
        command=args.command,
        parameters=params,
        out_dir=Path(args.out_dir),
        format=args.format,
    )
    try:
        summary = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc),
                   "command": args.command}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except LiouvilleError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc),
                   "command": args.command, "parameters": {
                       k: (str(v) if isinstance(v, Path) else v)
                       for k, v in params.items()}},
                  sys.stderr)
        sys.stderr.write("\n")
        return 3
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
