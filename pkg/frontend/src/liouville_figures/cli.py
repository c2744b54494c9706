"""Command line: render one figure or all six from the frozen CSV artifacts."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .figures import RENDERERS, render, render_all
from .reader import MalformedCsv, MissingArtifact


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="liouville-figures",
        description="Render liouville-lab CSV artifacts into publication-style "
                    "figures; no numerics are recomputed.",
    )
    p.add_argument("--version", action="version", version=f"liouville-figures {__version__}")
    p.add_argument("--in-dir", default="out", help="directory with figN.csv artifacts")
    p.add_argument("--out-dir", default="figs", help="image output directory")
    p.add_argument("--png", action="store_true",
                   help="raster output instead of the default vector PDF")
    sub = p.add_subparsers(dest="command", required=True)
    for i in sorted(RENDERERS):
        sub.add_parser(f"fig{i}", help=f"render figure {i}")
    sub.add_parser("render-all", help="render all six figures")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = "png" if args.png else "pdf"
    try:
        if args.command == "render-all":
            paths = render_all(args.in_dir, args.out_dir, fmt)
        else:
            paths = [render(int(args.command[3:]), args.in_dir, args.out_dir, fmt)]
    except (MissingArtifact, MalformedCsv) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print("wrote " + " ".join(str(p) for p in paths))
    return 0


if __name__ == "__main__":
    sys.exit(main())
