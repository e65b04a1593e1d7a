"""Command-line entry points for the three render operations.

    cwave-render snapshot <in.snap> <out.png> [--section x|y|z --index K] [--cmap NAME]
    cwave-render energy <in.csv> <out.png>
    cwave-render convergence <in.csv> <out.png>
"""

from __future__ import annotations

import argparse
import sys

from .render import RenderJob, render_convergence, render_energy, render_snapshot


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwave-render", description="Render solver outputs to PNG figures"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_snap = sub.add_parser("snapshot", help="wavefield heatmap from a snapshot file")
    p_snap.add_argument("input")
    p_snap.add_argument("output")
    p_snap.add_argument("--section", choices=("x", "y", "z"),
                        help="section axis for 3D snapshots")
    p_snap.add_argument("--index", type=int, help="node index along the section axis")
    p_snap.add_argument("--cmap", default="seismic")
    p_snap.add_argument("--title")

    p_energy = sub.add_parser("energy", help="energy-trace line plot from a t,E CSV")
    p_energy.add_argument("input")
    p_energy.add_argument("output")
    p_energy.add_argument("--title")

    p_conv = sub.add_parser("convergence",
                            help="log-log error plot from an h,tau,E,order CSV")
    p_conv.add_argument("input")
    p_conv.add_argument("output")
    p_conv.add_argument("--title")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "snapshot":
            job = RenderJob(input_path=args.input, output_path=args.output,
                            colormap=args.cmap, section_axis=args.section,
                            section_index=args.index, title=args.title)
            render_snapshot(job)
        elif args.command == "energy":
            render_energy(args.input, args.output, title=args.title)
        else:
            render_convergence(args.input, args.output, title=args.title)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
