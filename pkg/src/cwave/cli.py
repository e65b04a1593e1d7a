"""Command-line interface.

Subcommands::

    cwave run <config>                      simulate, write snapshots (+ energy CSV)
    cwave convergence <preset> --grids ...  h-refinement table as CSV on stdout
    cwave stability <config>                CFL report as JSON
    cwave spectra --n N                     operator spectra report as JSON
    cwave presets                           list builtin experiments

Exit codes: 0 success, 1 validation error, 2 instability.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import build_run_config, parse_config_file, parse_number
from .io import write_convergence_csv, write_snapshot
from .presets import CONVERGENCE_TAU, PRESETS, run_convergence
from .stability import cfl_threshold, spectral_report
from .stepper import InstabilityError, run_simulation

_PRESET_BLURBS = {
    "example1": "3D smooth-media convergence study (tau = h^2)",
    "example2": "3D point-Ricker run in a density gradient, reflecting boundaries",
    "example3": "2D substituted absorbing-layer accuracy study (tau = (5h/pi)^2)",
    "example4-synthetic": "2D layered model with inverse-distance absorbing layer",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwave",
        description="Compact 4th-order solver for the variable-density acoustic wave equation",
    )
    parser.add_argument("--version", action="version", version=f"cwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation from a config file")
    p_run.add_argument("config", help="path to a key = value config file")

    p_conv = sub.add_parser("convergence", help="emit an h-refinement error table as CSV")
    p_conv.add_argument("preset", choices=sorted(CONVERGENCE_TAU))
    p_conv.add_argument("--grids", required=True,
                        help="comma-separated spacings, e.g. 1/10,1/16 or pi/25,pi/50")

    p_stab = sub.add_parser("stability", help="print the CFL report for a config")
    p_stab.add_argument("config", help="path to a key = value config file")

    p_spec = sub.add_parser("spectra", help="print the operator spectra report")
    p_spec.add_argument("--n", type=int, required=True, help="1D operator size (2..64)")

    sub.add_parser("presets", help="list builtin experiment presets")
    return parser


def _cmd_run(args) -> int:
    cfg = parse_config_file(args.config)
    config, options = build_run_config(cfg)
    options.output_dir.mkdir(parents=True, exist_ok=True)
    state, snapshots, energy = run_simulation(config)
    for frame in snapshots:
        path = options.output_dir / f"snapshot_{frame.step:06d}.snap"
        write_snapshot(frame, path)
    print(f"completed {state.n} steps to t = {state.t:.6g}; "
          f"{len(snapshots)} snapshots in {options.output_dir}")
    if energy is not None:
        path = options.output_dir / "energy.csv"
        energy.write_csv(path)
        print(f"energy trace ({len(energy.samples)} samples) in {path}")
    return 0


def _cmd_convergence(args) -> int:
    try:
        grids = [parse_number(tok) for tok in args.grids.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --grids value: {exc}") from exc
    if not grids:
        raise ValueError("--grids must list at least one spacing")
    rows = run_convergence(args.preset, grids)
    write_convergence_csv(rows, sys.stdout)
    return 0


def _cmd_stability(args) -> int:
    cfg = parse_config_file(args.config)
    config, _ = build_run_config(cfg)
    report = cfl_threshold(config.model, config.tau)
    print(report.to_json())
    return 0


def _cmd_spectra(args) -> int:
    print(spectral_report(args.n).to_json())
    return 0


def _cmd_presets(_args) -> int:
    for name in PRESETS:
        print(f"{name:20s} {_PRESET_BLURBS[name]}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "convergence": _cmd_convergence,
    "stability": _cmd_stability,
    "spectra": _cmd_spectra,
    "presets": _cmd_presets,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
