"""Run-configuration files: a flat ``key = value`` grammar with dotted keys.

Grammar, one statement per line::

    # comment
    preset = example2          # bare or "quoted" strings
    grid.h = 1/40              # numbers: int, float, p/q fractions, pi/q
    time.t_end = 1.4
    source.location = 1, 1, 1  # comma-separated lists
    run.cfl_override = false   # booleans: true/false

Keys are dotted paths; values are typed by shape, not by key.  See
``KEY_HELP`` for the accepted keys.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from inspect import signature
from pathlib import Path

from .io import load_model
from .pml import PmlLayout, PmlRun, damping_profile
from .presets import PRESETS
from .stepper import RunConfig, SourceSpec
from .grid import BoundarySpec, InitialConditions

KEY_HELP = {
    "preset": "builtin experiment name (example1, example2, example3, example4-synthetic)",
    "grid.h": "uniform spacing override for preset grids",
    "time.tau": "time step",
    "time.t_end": "final time",
    "run.snapshot_every": "snapshot cadence in steps (0 = first/last only)",
    "run.output_dir": "directory for snapshots and traces",
    "run.cfl_override": "run even when the CFL check fails",
    "run.energy": "track the interior acoustic energy (2D runs)",
    "run.energy_every": "energy sampling cadence in steps",
    "model.rho_file": "raw density payload (file-based models)",
    "model.c_file": "raw velocity payload",
    "model.meta_file": "JSON descriptor for the payloads",
    "source.kind": "ricker | none",
    "source.fp": "Ricker dominant frequency",
    "source.dr": "Ricker temporal delay",
    "source.location": "source coordinates",
    "pml.width": "absorbing-layer width (length units)",
    "pml.sigma_max": "absorbing-layer strength",
    "pml.profile": "constant | linear | quadratic | inverse-distance",
    "pml.formulation": "direct | substituted",
}

_NUM_PI = re.compile(r"(\d+(?:\.\d+)?)?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?$")
_NUM_FRAC = re.compile(r"([+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*/\s*([+-]?\d+(?:\.\d+)?)$")


def parse_number(text: str) -> float:
    """Parse a number, a p/q fraction, or a pi-fraction like ``pi/25``."""
    s = text.strip()
    m = _NUM_PI.match(s)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    m = _NUM_FRAC.match(s)
    if m:
        den = float(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return float(m.group(1)) / den
    return float(s)


def _parse_scalar(text: str):
    s = text.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "\"'":
        return s[1:-1]
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return parse_number(s)
    except ValueError:
        return s


def parse_config_text(text: str) -> dict:
    """Parse the documented grammar into a flat {dotted key: value} map."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not re.fullmatch(r"[A-Za-z0-9_.\-]+", key):
            raise ValueError(f"config line {lineno}: malformed key {key!r}")
        if not value:
            raise ValueError(f"config line {lineno}: missing value for {key!r}")
        if key not in KEY_HELP:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if "," in value:
            out[key] = [_parse_scalar(p) for p in value.split(",")]
        else:
            out[key] = _parse_scalar(value)
    return out


def parse_config_file(path) -> dict:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


@dataclass
class RunOptions:
    """Side-channel options that do not affect the numerics."""

    output_dir: Path = field(default_factory=lambda: Path("."))


def _require_number(cfg: dict, key: str) -> float:
    if key not in cfg:
        raise ValueError(f"missing required config key {key!r}")
    v = cfg[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ValueError(f"invalid value for {key!r}: expected a number")
    return float(v)


def build_run_config(cfg: dict) -> tuple[RunConfig, RunOptions]:
    """Resolve a parsed config map into runnable objects."""
    options = RunOptions()
    if "run.output_dir" in cfg:
        options.output_dir = Path(str(cfg["run.output_dir"]))

    preset = cfg.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}")
        builder = PRESETS[preset]
        allowed = set(signature(builder).parameters)
        kwargs = {}
        mapping = {
            "grid.h": "h",
            "time.tau": "tau",
            "time.t_end": "t_end",
            "run.snapshot_every": "snapshot_every",
            "pml.width": "pml_width",
            "pml.sigma_max": "sigma_max",
            "run.energy_every": "energy_every",
        }
        for key, name in mapping.items():
            if key in cfg:
                if name not in allowed:
                    raise ValueError(f"config key {key!r} does not apply to preset {preset!r}")
                value = cfg[key]
                if name == "snapshot_every" or name == "energy_every":
                    value = int(value)
                kwargs[name] = value
        if "run.cfl_override" in cfg and "cfl_override" in allowed:
            kwargs["cfl_override"] = bool(cfg["run.cfl_override"])
        config = builder(**kwargs)
        if "run.cfl_override" in cfg:
            config.cfl_override = bool(cfg["run.cfl_override"])
        if "run.energy" in cfg and config.grid.dims == 2:
            config.track_energy = bool(cfg["run.energy"])
        return config, options

    # file-based model
    for key in ("model.rho_file", "model.c_file", "model.meta_file"):
        if key not in cfg:
            raise ValueError(f"missing required config key {key!r} (or set 'preset')")
    model = load_model(cfg["model.rho_file"], cfg["model.c_file"], cfg["model.meta_file"])
    grid = model.grid
    tau = _require_number(cfg, "time.tau")
    t_end = _require_number(cfg, "time.t_end")

    kind = cfg.get("source.kind", "none")
    if kind == "ricker":
        loc = cfg.get("source.location")
        if not isinstance(loc, list) or len(loc) != grid.dims:
            raise ValueError("invalid value for 'source.location': expected one number per axis")
        source = SourceSpec.point_ricker(
            f_p=_require_number(cfg, "source.fp"),
            d_r=_require_number(cfg, "source.dr"),
            location=loc,
        )
    elif kind == "none":
        source = SourceSpec.none()
    else:
        raise ValueError(f"invalid value for 'source.kind': {kind!r}")

    pml = None
    energy_region = None
    if "pml.width" in cfg:
        if grid.dims != 2:
            raise ValueError("absorbing layers are implemented in 2D")
        layout = PmlLayout(
            width=_require_number(cfg, "pml.width"),
            sigma_max=_require_number(cfg, "pml.sigma_max") if "pml.sigma_max" in cfg else 0.0,
            profile=str(cfg.get("pml.profile", "inverse-distance")),
        )
        formulation = str(cfg.get("pml.formulation", "direct"))
        if formulation != "direct":
            raise ValueError("file-based runs support the direct formulation only")
        pml = PmlRun(damping=damping_profile(layout, grid), formulation="direct")
        energy_region = layout.interior_region(grid)

    config = RunConfig(
        grid=grid,
        model=model,
        source=source,
        bc=BoundarySpec.zero(grid.dims),
        ic=InitialConditions.zero(grid),
        tau=tau,
        n_steps=int(round(t_end / tau)),
        pml=pml,
        snapshot_every=int(cfg.get("run.snapshot_every", 0)),
        cfl_override=bool(cfg.get("run.cfl_override", False)),
        track_energy=bool(cfg.get("run.energy", False)) and grid.dims == 2,
        energy_every=int(cfg.get("run.energy_every", 1)),
        energy_region=energy_region,
    )
    return config, options
