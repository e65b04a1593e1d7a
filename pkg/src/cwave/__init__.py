"""Compact 4th-order finite-difference solver for acoustic waves in
variable-density media, with CFL stability tooling and 2D absorbing layers."""

from .compact import (
    CompactSystem,
    LineBuffer,
    compact_first_derivative_line,
    divergence_laplacian,
    flux_divergence_line,
    gradient,
    one_sided_first_derivative,
    thomas_solve,
)
from .diagnostics import (
    EnergyTrace,
    ParticleVelocity,
    acoustic_energy,
    convergence_order,
    max_norm_error,
    particle_velocity_update,
)
from .grid import (
    BoundarySpec,
    CartesianGrid,
    InitialConditions,
    MediaModel,
    ScalarField,
    build_grid,
    sample,
)
from .io import SnapshotFrame, load_model, read_snapshot, write_snapshot
from .pml import (
    DampingField,
    PmlForcing,
    PmlLayout,
    PmlRun,
    PmlState2D,
    damping_profile,
    pml_step_direct,
    pml_step_substituted,
)
from .stability import (
    CflReport,
    SpectralReport,
    amplification_roots,
    analytic_spectra,
    build_1d_composed_operator,
    cfl_threshold,
    spectral_bound,
    spectral_report,
)
from .stepper import (
    InstabilityError,
    RunConfig,
    SourceSpec,
    WavefieldState,
    initial_back_step,
    inject_point_source,
    leapfrog_step,
    ricker,
    ricker_dt,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec",
    "CartesianGrid",
    "CflReport",
    "CompactSystem",
    "DampingField",
    "EnergyTrace",
    "InitialConditions",
    "InstabilityError",
    "LineBuffer",
    "MediaModel",
    "ParticleVelocity",
    "PmlForcing",
    "PmlLayout",
    "PmlRun",
    "PmlState2D",
    "RunConfig",
    "ScalarField",
    "SnapshotFrame",
    "SourceSpec",
    "SpectralReport",
    "WavefieldState",
    "acoustic_energy",
    "amplification_roots",
    "analytic_spectra",
    "build_1d_composed_operator",
    "build_grid",
    "cfl_threshold",
    "compact_first_derivative_line",
    "convergence_order",
    "damping_profile",
    "divergence_laplacian",
    "flux_divergence_line",
    "gradient",
    "initial_back_step",
    "inject_point_source",
    "leapfrog_step",
    "load_model",
    "max_norm_error",
    "one_sided_first_derivative",
    "particle_velocity_update",
    "pml_step_direct",
    "pml_step_substituted",
    "read_snapshot",
    "ricker",
    "ricker_dt",
    "run_simulation",
    "sample",
    "spectral_bound",
    "spectral_report",
    "thomas_solve",
    "write_snapshot",
]
