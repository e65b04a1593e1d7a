"""CFL threshold, analytic operator spectra, and dense spectral checks.

With frozen coefficients the spatial operator reduces to Kronecker sums of
the 1D composition M = A^{-1} B A^{-1} B, where A is the derivative-coupling
matrix (diag 1, off-diagonals 1/4) and B the differencing matrix
(off-diagonals +-3/4).  sigma(M) is real and lies in (-9, 0], so the 2D/3D
operator spectrum is bounded by -27 c_max^2 q_max/q_min, and the explicit
leapfrog update is stable for

    c_max sqrt(q_max/q_min) tau/h < 2/(3 sqrt(3)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .compact import CompactSystem
from .grid import MediaModel

#: Threshold on c_max sqrt(q_max/q_min) tau/h for the explicit update.
CFL_CONSTANT = 2.0 / (3.0 * np.sqrt(3.0))

#: Spectral-bound coefficient: |sigma| < 27 c_max^2 q_max/q_min in 3D.
SPECTRAL_COEFFICIENT = 27.0


@dataclass
class CflReport:
    """Stability ratio, threshold and the model extremes that produced them."""

    r: float
    tau_over_h: float
    threshold: float
    tau_over_h_limit: float
    c_max: float
    q_max: float
    q_min: float
    pass_: bool
    h: float
    tau: float
    uniform_h: bool

    def to_json(self) -> str:
        d = asdict(self)
        d["pass"] = d.pop("pass_")
        return json.dumps(d, indent=2)


@dataclass
class SpectralReport:
    """Dense eigen-data of the 1D composed operator plus the frozen bound."""

    n: int
    eigenvalues_lhs: list[float]
    eigenvalues_rhs_imag: list[float]
    eigenvalues_composed: list[complex]
    bound: float
    zero_eig_present: bool

    def to_json(self) -> str:
        d = asdict(self)
        d["eigenvalues_composed_real"] = [z.real for z in self.eigenvalues_composed]
        d["eigenvalues_composed_imag"] = [z.imag for z in self.eigenvalues_composed]
        del d["eigenvalues_composed"]
        return json.dumps(d, indent=2)


def cfl_threshold(model: MediaModel, tau: float, h: float | None = None) -> CflReport:
    """Evaluate the CFL condition for a model and time step.

    ``h`` defaults to the grid spacing; on a non-uniform grid the minimum
    spacing is used and the report flags the approximation.  q is the
    density field.
    """
    if not tau > 0:
        raise ValueError("time step must be positive")
    spacings = model.grid.spacings
    uniform = max(spacings) - min(spacings) <= 1e-12 * max(spacings)
    if h is None:
        h = min(spacings)
    q = model.rho.values
    q_min = float(q.min())
    q_max = float(q.max())
    if q_min <= 0:
        raise ValueError("invalid density")
    c_max = float(model.c.values.max())
    ratio = q_max / q_min
    r = c_max**2 * ratio * tau**2 / h**2
    tau_over_h = tau / h
    limit = CFL_CONSTANT / (c_max * np.sqrt(ratio))
    return CflReport(
        r=r,
        tau_over_h=tau_over_h,
        threshold=CFL_CONSTANT,
        tau_over_h_limit=limit,
        c_max=c_max,
        q_max=q_max,
        q_min=q_min,
        pass_=bool(tau_over_h < limit),
        h=h,
        tau=tau,
        uniform_h=bool(uniform),
    )


def analytic_spectra(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvalues of the two line-coupling matrices.

    Returns (eigs of the coupling matrix, imaginary parts of the
    differencing-matrix eigenvalues), both for l = 1..n:
    1 + cos(l pi/(n+1))/2 and (3/2) cos(l pi/(n+1)).
    """
    if n < 1:
        raise ValueError("matrix size must be positive")
    l = np.arange(1, n + 1)
    c = np.cos(l * np.pi / (n + 1))
    return 1.0 + 0.5 * c, 1.5 * c


def build_1d_composed_operator(n: int) -> np.ndarray:
    """Dense M = A^{-1} B A^{-1} B at verification scale (n <= 64)."""
    if not 2 <= n <= 64:
        raise ValueError("dense verification supports sizes 2..64")
    sysm = CompactSystem(n)
    x = np.linalg.solve(sysm.lhs_dense(), sysm.rhs_dense())
    return x @ x


def spectral_bound(model: MediaModel) -> float:
    """27 c_max^2 q_max/q_min, the frozen-coefficient spectral radius bound."""
    q = model.rho.values
    q_min = float(q.min())
    if q_min <= 0:
        raise ValueError("invalid density")
    return SPECTRAL_COEFFICIENT * float(model.c.values.max()) ** 2 * float(q.max()) / q_min


def spectral_report(n: int, model: MediaModel | None = None) -> SpectralReport:
    """Dense spectra of the composed 1D operator plus the frozen bound.

    Without a model the bound is evaluated at unit coefficients (27).
    """
    eigs_lhs, eigs_rhs_imag = analytic_spectra(n)
    composed = build_1d_composed_operator(n)
    eigs_m = np.linalg.eigvals(composed)
    eigs_m = eigs_m[np.argsort(eigs_m.real)]
    bound = SPECTRAL_COEFFICIENT if model is None else spectral_bound(model)
    return SpectralReport(
        n=n,
        eigenvalues_lhs=[float(v) for v in eigs_lhs],
        eigenvalues_rhs_imag=[float(v) for v in eigs_rhs_imag],
        eigenvalues_composed=[complex(z) for z in eigs_m],
        bound=float(bound),
        zero_eig_present=bool(np.min(np.abs(eigs_m)) < 1e-10),
    )


def amplification_roots(r: float) -> np.ndarray:
    """Roots of lambda^2 - (2 - 27 r) lambda + 1 = 0.

    Both roots sit on the unit circle exactly when 0 < r < 4/27; one root
    leaves the circle beyond that, which is the instability mechanism.
    """
    return np.roots([1.0, -(2.0 - 27.0 * r), 1.0])
