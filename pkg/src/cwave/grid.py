"""Cartesian grids, full-grid scalar fields, and media-model containers.

The domain is a rectangle (2D) or box (3D) discretized into N+2 nodes per
axis: N interior nodes plus one boundary layer on each side, with uniform
spacing h = (max - min)/(N + 1).  Fields are stored x-fastest: element
(i, j, k) of a 3D field lives at flat index k*(Nx+2)*(Ny+2) + j*(Nx+2) + i,
which is C order for an array indexed [k, j, i].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

#: Minimum interior point count per axis; the one-sided boundary closure
#: consumes five nodes of a line.
MIN_INTERIOR_POINTS = 5


@dataclass(frozen=True)
class CartesianGrid:
    """Uniform grid geometry: per-axis extents, interior counts and spacings.

    Axes are ordered (x, y) in 2D and (x, y, z) in 3D.
    """

    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    interior_counts: tuple[int, ...]
    spacings: tuple[float, ...]

    @property
    def dims(self) -> int:
        return len(self.interior_counts)

    @property
    def full_counts(self) -> tuple[int, ...]:
        """Stored nodes per axis, boundary layers included."""
        return tuple(n + 2 for n in self.interior_counts)

    @property
    def shape(self) -> tuple[int, ...]:
        """Array shape of a full-grid field (slowest axis first)."""
        return tuple(reversed(self.full_counts))

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(reversed(self.interior_counts))

    def axis_coords(self, axis: int) -> np.ndarray:
        """All node coordinates along ``axis`` (boundary nodes included)."""
        return self.mins[axis] + np.arange(self.full_counts[axis]) * self.spacings[axis]

    def coordinate_arrays(self, interior_only: bool = False) -> tuple[np.ndarray, ...]:
        """Sparse broadcastable coordinate arrays (x, y[, z]) over the grid."""
        coords = []
        for axis in range(self.dims):
            c = self.axis_coords(axis)
            if interior_only:
                c = c[1:-1]
            shape = [1] * self.dims
            shape[self.dims - 1 - axis] = c.size
            coords.append(c.reshape(shape))
        return tuple(coords)

    def flat_index(self, indices: Sequence[int]) -> int:
        """Flat position of node (i, j[, k]) in the x-fastest layout."""
        stride = 1
        flat = 0
        for axis, idx in enumerate(indices):
            if not 0 <= idx < self.full_counts[axis]:
                raise IndexError(f"index {idx} out of range on axis {axis}")
            flat += idx * stride
            stride *= self.full_counts[axis]
        return flat

    def unflat_index(self, flat: int) -> tuple[int, ...]:
        """Inverse of :meth:`flat_index`."""
        if not 0 <= flat < int(np.prod(self.full_counts)):
            raise IndexError(f"flat index {flat} out of range")
        out = []
        for n in self.full_counts:
            out.append(flat % n)
            flat //= n
        return tuple(out)


def build_grid(extents: Sequence[tuple[float, float]], interior_counts: Sequence[int]) -> CartesianGrid:
    """Build a 2D/3D grid from per-axis (min, max) extents and interior counts.

    Raises ValueError for degenerate extents or fewer than five interior
    points per axis (the boundary closure needs five).
    """
    if len(extents) != len(interior_counts):
        raise ValueError("extents and interior_counts must have matching length")
    if len(extents) not in (2, 3):
        raise ValueError(f"grid must be 2D or 3D, got {len(extents)} axes")
    mins, maxs, spacings = [], [], []
    for axis, ((lo, hi), n) in enumerate(zip(extents, interior_counts)):
        if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
            raise ValueError(f"empty axis: extent ({lo}, {hi}) on axis {axis}")
        if n < MIN_INTERIOR_POINTS:
            raise ValueError(
                f"grid too small for 4th-order closure: axis {axis} has {n} interior points, "
                f"need at least {MIN_INTERIOR_POINTS}"
            )
        mins.append(float(lo))
        maxs.append(float(hi))
        spacings.append((float(hi) - float(lo)) / (n + 1))
    return CartesianGrid(tuple(mins), tuple(maxs), tuple(interior_counts), tuple(spacings))


@dataclass
class ScalarField:
    """Values over the full grid (interior plus boundary layers), x-fastest."""

    grid: CartesianGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid shape {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid: CartesianGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @property
    def interior(self) -> np.ndarray:
        """View of the interior block (writable)."""
        return self.values[(slice(1, -1),) * self.grid.dims]

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def check_finite(self, context: str = "field") -> None:
        if not np.isfinite(self.values).all():
            raise ValueError(f"non-finite values in {context}")


def sample(fn: Callable[..., float], grid: CartesianGrid) -> ScalarField:
    """Materialize ``fn(x, y[, z])`` on the full grid.

    ``fn`` is evaluated with broadcastable coordinate arrays; scalar-only
    callables are rescued with ``np.vectorize``.  Non-finite results raise.
    """
    coords = grid.coordinate_arrays()
    try:
        vals = np.broadcast_to(np.asarray(fn(*coords), dtype=np.float64), grid.shape).copy()
    except (TypeError, ValueError):
        vals = np.vectorize(fn, otypes=[np.float64])(*np.broadcast_arrays(*coords))
    if not np.isfinite(vals).all():
        raise ValueError("non-finite sample")
    return ScalarField(grid, vals)


@dataclass
class MediaModel:
    """Density and acoustic velocity fields sharing one grid, both positive."""

    rho: ScalarField
    c: ScalarField

    def __post_init__(self):
        if self.rho.grid is not self.c.grid and self.rho.grid != self.c.grid:
            raise ValueError("invalid media model: rho and c on different grids")
        for name, f in (("rho", self.rho), ("c", self.c)):
            if not np.isfinite(f.values).all() or not (f.values > 0).all():
                raise ValueError(f"invalid media model: {name} must be positive and finite")
        # model data is immutable after construction
        self.rho.values.flags.writeable = False
        self.c.values.flags.writeable = False

    @property
    def grid(self) -> CartesianGrid:
        return self.rho.grid

    def rho_c_squared(self) -> np.ndarray:
        return self.rho.values * self.c.values**2

    @classmethod
    def from_functions(cls, rho_fn, c_fn, grid: CartesianGrid) -> "MediaModel":
        return cls(sample(rho_fn, grid), sample(c_fn, grid))

    @classmethod
    def constant(cls, rho: float, c: float, grid: CartesianGrid) -> "MediaModel":
        return cls(
            ScalarField(grid, np.full(grid.shape, float(rho))),
            ScalarField(grid, np.full(grid.shape, float(c))),
        )


@dataclass
class InitialConditions:
    """Initial pressure ``alpha`` and its time derivative ``beta`` (full grid)."""

    alpha: ScalarField
    beta: ScalarField

    def __post_init__(self):
        if self.alpha.grid != self.beta.grid:
            raise ValueError("initial conditions on different grids")

    @classmethod
    def zero(cls, grid: CartesianGrid) -> "InitialConditions":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    @classmethod
    def from_functions(cls, alpha_fn, beta_fn, grid: CartesianGrid) -> "InitialConditions":
        return cls(sample(alpha_fn, grid), sample(beta_fn, grid))


class BoundarySpec:
    """Dirichlet data for every face of the domain.

    Each face evaluator maps (t, in-face coordinates...) to the boundary
    value; the in-face coordinates are the remaining axes in (x, y, z)
    order and arrive as broadcastable arrays.  ``None`` denotes the
    constant-zero specialization.
    """

    def __init__(self, dims: int, faces: dict[tuple[int, int], Callable | None] | None = None):
        if dims not in (2, 3):
            raise ValueError("boundary spec must be 2D or 3D")
        self.dims = dims
        self.faces: dict[tuple[int, int], Callable | None] = {
            (axis, side): None for axis in range(dims) for side in (0, 1)
        }
        if faces:
            self.faces.update(faces)

    @classmethod
    def zero(cls, dims: int) -> "BoundarySpec":
        return cls(dims)

    @classmethod
    def from_solution(cls, u_fn: Callable, grid: CartesianGrid) -> "BoundarySpec":
        """Faces traced out of a space-time solution ``u_fn(t, x, y[, z])``."""
        faces = {}
        for axis in range(grid.dims):
            for side, fixed in ((0, grid.mins[axis]), (1, grid.maxs[axis])):

                def evaluator(t, *in_face, _axis=axis, _fixed=fixed):
                    coords = list(in_face)
                    coords.insert(_axis, _fixed)
                    return u_fn(t, *coords)

                faces[(axis, side)] = evaluator
        return cls(grid.dims, faces)

    @property
    def is_zero(self) -> bool:
        return all(f is None for f in self.faces.values())

    def apply(self, field: np.ndarray, grid: CartesianGrid, t: float) -> None:
        """Fill the boundary layer of ``field`` in place at time ``t``."""
        dims = grid.dims
        coords = grid.coordinate_arrays()
        for axis in range(dims):
            arr_axis = dims - 1 - axis
            for side, node in ((0, 0), (1, -1)):
                sl = [slice(None)] * dims
                sl[arr_axis] = node
                target = field[tuple(sl)]
                fn = self.faces[(axis, side)]
                if fn is None:
                    target[...] = 0.0
                    continue
                face_coords = [
                    np.squeeze(c, axis=arr_axis) for a, c in enumerate(coords) if a != axis
                ]
                target[...] = np.broadcast_to(
                    np.asarray(fn(t, *face_coords), dtype=np.float64), target.shape
                )
