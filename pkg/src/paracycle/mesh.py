"""Structured tensor-product grids, fields on them, and boundary handling.

Conventions used throughout the package:

* Grids are node-centered; the first and last node of each dimension lie on
  the domain boundary. Dirichlet data is imposed directly on those boundary
  nodes, which are held fixed by all operators ("pinned" nodes).
* One ghost layer is enough for every stencil in the package. Ghost values
  are defined per face: ``dirichlet`` ghosts carry the prescribed value,
  ``neumann`` (zero-flux) ghosts mirror the adjacent interior node, and
  ``periodic`` ghosts wrap around.
* For a periodic dimension the wrap spacing between the last and (virtual)
  first node is defined as the mean of the first and last interior spacings,
  which reduces to the uniform spacing on uniform grids.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
PERIODIC = "periodic"

_FACE_KINDS = (DIRICHLET, NEUMANN, PERIODIC)


class InvalidGridError(ValueError):
    """Raised when grid construction input is inconsistent."""


@dataclass(frozen=True)
class FaceBC:
    """Boundary condition on a single face of one dimension."""

    kind: str
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in _FACE_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")


@dataclass(frozen=True)
class BoundaryCondition:
    """Per-dimension (low face, high face) boundary descriptors.

    Periodicity must be declared on both faces of a dimension or neither.
    """

    faces: tuple[tuple[FaceBC, FaceBC], ...]

    def __post_init__(self):
        for d, (lo, hi) in enumerate(self.faces):
            if (lo.kind == PERIODIC) != (hi.kind == PERIODIC):
                raise ValueError(
                    f"dimension {d}: periodic must be set on both faces or neither"
                )

    @property
    def dims(self) -> int:
        return len(self.faces)

    def is_periodic(self, axis: int) -> bool:
        return self.faces[axis][0].kind == PERIODIC

    @classmethod
    def uniform(cls, kind: str, dims: int, value: float = 0.0) -> "BoundaryCondition":
        f = FaceBC(kind, value)
        return cls(tuple((f, f) for _ in range(dims)))

    @classmethod
    def dirichlet(cls, value: float, dims: int) -> "BoundaryCondition":
        return cls.uniform(DIRICHLET, dims, value)

    @classmethod
    def neumann(cls, dims: int) -> "BoundaryCondition":
        return cls.uniform(NEUMANN, dims)

    @classmethod
    def periodic(cls, dims: int) -> "BoundaryCondition":
        return cls.uniform(PERIODIC, dims)


@dataclass(frozen=True)
class Grid:
    """Tensor-product structured grid, 1 to 3 dimensions.

    ``coords[d]`` is the strictly increasing node coordinate array of
    dimension ``d`` (length >= 3). Spacings are cached as coordinate
    differences. Instances are immutable and shareable across threads.
    """

    coords: tuple[np.ndarray, ...]
    spacings: tuple[np.ndarray, ...] = dc_field(init=False)

    def __post_init__(self):
        if not 1 <= len(self.coords) <= 3:
            raise InvalidGridError("grid must have 1 to 3 dimensions")
        spacings = []
        for d, c in enumerate(self.coords):
            c = np.asarray(c, dtype=float)
            if c.ndim != 1 or c.size < 3:
                raise InvalidGridError(f"dimension {d}: need at least 3 nodes")
            h = np.diff(c)
            if not np.all(h > 0):
                raise InvalidGridError(
                    f"dimension {d}: coordinates must be strictly increasing"
                )
            spacings.append(h)
        object.__setattr__(self, "coords", tuple(np.asarray(c, float) for c in self.coords))
        object.__setattr__(self, "spacings", tuple(spacings))

    @property
    def dims(self) -> int:
        return len(self.coords)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.coords)

    @property
    def npoints(self) -> int:
        return int(np.prod(self.shape))

    def wrap_spacing(self, axis: int) -> float:
        """Spacing across the periodic seam: mean of the two edge spacings."""
        h = self.spacings[axis]
        return 0.5 * (h[0] + h[-1])

    def dual_widths(self, axis: int, bc: BoundaryCondition) -> np.ndarray:
        """Dual-cell widths along ``axis``: half the span of the two adjacent
        faces, with half cells at non-periodic ends."""
        h = self.spacings[axis]
        n = self.shape[axis]
        w = np.empty(n)
        w[1:-1] = 0.5 * (h[:-1] + h[1:])
        if bc.is_periodic(axis):
            hw = self.wrap_spacing(axis)
            w[0] = 0.5 * (hw + h[0])
            w[-1] = 0.5 * (h[-1] + hw)
        else:
            w[0] = 0.5 * h[0]
            w[-1] = 0.5 * h[-1]
        return w

    def dual_volumes(self, bc: BoundaryCondition) -> np.ndarray:
        """Outer product of per-axis dual widths, shape ``grid.shape``."""
        vol = self.dual_widths(0, bc)
        for d in range(1, self.dims):
            vol = np.multiply.outer(vol, self.dual_widths(d, bc))
        return vol

    def meshgrid(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.coords, indexing="ij"))

    def radius(self) -> np.ndarray:
        """Euclidean distance of each node from the coordinate origin."""
        xs = self.meshgrid()
        return np.sqrt(sum(x * x for x in xs))


def build_grid(
    counts: Sequence[int],
    extents: Sequence[tuple[float, float]] | None = None,
    coords: Sequence[np.ndarray] | None = None,
) -> Grid:
    """Build a grid from per-dimension node counts plus either uniform
    extents or explicit coordinate arrays."""
    counts = [int(n) for n in counts]
    if any(n < 3 for n in counts):
        raise InvalidGridError("need at least 3 nodes per dimension")
    if (extents is None) == (coords is None):
        raise InvalidGridError("give exactly one of extents or coords")
    if coords is not None:
        arrays = []
        for d, (n, c) in enumerate(zip(counts, coords)):
            c = np.asarray(c, dtype=float)
            if c.size != n:
                raise InvalidGridError(f"dimension {d}: {n} counts but {c.size} coordinates")
            arrays.append(c)
        return Grid(tuple(arrays))
    arrays = []
    for n, (lo, hi) in zip(counts, extents):
        if not hi > lo:
            raise InvalidGridError("extent upper bound must exceed lower bound")
        arrays.append(np.linspace(lo, hi, n))
    return Grid(tuple(arrays))


@dataclass
class Field:
    """Scalar or multi-component nodal values on a grid.

    ``values`` has shape ``grid.shape + (n_components,)``; per-component
    views are available through :meth:`component`. Fields are single-writer:
    concurrent reads are safe, mutation is not synchronized.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape[: self.grid.dims] != self.grid.shape:
            raise ValueError(
                f"values shape {v.shape} incompatible with grid shape {self.grid.shape}"
            )
        if v.ndim == self.grid.dims:
            v = v[..., np.newaxis]
        if v.ndim != self.grid.dims + 1:
            raise ValueError("values must be grid-shaped plus one component axis")
        self.values = v

    @property
    def n_components(self) -> int:
        return self.values.shape[-1]

    def component(self, c: int) -> np.ndarray:
        return self.values[..., c]

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    @classmethod
    def full(cls, grid: Grid, value: float, n_components: int = 1) -> "Field":
        return cls(grid, np.full(grid.shape + (n_components,), float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[..., np.ndarray]) -> "Field":
        """Evaluate ``fn(*coordinate_arrays)`` on the mesh (single component)."""
        return cls(grid, np.asarray(fn(*grid.meshgrid()), dtype=float))


def pad_axis(values: np.ndarray, axis: int, lo: FaceBC, hi: FaceBC) -> np.ndarray:
    """Pad an array carrying grid axes with one ghost layer along ``axis``.

    Trailing non-grid axes (e.g. the component axis) pass through untouched.
    """
    n = values.shape[axis]
    pad_shape = list(values.shape)
    pad_shape[axis] = n + 2
    out = np.empty(pad_shape, dtype=values.dtype)

    def sl(idx):
        s = [slice(None)] * values.ndim
        s[axis] = idx
        return tuple(s)

    out[sl(slice(1, n + 1))] = values
    if lo.kind == PERIODIC:
        out[sl(0)] = values[sl(n - 1)]
    elif lo.kind == NEUMANN:
        out[sl(0)] = values[sl(0)]
    else:
        out[sl(0)] = lo.value
    if hi.kind == PERIODIC:
        out[sl(n + 1)] = values[sl(0)]
    elif hi.kind == NEUMANN:
        out[sl(n + 1)] = values[sl(n - 1)]
    else:
        out[sl(n + 1)] = hi.value
    return out


def pad_axis_edge(values: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    """Pad coefficient data along ``axis``: wrap if periodic, copy edge otherwise."""
    lo_kind = PERIODIC if periodic else NEUMANN
    f = FaceBC(lo_kind)
    return pad_axis(values, axis, f, f)


def fill_ghost(field: Field, bc: BoundaryCondition) -> np.ndarray:
    """Return the field values with one ghost layer on every face.

    Corner ghosts come from applying the per-axis rules sequentially
    (axis 0 first). The result is a plain array of shape
    ``tuple(n + 2 for n in grid.shape) + (n_components,)``.
    """
    if bc.dims != field.grid.dims:
        raise ValueError("boundary condition dimensionality mismatch")
    out = field.values
    for axis in range(field.grid.dims):
        lo, hi = bc.faces[axis]
        out = pad_axis(out, axis, lo, hi)
    return out


def apply_dirichlet_values(field: Field, bc: BoundaryCondition) -> Field:
    """Stamp prescribed Dirichlet values onto the boundary nodes."""
    out = field.copy()
    for axis in range(field.grid.dims):
        lo, hi = bc.faces[axis]
        idx = [slice(None)] * out.values.ndim
        if lo.kind == DIRICHLET:
            idx[axis] = 0
            out.values[tuple(idx)] = lo.value
        if hi.kind == DIRICHLET:
            idx[axis] = -1
            out.values[tuple(idx)] = hi.value
    return out


def pinned_mask(grid: Grid, bc: BoundaryCondition) -> np.ndarray:
    """Boolean mask of nodes held fixed by a Dirichlet face."""
    mask = np.zeros(grid.shape, dtype=bool)
    for axis in range(grid.dims):
        lo, hi = bc.faces[axis]
        idx = [slice(None)] * grid.dims
        if lo.kind == DIRICHLET:
            idx[axis] = 0
            mask[tuple(idx)] = True
        if hi.kind == DIRICHLET:
            idx[axis] = -1
            mask[tuple(idx)] = True
        idx[axis] = slice(None)
    return mask


# --- CSV serialization ------------------------------------------------------
#
# Flat layout with a fixed header `dim0,dim1,dim2,component,value`; unused
# dimension columns hold 0. Coordinates go to a sidecar CSV with header
# `dim,index,coordinate`. Values are written with repr(), Python's shortest
# round-trip decimal form, so read/write preserves them bit for bit.


def write_field_csv(field: Field, path: str) -> None:
    shape = field.grid.shape
    dims = field.grid.dims
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim0", "dim1", "dim2", "component", "value"])
        for idx in np.ndindex(*shape):
            full = list(idx) + [0] * (3 - dims)
            for c in range(field.n_components):
                writer.writerow(full + [c, repr(float(field.values[idx + (c,)]))])


def write_coords_csv(grid: Grid, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", "index", "coordinate"])
        for d, c in enumerate(grid.coords):
            for i, x in enumerate(c):
                writer.writerow([d, i, repr(float(x))])


def read_coords_csv(path: str) -> Grid:
    per_dim: dict[int, dict[int, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            per_dim.setdefault(int(row["dim"]), {})[int(row["index"])] = float(
                row["coordinate"]
            )
    coords = []
    for d in sorted(per_dim):
        entries = per_dim[d]
        coords.append(np.array([entries[i] for i in range(len(entries))]))
    return Grid(tuple(coords))


def read_field_csv(path: str, coords_path: str) -> Field:
    grid = read_coords_csv(coords_path)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append(
                (
                    int(row["dim0"]),
                    int(row["dim1"]),
                    int(row["dim2"]),
                    int(row["component"]),
                    float(row["value"]),
                )
            )
    ncomp = max(r[3] for r in rows) + 1
    values = np.empty(grid.shape + (ncomp,))
    for d0, d1, d2, c, v in rows:
        idx = (d0, d1, d2)[: grid.dims] + (c,)
        values[idx] = v
    return Field(grid, values)
