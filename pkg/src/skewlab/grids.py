"""Discrete Hilbert spaces: interval grid functions and torus Fourier fields.

Two discretizations back everything else in the package:

* ``GridFunction1D`` — real samples at the cell centers x_i = (i + 1/2)/n of a
  uniform grid on [0, 1].  The L2 pairing is the rectangle (midpoint) rule,
  so the squared norm is dx * sum(v**2).  Cell centering makes a shift by an
  integer number of cells an exact permutation of the samples.
* ``TorusField`` — real samples of a (possibly vector valued) field on the
  uniform N^dim grid of the 2*pi-periodic torus, dim in {1, 2, 3}.  The
  spectral representation uses numpy's FFT with integer wavevectors; all
  derivative multipliers send the zero mode to zero, and odd-derivative
  multipliers zero the Nyquist column so that real input stays real.

No dealiasing is applied here; callers that multiply fields choose N large
enough that the products they form are resolved.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, cached_property
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "GridFunction1D",
    "TorusGrid",
    "TorusField",
    "cell_centers",
    "grid_function_from_callable",
    "torus_field_from_callable",
    "torus_grid",
    "inner_product",
    "l2_norm",
    "spectral_inner_product",
    "spectral_gradient",
    "spectral_divergence",
    "eval_trig_interp",
    "field_to_csv",
    "field_from_csv",
]

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# interval grid
# ---------------------------------------------------------------------------

def cell_centers(n_cells: int) -> np.ndarray:
    """Cell-center coordinates (i + 1/2) * dx of the uniform grid on [0, 1]."""
    return (np.arange(n_cells) + 0.5) / n_cells


@dataclass(frozen=True)
class GridFunction1D:
    """Real function on [0, 1] sampled at cell centers; midpoint-rule pairing."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("GridFunction1D expects a 1-D sample array")
        if values.size < 8:
            raise ValueError(f"need at least 8 cells, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("samples must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_cells(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return 1.0 / self.values.size

    @property
    def x(self) -> np.ndarray:
        return cell_centers(self.n_cells)

    def norm(self) -> float:
        return float(np.sqrt(self.dx * np.sum(self.values**2)))

    def __add__(self, other: "GridFunction1D") -> "GridFunction1D":
        _check_same_grid(self, other)
        return GridFunction1D(self.values + other.values)

    def __sub__(self, other: "GridFunction1D") -> "GridFunction1D":
        _check_same_grid(self, other)
        return GridFunction1D(self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction1D":
        return GridFunction1D(self.values * float(scalar))

    __rmul__ = __mul__


def grid_function_from_callable(fn: Callable[[np.ndarray], np.ndarray],
                                n_cells: int) -> GridFunction1D:
    return GridFunction1D(np.asarray(fn(cell_centers(n_cells)), dtype=float))


def _check_same_grid(f, g) -> None:
    if type(f) is not type(g):
        raise ValueError(f"mixed field types: {type(f).__name__} vs {type(g).__name__}")
    if isinstance(f, GridFunction1D):
        if f.n_cells != g.n_cells:
            raise ValueError(f"grid mismatch: {f.n_cells} vs {g.n_cells} cells")
    else:
        if f.samples.shape != g.samples.shape:
            raise ValueError(f"shape mismatch: {f.samples.shape} vs {g.samples.shape}")


# ---------------------------------------------------------------------------
# torus grid geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusGrid:
    """Uniform N^dim grid on the 2*pi torus with its integer wavevectors."""

    dim: int
    n_modes: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n_modes < 4 or self.n_modes % 2:
            raise ValueError(f"n_modes must be even and >= 4, got {self.n_modes}")

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n_modes

    @property
    def shape(self) -> tuple:
        return (self.n_modes,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @cached_property
    def axes(self) -> np.ndarray:
        return np.arange(self.n_modes) * self.spacing

    @cached_property
    def mesh(self) -> np.ndarray:
        """Coordinate arrays stacked on the first axis, shape (dim, N, ..., N)."""
        return np.stack(np.meshgrid(*([self.axes] * self.dim), indexing="ij"))

    @cached_property
    def points(self) -> np.ndarray:
        """All grid points as rows, shape (N**dim, dim), row-major order."""
        return self.mesh.reshape(self.dim, -1).T.copy()

    @cached_property
    def wavevectors(self) -> np.ndarray:
        """Integer wavevector grids, shape (dim, N, ..., N)."""
        k = np.fft.fftfreq(self.n_modes, d=1.0 / self.n_modes)
        mesh = np.meshgrid(*([k] * self.dim), indexing="ij")
        return np.stack(mesh)

    @cached_property
    def deriv_wavevectors(self) -> np.ndarray:
        """Wavevectors for odd-order derivatives: Nyquist column zeroed."""
        k = np.fft.fftfreq(self.n_modes, d=1.0 / self.n_modes)
        k[self.n_modes // 2] = 0.0
        mesh = np.meshgrid(*([k] * self.dim), indexing="ij")
        return np.stack(mesh)

    @cached_property
    def k_squared(self) -> np.ndarray:
        return np.sum(self.wavevectors**2, axis=0)

    @cached_property
    def inv_k_squared(self) -> np.ndarray:
        """1/|k|^2 with the zero mode mapped to 0 (projector/pressure convention)."""
        ksq = self.k_squared.copy()
        ksq.flat[0] = 1.0
        inv = 1.0 / ksq
        inv.flat[0] = 0.0
        return inv


@lru_cache(maxsize=None)
def torus_grid(dim: int, n_modes: int) -> TorusGrid:
    return TorusGrid(dim, n_modes)


# ---------------------------------------------------------------------------
# torus fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusField:
    """Real field on the torus; samples shape (components, N, ..., N)."""

    dim: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != self.dim + 1:
            raise ValueError(
                f"samples must have {self.dim + 1} axes (components first) "
                f"for dim={self.dim}, got shape {samples.shape}")
        n = samples.shape[1]
        if samples.shape[1:] != (n,) * self.dim:
            raise ValueError(f"grid axes must be equal, got {samples.shape[1:]}")
        # constructing the grid validates dim and evenness of N
        torus_grid(self.dim, n)
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def n_modes(self) -> int:
        return self.samples.shape[1]

    @property
    def components(self) -> int:
        return self.samples.shape[0]

    @property
    def grid(self) -> TorusGrid:
        return torus_grid(self.dim, self.n_modes)

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Unnormalized FFT over the grid axes, computed once on demand."""
        out = np.fft.fftn(self.samples, axes=tuple(range(1, self.dim + 1)))
        out.flags.writeable = False
        return out

    def norm(self) -> float:
        return float(np.sqrt(self.grid.cell_volume * np.sum(self.samples**2)))

    def __add__(self, other: "TorusField") -> "TorusField":
        _check_same_grid(self, other)
        return TorusField(self.dim, self.samples + other.samples)

    def __sub__(self, other: "TorusField") -> "TorusField":
        _check_same_grid(self, other)
        return TorusField(self.dim, self.samples - other.samples)

    def __mul__(self, scalar: float) -> "TorusField":
        return TorusField(self.dim, self.samples * float(scalar))

    __rmul__ = __mul__

    def component(self, index: int) -> "TorusField":
        return TorusField(self.dim, self.samples[index:index + 1])


def torus_field_from_callable(fn: Callable[[np.ndarray], np.ndarray],
                              dim: int, n_modes: int) -> TorusField:
    """Sample a closure on the grid.

    ``fn`` receives the stacked coordinate mesh (dim, N, ..., N) and returns
    either a scalar array (N, ..., N) or a stacked vector (components, N, ...).
    """
    grid = torus_grid(dim, n_modes)
    values = np.asarray(fn(grid.mesh), dtype=float)
    if values.ndim == dim:
        values = values[None]
    return TorusField(dim, values)


def field_from_spectrum(dim: int, spectrum: np.ndarray) -> TorusField:
    samples = np.fft.ifftn(spectrum, axes=tuple(range(1, dim + 1)))
    return TorusField(dim, samples.real)


# ---------------------------------------------------------------------------
# pairings and spectral calculus
# ---------------------------------------------------------------------------

Field = Union[GridFunction1D, TorusField]


def inner_product(f: Field, g: Field) -> float:
    """Quadrature L2 pairing (midpoint rule; exact cell volume on the torus)."""
    _check_same_grid(f, g)
    if isinstance(f, GridFunction1D):
        return float(f.dx * np.sum(f.values * g.values))
    return float(f.grid.cell_volume * np.sum(f.samples * g.samples))


def l2_norm(f: Field) -> float:
    return f.norm()


def spectral_inner_product(f: TorusField, g: TorusField) -> float:
    """The same pairing evaluated from spectra (Parseval route)."""
    _check_same_grid(f, g)
    n_total = f.n_modes**f.dim
    acc = np.sum(f.spectrum * np.conj(g.spectrum)).real
    return float(f.grid.cell_volume * acc / n_total)


def spectral_gradient(f: TorusField) -> TorusField:
    """Gradient of a scalar field via i*k multipliers; output is real."""
    if f.components != 1:
        raise ValueError("spectral_gradient expects a scalar field")
    grid = f.grid
    spec = f.spectrum[0]
    comps = [np.fft.ifftn(1j * grid.deriv_wavevectors[ax] * spec).real
             for ax in range(f.dim)]
    return TorusField(f.dim, np.stack(comps))


def spectral_divergence(u: TorusField) -> TorusField:
    """Divergence of a vector field via i*k multipliers; output is real."""
    if u.components != u.dim:
        raise ValueError(
            f"divergence needs components == dim, got {u.components} != {u.dim}")
    grid = u.grid
    acc = np.zeros(grid.shape, dtype=complex)
    for ax in range(u.dim):
        acc += 1j * grid.deriv_wavevectors[ax] * u.spectrum[ax]
    return TorusField(u.dim, np.fft.ifftn(acc).real[None])


# ---------------------------------------------------------------------------
# trigonometric interpolation at arbitrary points
# ---------------------------------------------------------------------------

def _phase_matrix(coords: np.ndarray, n_modes: int) -> np.ndarray:
    """exp(i k x) for one axis, Nyquist symmetrized to cos for real output."""
    k = np.fft.fftfreq(n_modes, d=1.0 / n_modes)
    phase = np.exp(1j * np.outer(coords, k))
    phase[:, n_modes // 2] = np.cos(coords * (n_modes // 2))
    return phase


def eval_trig_interp(field: TorusField, points: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of ``field`` at scattered points.

    points: (P, dim).  Returns (components, P).  Reproduces the samples at
    grid points to roundoff and is exact for band-limited data.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != field.dim:
        raise ValueError(f"points must be (P, {field.dim})")
    n = field.n_modes
    coeff = field.spectrum / n**field.dim
    n_points = points.shape[0]
    chunk = 4096 if field.dim < 3 else 256
    out = np.empty((field.components, n_points))
    for start in range(0, n_points, chunk):
        sel = slice(start, min(start + chunk, n_points))
        pts = points[sel]
        # contract trailing mode axes one by one against per-axis phase matrices;
        # after the first contraction the point axis sits last
        acc = None
        for ax in range(field.dim - 1, -1, -1):
            phase = _phase_matrix(pts[:, ax], n)  # (p, N)
            if acc is None:
                acc = np.tensordot(coeff, phase, axes=([ax + 1], [1]))
            else:
                acc = np.einsum("...jp,pj->...p", acc, phase)
        out[:, sel] = acc.real
    return out


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def field_to_csv(field: Field, path) -> None:
    """Write a field as CSV: two comment lines (schema, values), then one row
    x1,...,xdim,v1,...,vcomponents per grid point in row-major order."""
    path = Path(path)
    if isinstance(field, GridFunction1D):
        dim, n, comps = 1, field.n_cells, 1
        coords = cell_centers(n)[:, None]
        values = field.values[:, None]
    else:
        dim, n, comps = field.dim, field.n_modes, field.components
        coords = field.grid.points
        values = field.samples.reshape(comps, -1).T
    rows = np.hstack([coords, values])
    header = f"dim,n_modes,components\n{dim},{n},{comps}"
    np.savetxt(path, rows, delimiter=",", header=header, comments="# ")


def field_from_csv(path) -> Field:
    """Inverse of :func:`field_to_csv`."""
    path = Path(path)
    with open(path) as fh:
        fh.readline()  # schema comment
        meta = fh.readline().lstrip("#").strip()
    dim, n, comps = (int(tok) for tok in meta.split(","))
    rows = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if rows.shape[0] != n**dim or rows.shape[1] != dim + comps:
        raise ValueError(f"malformed field CSV: {path}")
    values = rows[:, dim:]
    if dim == 1 and comps == 1 and abs(rows[0, 0] - 0.5 / n) < 1e-12:
        return GridFunction1D(values[:, 0])
    samples = values.T.reshape((comps,) + (n,) * dim)
    return TorusField(dim, samples)
