"""Skew-symmetric operator laboratory.

Finite-dimensional part: skew-defect measurement, the Cayley transform
Q = (E + A)(E - A)^{-1} and its inverse A = (Q - E)(Q + E)^{-1} (orthogonal Q
corresponds to skew A), and the group exponential exp(tA).

Interval part: the first-derivative operator on [0, 1] with zero boundary
conditions.  Its closure has one-dimensional defects on either side: the
ranges of (E -+ A) miss exactly span{e^{-x}} and span{e^{x}}, which is what
the deficiency report measures.  Two unitary one-parameter groups extend the
operator — transport of the periodic extension of the initial profile and of
the antiperiodic one.  Their average is a generalized solution that dies at
odd integer times and revives at even ones, so it cannot come from any
semigroup.  A second failure mode of uniqueness is the growing solution
e^{t-x} (the kernel vector of E - adjoint), and splices of it onto group
orbits.  The weak-form verifier checks all of these against the defining
integral identity with separable test functions phi(t) * v(x).

Conventions: grid functions are cell centered (see :mod:`skewlab.grids`);
shifts by integer multiples of the cell width are exact index rolls, other
shifts use band-limited interpolation of the periodic or antiperiodic
extension.  Time integrals use the trapezoid rule on the trajectory grid.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Iterable, Literal, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .grids import (GridFunction1D, TorusField, cell_centers,
                    grid_function_from_callable, inner_product)
from .rng import named_stream

__all__ = [
    "OperatorMatrix",
    "random_skew_matrix",
    "skew_symmetry_defect",
    "sampled_skew_defect",
    "cayley_transform",
    "inverse_cayley_transform",
    "group_exponential",
    "advection_operator_matrix",
    "SingularTransformError",
    "DeficiencyReport",
    "interval_deficiency",
    "shift_group",
    "mixture_solution",
    "growth_solution",
    "spliced_solution",
    "Trajectory",
    "shift_trajectory",
    "mixture_trajectory",
    "growth_trajectory",
    "spliced_trajectory",
    "EnergyProfile",
    "energy_profile",
    "MollifierFamily",
    "SeparableTest",
    "interval_test",
    "default_test_family",
    "weak_residual",
]

State = Union[GridFunction1D, TorusField]


# ---------------------------------------------------------------------------
# dense matrices
# ---------------------------------------------------------------------------

class SingularTransformError(ValueError):
    """Cayley input was (numerically) singular; carries a condition estimate."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense real operator on R^d, d <= 4096."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {entries.shape}")
        if entries.shape[0] > 4096:
            raise ValueError(f"dimension {entries.shape[0]} exceeds 4096")
        if not np.all(np.isfinite(entries)):
            raise ValueError("entries must be finite")
        entries = entries.copy()
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def random_skew_matrix(dim: int, rng: np.random.Generator,
                       scale: float = 1.0) -> OperatorMatrix:
    g = rng.standard_normal((dim, dim)) * scale
    return OperatorMatrix((g - g.T) / 2.0)


def skew_symmetry_defect(a: OperatorMatrix) -> float:
    """||A + A^T||_F / max(1, ||A||_F)."""
    m = a.entries
    return float(np.linalg.norm(m + m.T) / max(1.0, np.linalg.norm(m)))


def sampled_skew_defect(a: OperatorMatrix, n_samples: int = 100,
                        seed: int = 0) -> float:
    """max |(Au, u)| / ||u||^2 over random probes.

    Bounded by ||A + A^T||_F / 2, i.e. by defect * max(1, ||A||_F) / 2.
    """
    rng = named_stream(seed, "skew_defect_probes")
    m = a.entries
    worst = 0.0
    for _ in range(n_samples):
        u = rng.standard_normal(a.dim)
        worst = max(worst, abs(u @ m @ u) / (u @ u))
    return float(worst)


def cayley_transform(a: OperatorMatrix) -> OperatorMatrix:
    """Q = (E + A)(E - A)^{-1}; orthogonal exactly when A is skew."""
    eye = np.eye(a.dim)
    lhs = eye - a.entries
    cond = np.linalg.cond(lhs)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularTransformError(
            "E - A is numerically singular; input is far from skew", cond)
    q = np.linalg.solve(lhs.T, (eye + a.entries).T).T
    return OperatorMatrix(q)


def inverse_cayley_transform(q: OperatorMatrix) -> OperatorMatrix:
    """A = (Q - E)(Q + E)^{-1}; fails when -1 is an eigenvalue of Q."""
    eye = np.eye(q.dim)
    lhs = q.entries + eye
    cond = np.linalg.cond(lhs)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularTransformError(
            "Q + E is numerically singular (-1 in the spectrum)", cond)
    a = np.linalg.solve(lhs.T, (q.entries - eye).T).T
    return OperatorMatrix(a)


def group_exponential(a: OperatorMatrix, t: float) -> OperatorMatrix:
    """exp(t A) by scaling and squaring (orthogonal for skew A)."""
    return OperatorMatrix(scipy.linalg.expm(t * a.entries))


def advection_operator_matrix(field, n_modes: int) -> OperatorMatrix:
    """Matrix of the spectral advection a . grad on the torus, assembled
    column by column in the split (skew) form (a . grad u + div(a u)) / 2.

    For solenoidal a the split form equals a . grad u in the continuum; on the
    grid it is antisymmetric to roundoff, while the plain collocation product
    picks up an O(1) symmetric aliasing part on delta columns.
    """
    from .grids import spectral_divergence, spectral_gradient, torus_grid

    grid = torus_grid(field.dim, n_modes)
    a_samples = np.moveaxis(field.eval(np.moveaxis(grid.mesh, 0, -1)), -1, 0)
    d = n_modes**field.dim
    cols = np.empty((d, d))
    basis = np.zeros(grid.shape)
    for j in range(d):
        basis.flat[j] = 1.0
        u = TorusField(field.dim, basis[None])
        grad = spectral_gradient(u).samples
        transport = np.sum(a_samples * grad, axis=0)
        flux = TorusField(field.dim, a_samples * basis[None])
        conservative = spectral_divergence(flux).samples[0]
        cols[:, j] = 0.5 * (transport + conservative).ravel()
        basis.flat[j] = 0.0
    return OperatorMatrix(cols)


# ---------------------------------------------------------------------------
# interval operator: deficiency structure
# ---------------------------------------------------------------------------

def _gauss_legendre(n_nodes: int = 200):
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    # map from [-1, 1] to [0, 1]
    return 0.5 * (nodes + 1.0), 0.5 * weights


@dataclass(frozen=True)
class DeficiencyReport:
    """Defect dimensions of the zero-boundary derivative operator on [0, 1]."""

    d_plus: int
    d_minus: int
    plus_basis: tuple
    minus_basis: tuple
    residuals: np.ndarray

    def to_json(self, path) -> None:
        payload = {
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
            "residuals": [float(r) for r in self.residuals],
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _random_zero_boundary_probe(rng: np.random.Generator, n_harmonics: int = 6):
    """Random smooth u with u(0) = u(1) = 0 as closures for u and u'."""
    coeffs = rng.standard_normal(n_harmonics) / np.arange(1, n_harmonics + 1)

    def u(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for k, c in enumerate(coeffs, start=1):
            acc += c * np.sin(k * np.pi * x)
        return acc

    def du(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for k, c in enumerate(coeffs, start=1):
            acc += c * k * np.pi * np.cos(k * np.pi * x)
        return acc

    return u, du


def interval_deficiency(n_cells: int = 256, n_probes: int = 50,
                        seed: int = 0) -> DeficiencyReport:
    """Defect data of u -> u' with u(0) = u(1) = 0.

    The ranges of (E - A) and (E + A) have orthogonal complements spanned by
    e^{-x} and e^{x}: integration by parts kills the boundary terms of any
    zero-boundary u, so (u - u', e^{-x}) = 0 and (u + u', e^{x}) = 0.  The
    residuals list holds |(u - u', e^{-x})| / ||u||_{W1} for random probes,
    evaluated with Gauss-Legendre quadrature.
    """
    x = cell_centers(n_cells)
    minus = np.exp(-x)
    plus = np.exp(x)
    dx = 1.0 / n_cells
    minus_basis = GridFunction1D(minus / np.sqrt(dx * np.sum(minus**2)))
    plus_basis = GridFunction1D(plus / np.sqrt(dx * np.sum(plus**2)))

    nodes, weights = _gauss_legendre()
    exp_minus = np.exp(-nodes)
    rng = named_stream(seed, "deficiency_probes")
    residuals = np.empty(n_probes)
    for i in range(n_probes):
        u, du = _random_zero_boundary_probe(rng)
        uv, duv = u(nodes), du(nodes)
        pairing = np.sum(weights * (uv - duv) * exp_minus)
        sobolev = np.sqrt(np.sum(weights * (uv**2 + duv**2)))
        residuals[i] = abs(pairing) / sobolev
    return DeficiencyReport(1, 1, (plus_basis,), (minus_basis,), residuals)


# ---------------------------------------------------------------------------
# interval shift groups and the non-uniqueness solutions
# ---------------------------------------------------------------------------

ShiftKind = Literal["periodic", "antiperiodic"]


def _aligned_cells(t: float, n_cells: int) -> Optional[int]:
    k = t * n_cells
    r = np.rint(k)
    if abs(k - r) <= 1e-9 * max(1.0, abs(k)):
        return int(r)
    return None


def shift_group(kind: ShiftKind, t: float, u0: GridFunction1D) -> GridFunction1D:
    """Transport u0 by t under the periodic or antiperiodic extension group.

    Periodic: u(t, x) = u0_p(x - t) with u0_p the 1-periodic extension.
    Antiperiodic: the extension flips sign across each unit, u(x+1) = -u(x).
    Grid-aligned t is an exact index roll (with exact sign bookkeeping); any
    other t goes through band-limited interpolation of the extension, which
    has period 2 in the antiperiodic case.
    """
    if kind not in ("periodic", "antiperiodic"):
        raise ValueError(f"unknown shift kind {kind!r}")
    n = u0.n_cells
    r = _aligned_cells(t, n)
    if r is not None:
        idx = np.arange(n) - r
        wraps, cells = np.divmod(idx, n)
        out = u0.values[cells]
        if kind == "antiperiodic":
            out = np.where(wraps & 1, -out, out)
        return GridFunction1D(out)
    if kind == "periodic":
        return GridFunction1D(_periodic_shift(u0.values, t * n))
    doubled = np.concatenate([u0.values, -u0.values])
    return GridFunction1D(_periodic_shift(doubled, t * n)[:n])


def _periodic_shift(values: np.ndarray, shift_cells: float) -> np.ndarray:
    """Band-limited shift of a periodic sample sequence by a fractional index."""
    n = values.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    phase = np.exp(-2j * np.pi * k * shift_cells / n)
    phase[n // 2] = np.cos(2 * np.pi * (n // 2) * shift_cells / n)
    return np.fft.ifft(np.fft.fft(values) * phase).real


def mixture_solution(t: float, u0: GridFunction1D) -> GridFunction1D:
    """Average of the two group orbits: vanishes at odd t, returns to u0 at even t."""
    return 0.5 * (shift_group("periodic", t, u0)
                  + shift_group("antiperiodic", t, u0))


def growth_solution(t: float, n_cells: int = 256) -> GridFunction1D:
    """Samples of e^{t-x}: the growing solution built on the defect vector e^{-x}."""
    return GridFunction1D(np.exp(t - cell_centers(n_cells)))


def spliced_solution(t_splice: float, t: float,
                     n_cells: int = 256) -> GridFunction1D:
    """Growth until t_splice, then the periodic group orbit of e^{t_splice - x}."""
    if t_splice < 0:
        raise ValueError("splice time must be nonnegative")
    if t <= t_splice:
        return growth_solution(t, n_cells)
    anchor = growth_solution(t_splice, n_cells)
    return shift_group("periodic", t - t_splice, anchor)


# ---------------------------------------------------------------------------
# trajectories and the energy profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Time-indexed states on a common discretization, norms cached."""

    times: np.ndarray
    states: tuple
    norms: np.ndarray = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size != len(self.states):
            raise ValueError("times and states must align")
        if times[0] != 0.0:
            raise ValueError("trajectories must start at t = 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        first = self.states[0]
        for s in self.states:
            _require_same_discretization(first, s)
        norms = np.array([s.norm() for s in self.states])
        if self.norms is not None:
            given = np.asarray(self.norms, dtype=float)
            if np.any(np.abs(given - norms) > 1e-12 * np.maximum(1.0, norms)):
                raise ValueError("cached norms disagree with states")
            norms = given
        times = times.copy()
        times.flags.writeable = False
        norms.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "norms", norms)
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    def state_at(self, t: float) -> State:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no stored state at t = {t}")
        return self.states[i]

    def to_csv(self, path) -> None:
        """Rows t, norm, v_0, ..., v_{n-1} (states flattened row-major)."""
        flat = np.stack([
            np.concatenate([[t, nrm], _state_values(s).ravel()])
            for t, nrm, s in zip(self.times, self.norms, self.states)
        ])
        np.savetxt(Path(path), flat, delimiter=",",
                   header="t, norm, v_0,...", comments="# ")


def _state_values(s: State) -> np.ndarray:
    return s.values if isinstance(s, GridFunction1D) else s.samples


def _require_same_discretization(a: State, b: State) -> None:
    if type(a) is not type(b):
        raise ValueError("mixed state types in trajectory")
    if _state_values(a).shape != _state_values(b).shape:
        raise ValueError("states must share one discretization")


def shift_trajectory(kind: ShiftKind, u0: GridFunction1D,
                     times: np.ndarray) -> Trajectory:
    return Trajectory(times, [shift_group(kind, t, u0) for t in times])


def mixture_trajectory(u0: GridFunction1D, times: np.ndarray) -> Trajectory:
    return Trajectory(times, [mixture_solution(t, u0) for t in times])


def growth_trajectory(times: np.ndarray, n_cells: int = 256) -> Trajectory:
    return Trajectory(times, [growth_solution(t, n_cells) for t in times])


def spliced_trajectory(t_splice: float, times: np.ndarray,
                       n_cells: int = 256) -> Trajectory:
    return Trajectory(times,
                      [spliced_solution(t_splice, t, n_cells) for t in times])


@dataclass(frozen=True)
class EnergyProfile:
    times: np.ndarray
    energies: np.ndarray
    bounded_by_initial: bool


def energy_profile(traj: Trajectory) -> EnergyProfile:
    """E(t_i) = ||u(t_i)||^2 / 2 and the flag E(t_i) <= E(0) * (1 + 1e-9)."""
    energies = 0.5 * traj.norms**2
    bounded = bool(np.all(energies <= energies[0] * (1.0 + 1e-9)))
    return EnergyProfile(traj.times, energies, bounded)


# ---------------------------------------------------------------------------
# mollifiers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MollifierFamily:
    """Polynomial bump beta(s) = 630 (s(s+1))^4 on [-1, 0], scaled to width 1/nu.

    beta_nu(s) = nu * beta(nu s) integrates to one; theta_nu(t) is the smooth
    cutoff int_t^inf beta_nu, equal to 1 left of -1/nu and 0 right of 0.  The
    kernel vanishes to fourth order at both ends, so beta is C^3.
    """

    nu: float

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError("nu must be positive")

    @staticmethod
    def _kernel(s: np.ndarray) -> np.ndarray:
        inside = (s > -1.0) & (s < 0.0)
        sv = np.where(inside, s, -0.5)
        val = 630.0 * (sv * (sv + 1.0))**4
        return np.where(inside, val, 0.0)

    @staticmethod
    def _kernel_integral(y: np.ndarray) -> np.ndarray:
        """int_{-1}^{y} of the kernel, exact (polynomial antiderivative)."""
        y = np.clip(y, -1.0, 0.0)
        g = (y**9 / 9.0 + y**8 / 2.0 + 6.0 * y**7 / 7.0
             + 2.0 * y**6 / 3.0 + y**5 / 5.0)
        return 630.0 * g + 1.0

    def beta(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self.nu * self._kernel(self.nu * s)

    def theta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return 1.0 - self._kernel_integral(self.nu * t)


# ---------------------------------------------------------------------------
# weak-form verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparableTest:
    """Test function phi(t) * v(x) with the transported profile precomputed.

    ``transported`` holds the action of the base operator on v (v' for the
    zero-boundary interval derivative, a . grad v on the torus).
    """

    phi: Callable[[np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray], np.ndarray]
    v: State
    transported: State
    t_support: tuple
    label: str = ""


def interval_test(phi: Callable, dphi: Callable,
                  v_fn: Callable, dv_fn: Callable,
                  n_cells: int, t_support: tuple,
                  label: str = "") -> SeparableTest:
    """Build a separable test for the interval operator; v must vanish at 0, 1."""
    for endpoint in (0.0, 1.0):
        if abs(float(v_fn(np.array([endpoint]))[0])) > 1e-12:
            raise ValueError(f"spatial profile must vanish at x = {endpoint}")
    v = grid_function_from_callable(v_fn, n_cells)
    dv = grid_function_from_callable(dv_fn, n_cells)
    return SeparableTest(phi, dphi, v, dv, tuple(t_support), label)


def weak_residual(traj: Trajectory, u0: State,
                  tests: Sequence[SeparableTest],
                  return_details: bool = False):
    """Largest normalized defect of the defining integral identity.

    For each test f = phi * v the identity reads
        int (u(t), phi'(t) v + phi(t) A0 v) dt + (u0, v) phi(0) = 0,
    discretized with the trapezoid rule on the trajectory's time grid and the
    grid quadrature in space.  The defect is normalized by
    ||v|| * (max |phi| + int |phi'| dt).  Tests whose phi support sticks out
    of the trajectory span are rejected.
    """
    t_end = traj.times[-1]
    details = []
    for test in tests:
        lo, hi = test.t_support
        if lo < -1e-12 or hi > t_end + 1e-12:
            raise ValueError(
                f"test {test.label!r} support [{lo}, {hi}] exceeds span [0, {t_end}]")
        phi = np.asarray(test.phi(traj.times), dtype=float)
        dphi = np.asarray(test.dphi(traj.times), dtype=float)
        if abs(phi[-1]) > 1e-12 * max(1.0, np.max(np.abs(phi))):
            raise ValueError(f"test {test.label!r} must vanish at the final time")
        g = np.array([inner_product(s, test.v) for s in traj.states])
        h = np.array([inner_product(s, test.transported) for s in traj.states])
        integral = np.trapezoid(g * dphi + h * phi, traj.times)
        numer = abs(integral + inner_product(u0, test.v) * phi[0])
        denom = test.v.norm() * (np.max(np.abs(phi))
                                 + np.trapezoid(np.abs(dphi), traj.times))
        details.append((test.label, numer / denom if denom > 0 else 0.0))
    worst = max((r for _, r in details), default=0.0)
    if return_details:
        return worst, details
    return worst


def _sin2_bump(lo: float, hi: float, power: int = 2):
    width = hi - lo

    def phi(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        s = np.where(inside, (t - lo) / width, 0.0)
        return np.where(inside, np.sin(np.pi * s)**power, 0.0)

    def dphi(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        s = np.where(inside, (t - lo) / width, 0.0)
        val = (power * np.pi / width) * np.sin(np.pi * s)**(power - 1) \
            * np.cos(np.pi * s)
        return np.where(inside, val, 0.0)

    return phi, dphi


def default_test_family(t_end: float, n_cells: int) -> list:
    """Five separable tests mixing initial-time cutoffs and interior bumps.

    The spatial profiles are trigonometric polynomials that vanish at the
    interval ends together with their first derivative; that keeps the
    cell-centered quadrature's wrap-around mismatch at O(dx^2) and makes the
    constant-state identity exact to roundoff.  Two time profiles are
    mollifier cutoffs with phi(0) = 1 (they exercise the initial-condition
    term); three are interior bumps with phi(0) = 0.
    """
    if t_end <= 1.0:
        raise ValueError("test family needs a span beyond t = 1")
    tests = []

    cut1 = MollifierFamily(2.0)
    t1 = 0.6 * t_end
    tests.append(interval_test(
        lambda t: cut1.theta(np.asarray(t) - t1),
        lambda t: -cut1.beta(np.asarray(t) - t1),
        lambda x: np.sin(np.pi * x)**2,
        lambda x: np.pi * np.sin(2 * np.pi * x),
        n_cells, (0.0, t1), "cutoff-nu2"))

    cut2 = MollifierFamily(3.0)
    t2 = 0.4 * t_end
    tests.append(interval_test(
        lambda t: cut2.theta(np.asarray(t) - t2),
        lambda t: -cut2.beta(np.asarray(t) - t2),
        lambda x: np.sin(np.pi * x)**2 * np.cos(2 * np.pi * x),
        lambda x: (np.pi * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * x)
                   - 2 * np.pi * np.sin(np.pi * x)**2 * np.sin(2 * np.pi * x)),
        n_cells, (0.0, t2), "cutoff-nu3"))

    phi3, dphi3 = _sin2_bump(0.1 * t_end, 0.5 * t_end)
    tests.append(interval_test(
        phi3, dphi3,
        lambda x: np.sin(np.pi * x)**2 * np.sin(2 * np.pi * x),
        lambda x: (np.pi * np.sin(2 * np.pi * x)**2
                   + 2 * np.pi * np.sin(np.pi * x)**2 * np.cos(2 * np.pi * x)),
        n_cells, (0.1 * t_end, 0.5 * t_end), "bump-early"))

    phi4, dphi4 = _sin2_bump(0.25 * t_end, 0.75 * t_end)
    tests.append(interval_test(
        phi4, dphi4,
        lambda x: np.sin(2 * np.pi * x)**2,
        lambda x: 2 * np.pi * np.sin(4 * np.pi * x),
        n_cells, (0.25 * t_end, 0.75 * t_end), "bump-mid"))

    phi5, dphi5 = _sin2_bump(0.05 * t_end, 0.95 * t_end, power=4)
    tests.append(interval_test(
        phi5, dphi5,
        lambda x: np.sin(np.pi * x)**3,
        lambda x: 3 * np.pi * np.sin(np.pi * x)**2 * np.cos(np.pi * x),
        n_cells, (0.05 * t_end, 0.95 * t_end), "bump-wide"))

    return tests
