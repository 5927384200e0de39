"""Transport semigroups by the method of characteristics.

The flow map x(t; t0, y) of an autonomous Lipschitz field is integrated with
classical RK4 plus step-doubling adaptivity (local error per unit step below
the requested tolerance).  Transport of a profile is evaluation at backward
labels, u(t, x) = u0(x(0; t, x)); for solenoidal fields the flow preserves
volume, so the induced operators are orthogonal and the discrete L2 norm is
conserved up to quadrature error.

The stationary problem phi + h a . grad phi = psi is solved by the weighted
integral of psi along the backward characteristic,

    phi(y) = (1/h) * int_{-inf}^0 e^{s/h} psi(x(s; 0, y)) ds,

computed with composite Simpson on [h*ln(tail_tol), 0]; contributions closer
to zero than the first-exit bound s(y) vanish identically because psi is
evaluated outside its support.  The gradient version transports grad psi with
the transposed variational factor X(s)^T, X' = Da(x) X.  Decay fits check the
algebraic envelopes |phi| <~ (1+|y|)^{-alpha/h} and
|grad phi| <~ (1+|y|)^{-alpha(1/h - m)} with alpha = 1/growth_c.

Everything vectorizes over seed points: batches share one adaptive step
controller (the worst point controls the step), which keeps runs deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .fields import VelocityField
from .grids import TorusField, eval_trig_interp, torus_grid

__all__ = [
    "FlowOptions",
    "FlowDivergenceError",
    "flow_map",
    "flow_points",
    "backward_label",
    "semigroup_apply",
    "jacobian_det",
    "LipschitzReport",
    "flow_lipschitz_check",
    "ResolventParams",
    "SmoothBump",
    "first_exit_time",
    "resolvent_apply",
    "resolvent_gradient",
    "DecayReport",
    "DecayInconclusiveError",
    "decay_check",
]


class FlowDivergenceError(RuntimeError):
    """Adaptive integration exceeded its step budget."""


@dataclass(frozen=True)
class FlowOptions:
    """Controls for the adaptive RK4 integrator."""

    dt_max: float = 0.05
    tol: float = 1e-10
    max_steps: int = 100_000

    def __post_init__(self) -> None:
        if not (0.0 < self.dt_max <= 0.1):
            raise ValueError(f"dt_max must lie in (0, 0.1], got {self.dt_max}")
        if not (1e-14 <= self.tol <= 1e-4):
            raise ValueError(f"tol must lie in [1e-14, 1e-4], got {self.tol}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


def _rk4_step(a: VelocityField, x: np.ndarray, h: float) -> np.ndarray:
    k1 = a.eval(x)
    k2 = a.eval(x + 0.5 * h * k1)
    k3 = a.eval(x + 0.5 * h * k2)
    k4 = a.eval(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate(a: VelocityField, x: np.ndarray, duration: float,
               opts: FlowOptions, step_fn=_rk4_step) -> np.ndarray:
    """Adaptive RK4 over a signed duration, shared step across the batch."""
    if duration == 0.0:
        return x.copy()
    sign = 1.0 if duration > 0 else -1.0
    remaining = abs(duration)
    h = min(opts.dt_max, remaining)
    steps = 0
    x = x.copy()
    while remaining > 1e-15 * abs(duration):
        h = min(h, remaining)
        full = step_fn(a, x, sign * h)
        half = step_fn(a, x, 0.5 * sign * h)
        double = step_fn(a, half, 0.5 * sign * h)
        err = float(np.max(np.abs(double - full))) / 15.0
        steps += 1
        if steps > opts.max_steps:
            raise FlowDivergenceError(
                f"no convergence after {opts.max_steps} steps (h = {h:.3e})")
        if err <= opts.tol * h or h <= 1e-14:
            x = double
            remaining -= h
            growth = 4.0 if err == 0.0 else min(
                4.0, max(0.2, 0.9 * (opts.tol * h / err)**0.25))
            h = min(opts.dt_max, h * growth)
        else:
            h = max(1e-14, h * max(0.2, 0.9 * (opts.tol * h / err)**0.25))
    return x


def _integrate_nodes(a: VelocityField, x: np.ndarray, nodes: np.ndarray,
                     opts: FlowOptions, step_fn=_rk4_step) -> list:
    """Positions at a monotone node sequence starting from time nodes[0] = 0."""
    out = [x.copy()]
    current = x
    for s0, s1 in zip(nodes[:-1], nodes[1:]):
        current = _integrate(a, current, s1 - s0, opts, step_fn)
        out.append(current)
    return out


def flow_map(a: VelocityField, t0: float, x0, t: float,
             opts: FlowOptions = FlowOptions()) -> np.ndarray:
    """x(t; t0, x0) for an autonomous field (only t - t0 matters)."""
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    pts = np.atleast_2d(x0)
    if pts.shape[1] != a.dim:
        raise ValueError(f"points must have dimension {a.dim}")
    result = _integrate(a, pts, t - t0, opts)
    return result[0] if single else result


def flow_points(a: VelocityField, points: np.ndarray, duration: float,
                opts: FlowOptions = FlowOptions()) -> np.ndarray:
    """Batch flow of many seed points over one signed duration."""
    return _integrate(a, np.atleast_2d(np.asarray(points, dtype=float)),
                      duration, opts)


def backward_label(a: VelocityField, t: float, x,
                   opts: FlowOptions = FlowOptions()) -> np.ndarray:
    """y(t, x) = x(0; t, x): the starting point of the characteristic through x."""
    return flow_map(a, t, x, 0.0, opts)


def semigroup_apply(a: VelocityField, t: float, u0, dim: int, n_modes: int,
                    opts: FlowOptions = FlowOptions()) -> TorusField:
    """Transported profile u(t, x) = u0(backward label of x) on the torus grid.

    ``u0`` is either a closure on points (P, dim) -> (P,) or a scalar
    TorusField (then evaluated by band-limited interpolation).
    """
    grid = torus_grid(dim, n_modes)
    labels = flow_points(a, grid.points, -t, opts)
    if isinstance(u0, TorusField):
        if u0.components != 1:
            raise ValueError("semigroup_apply transports scalar profiles")
        values = eval_trig_interp(u0, labels)[0]
    else:
        values = np.asarray(u0(labels), dtype=float)
    return TorusField(dim, values.reshape(grid.shape)[None])


# ---------------------------------------------------------------------------
# variational flow (Jacobians)
# ---------------------------------------------------------------------------

def _make_var_step(a: VelocityField, dim: int):
    jac = a.jac_eval

    def step(_field, state: np.ndarray, h: float) -> np.ndarray:
        # state columns: [x (dim), X flattened (dim*dim)]
        def rhs(s):
            x = s[:, :dim]
            m = s[:, dim:].reshape(-1, dim, dim)
            dx = a.eval(x)
            dm = np.einsum("pij,pjk->pik", jac(x), m)
            return np.concatenate([dx, dm.reshape(len(s), -1)], axis=1)

        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return step


def _flow_with_jacobian(a: VelocityField, points: np.ndarray, duration: float,
                        opts: FlowOptions, nodes: Optional[np.ndarray] = None):
    if a.jac_eval is None:
        raise ValueError("field has no jac_eval; use the finite-difference fallback")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dim = a.dim
    eye = np.broadcast_to(np.eye(dim).ravel(), (len(points), dim * dim))
    state = np.concatenate([points, eye], axis=1)
    step = _make_var_step(a, dim)
    if nodes is None:
        final = _integrate(a, state, duration, opts, step_fn=step)
        return final[:, :dim], final[:, dim:].reshape(-1, dim, dim)
    stages = _integrate_nodes(a, state, nodes, opts, step_fn=step)
    xs = np.stack([s[:, :dim] for s in stages])
    js = np.stack([s[:, dim:].reshape(-1, dim, dim) for s in stages])
    return xs, js


def jacobian_det(a: VelocityField, t: float, x,
                 opts: FlowOptions = FlowOptions(),
                 fd_fallback: bool = True) -> float:
    """det of the flow-map derivative d x(t; 0, y) / dy at y = x.

    Uses the variational equation X' = Da(x(s)) X when jac_eval is available;
    otherwise central differences of the flow map with step 1e-5 (unless the
    fallback is disabled, which is then an unsupported input).
    """
    x = np.asarray(x, dtype=float)
    if a.jac_eval is not None:
        _, jac = _flow_with_jacobian(a, x[None], t, opts)
        return float(np.linalg.det(jac[0]))
    if not fd_fallback:
        raise ValueError("field has no jac_eval and the fallback is disabled")
    step = 1e-5
    cols = []
    for j in range(a.dim):
        e = np.zeros(a.dim)
        e[j] = step
        plus = flow_map(a, 0.0, x + e, t, opts)
        minus = flow_map(a, 0.0, x - e, t, opts)
        cols.append((plus - minus) / (2.0 * step))
    return float(np.linalg.det(np.stack(cols, axis=1)))


# ---------------------------------------------------------------------------
# Lipschitz (one-sided Gronwall) check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LipschitzReport:
    max_ratio: float
    n_pairs: int
    within_bound: bool


def flow_lipschitz_check(a: VelocityField, s: float, pairs: np.ndarray,
                         opts: FlowOptions = FlowOptions()) -> LipschitzReport:
    """Spread of flowed pairs against the e^{m|s|} envelope.

    pairs: (P, 2, dim).  Ratio |x(s,y2) - x(s,y1)| / (|y2 - y1| e^{m|s|})
    must stay below 1 + 1e-6.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 3 or pairs.shape[1] != 2 or pairs.shape[2] != a.dim:
        raise ValueError("pairs must have shape (P, 2, dim)")
    before = np.linalg.norm(pairs[:, 1] - pairs[:, 0], axis=1)
    if np.any(before == 0.0):
        raise ValueError("pairs must be distinct points")
    flat = pairs.reshape(-1, a.dim)
    moved = flow_points(a, flat, s, opts).reshape(pairs.shape)
    after = np.linalg.norm(moved[:, 1] - moved[:, 0], axis=1)
    envelope = before * np.exp(a.lipschitz_m * abs(s))
    ratios = after / envelope
    worst = float(ratios.max())
    return LipschitzReport(worst, len(pairs), worst <= 1.0 + 1e-6)


# ---------------------------------------------------------------------------
# stationary problem along characteristics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolventParams:
    """Quadrature controls for the characteristic integral."""

    h: float
    support_radius_r: float
    quad_step: float = 2e-3
    tail_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.h <= 0:
            raise ValueError("h must be positive")
        if self.support_radius_r <= 0:
            raise ValueError("support radius must be positive")
        if not (0 < self.quad_step <= 0.1):
            raise ValueError("quad_step must lie in (0, 0.1]")
        if not (0 < self.tail_tol < 1e-3):
            raise ValueError("tail_tol must lie in (0, 1e-3)")


@dataclass(frozen=True)
class SmoothBump:
    """Compactly supported C-infinity bump with an analytic gradient."""

    center: np.ndarray
    width: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.width <= 0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def support_radius(self) -> float:
        return float(np.linalg.norm(self.center) + self.width)

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        rho2 = np.sum((x - self.center)**2, axis=-1) / self.width**2
        inside = rho2 < 1.0
        safe = np.where(inside, rho2, 0.0)
        val = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - safe))
        return np.where(inside, val, 0.0)

    def grad(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        offset = x - self.center
        rho2 = np.sum(offset**2, axis=-1) / self.width**2
        inside = rho2 < 1.0
        safe = np.where(inside, rho2, 0.0)
        val = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - safe))
        factor = np.where(inside, -2.0 * val / (self.width**2 * (1.0 - safe)**2), 0.0)
        return factor[..., None] * offset


def first_exit_time(a: VelocityField, r: float, y) -> float:
    """Largest s <= 0 at which a backward characteristic from |y| > r can
    still be inside the ball |x| <= r; zero inside the ball.

    The sublinear growth bound |a| <= c(1+|x|) forces
    |x(s)| >= (1+|y|) e^{c s} - 1, so s(y) = -(1/c) ln((1+|y|)/(1+r)).
    """
    norm_y = float(np.linalg.norm(np.atleast_1d(y)))
    if norm_y <= r:
        return 0.0
    return -np.log((1.0 + norm_y) / (1.0 + r)) / a.growth_c


def _resolvent_nodes(params: ResolventParams):
    s_tail = params.h * np.log(params.tail_tol)
    n_int = 2 * int(np.ceil(-s_tail / (2.0 * params.quad_step)))
    nodes = np.linspace(0.0, s_tail, n_int + 1)
    spacing = -s_tail / n_int
    weights = np.ones(n_int + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    weights *= spacing / 3.0
    return nodes, weights


def _check_resolvent_pre(a: VelocityField, psi: SmoothBump,
                         params: ResolventParams) -> None:
    if params.h * a.lipschitz_m >= 1.0:
        raise ValueError(
            f"h = {params.h} with Lipschitz m = {a.lipschitz_m} violates h*m < 1")
    if psi.support_radius > params.support_radius_r + 1e-12:
        raise ValueError("bump support sticks out of the declared radius")


def resolvent_apply(a: VelocityField, psi: SmoothBump, params: ResolventParams,
                    y, opts: FlowOptions = FlowOptions()) -> np.ndarray:
    """phi(y) = (1/h) int e^{s/h} psi(x(s; 0, y)) ds by composite Simpson.

    Truncation error is below tail_tol * sup|psi|; node spacing <= quad_step.
    Accepts a single point (dim,) or a batch (P, dim); one backward trajectory
    per point supplies all quadrature nodes.
    """
    _check_resolvent_pre(a, psi, params)
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    pts = np.atleast_2d(y)
    nodes, weights = _resolvent_nodes(params)
    positions = _integrate_nodes(a, pts, nodes, opts)
    acc = np.zeros(len(pts))
    for w, s, pos in zip(weights, nodes, positions):
        acc += w * np.exp(s / params.h) * psi.value(pos)
    acc /= params.h
    return float(acc[0]) if single else acc


def resolvent_gradient(a: VelocityField, psi: SmoothBump,
                       params: ResolventParams, y,
                       opts: FlowOptions = FlowOptions()) -> np.ndarray:
    """grad phi(y) = (1/h) int e^{s/h} X(s)^T grad psi(x(s; 0, y)) ds."""
    _check_resolvent_pre(a, psi, params)
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    pts = np.atleast_2d(y)
    nodes, weights = _resolvent_nodes(params)
    if a.jac_eval is not None:
        xs, js = _flow_with_jacobian(a, pts, nodes[-1], opts, nodes=nodes)
        acc = np.zeros_like(pts)
        for i, (w, s) in enumerate(zip(weights, nodes)):
            g = psi.grad(xs[i])
            acc += w * np.exp(s / params.h) * np.einsum("pji,pj->pi", js[i], g)
        acc /= params.h
        return acc[0] if single else acc
    # finite-difference fallback on phi itself
    step = 1e-5
    cols = []
    for j in range(a.dim):
        e = np.zeros(a.dim)
        e[j] = step
        plus = resolvent_apply(a, psi, params, pts + e, opts)
        minus = resolvent_apply(a, psi, params, pts - e, opts)
        cols.append((plus - minus) / (2.0 * step))
    acc = np.stack(cols, axis=-1)
    return acc[0] if single else acc


# ---------------------------------------------------------------------------
# decay fits
# ---------------------------------------------------------------------------

class DecayInconclusiveError(RuntimeError):
    """All probed values fell below the tail tolerance; radii too large."""


@dataclass(frozen=True)
class DecayReport:
    radii: np.ndarray
    value_max: np.ndarray
    gradient_max: np.ndarray
    slope_value: float
    slope_gradient: float
    bound_value: float
    bound_gradient: float
    margin_fraction: float

    @property
    def value_within_bound(self) -> bool:
        return self.slope_value <= self.bound_value * (1.0 - self.margin_fraction)

    @property
    def gradient_within_bound(self) -> bool:
        return self.slope_gradient <= self.bound_gradient * (1.0 - self.margin_fraction)


def _ring_points(dim: int, radius: float, n_dirs: int = 16) -> np.ndarray:
    if dim == 1:
        return np.array([[radius], [-radius]])
    if dim == 2:
        angles = np.linspace(0.0, 2.0 * np.pi, n_dirs, endpoint=False)
        return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    # spherical Fibonacci directions
    i = np.arange(n_dirs) + 0.5
    phi = np.arccos(1 - 2 * i / n_dirs)
    golden = np.pi * (1 + 5**0.5) * i
    dirs = np.stack([np.cos(golden) * np.sin(phi),
                     np.sin(golden) * np.sin(phi), np.cos(phi)], axis=1)
    return radius * dirs


def decay_check(a: VelocityField, psi: SmoothBump, params: ResolventParams,
                radii: Sequence[float], margin_fraction: float = 0.15,
                opts: FlowOptions = FlowOptions()) -> DecayReport:
    """Fit the decay exponents of phi and grad phi against the declared bounds.

    Samples max |phi| and max |grad phi| on rings |y| = R for each radius
    (all beyond the support radius), fits the slope of log(max) against
    log(1 + R), and compares with -alpha/h and -alpha(1/h - m).  Radii whose
    samples sit below tail_tol are dropped from the fit; if fewer than two
    remain the check is inconclusive.
    """
    radii = np.asarray(sorted(radii), dtype=float)
    if np.any(radii <= params.support_radius_r):
        raise ValueError("decay radii must lie beyond the support radius")
    value_max = np.empty(radii.size)
    grad_max = np.empty(radii.size)
    for i, r in enumerate(radii):
        ring = _ring_points(a.dim, r)
        value_max[i] = np.max(np.abs(resolvent_apply(a, psi, params, ring, opts)))
        grads = resolvent_gradient(a, psi, params, ring, opts)
        grad_max[i] = np.max(np.linalg.norm(grads, axis=-1))
    keep = value_max > params.tail_tol
    if np.count_nonzero(keep) < 2:
        raise DecayInconclusiveError(
            "all sampled magnitudes fall below tail_tol; radii too large")
    log_r = np.log1p(radii[keep])
    slope_value = float(np.polyfit(log_r, np.log(value_max[keep]), 1)[0])
    keep_g = keep & (grad_max > params.tail_tol)
    if np.count_nonzero(keep_g) < 2:
        raise DecayInconclusiveError("gradient samples all below tail_tol")
    slope_grad = float(np.polyfit(np.log1p(radii[keep_g]),
                                  np.log(grad_max[keep_g]), 1)[0])
    alpha = a.alpha
    return DecayReport(radii, value_max, grad_max, slope_value, slope_grad,
                       -alpha / params.h,
                       -alpha * (1.0 / params.h - a.lipschitz_m),
                       margin_fraction)
