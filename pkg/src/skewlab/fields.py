"""Velocity fields driving the transport and linearized-flow experiments.

A :class:`VelocityField` packages a vectorized evaluator with the analytic
data the estimates need: a Lipschitz constant m with |a(x)-a(y)| <= m|x-y|,
a sublinear growth constant c with |a(x)| <= c(1+|x|), a periodicity flag
(2*pi-periodic fields can live on the torus grid; the others are evaluated
pointwise on R^n), and a solenoidality flag.  ``alpha = 1/c`` is the exponent
scale entering the decay estimates for stationary solutions.

Bundled fields registered for the experiment runner: ``rotation``,
``constant``, ``shear_sin``, ``stream_random`` (band-limited random stream
function, hence exactly solenoidal).  A few extra factories exist for
diagnostics: ``vortex_sin`` (periodic solenoidal rotation analogue),
``radial`` (a(x) = x, non-solenoidal probe) and ``spiral`` (linear field with
|a(x)| = c|x| whose backward orbits spiral inward, used for decay fits).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .grids import torus_grid
from .rng import named_stream

__all__ = [
    "VelocityField",
    "rotation_field",
    "constant_field",
    "shear_field",
    "vortex_field",
    "stream_random_field",
    "spiral_field",
    "radial_field",
    "negated",
    "make_field",
    "FIELD_REGISTRY",
    "validate_field",
]


@dataclass(frozen=True)
class VelocityField:
    """Autonomous velocity field a: R^dim -> R^dim with declared bounds."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]        # (..., dim) -> (..., dim)
    lipschitz_m: float
    growth_c: float
    periodic: bool
    solenoidal: bool
    jac_eval: Optional[Callable[[np.ndarray], np.ndarray]] = None  # -> (..., dim, dim)
    name: str = ""

    def __post_init__(self) -> None:
        if self.lipschitz_m <= 0 or self.growth_c <= 0:
            raise ValueError("lipschitz_m and growth_c must be positive")

    @property
    def alpha(self) -> float:
        """Decay exponent scale 1/growth_c."""
        return 1.0 / self.growth_c

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.eval(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def rotation_field(center=(np.pi, np.pi), rate: float = 1.0) -> VelocityField:
    """Rigid rotation about ``center``: a(x) = rate * (-(x2-c2), x1-c1)."""
    center = np.asarray(center, dtype=float)
    rate = float(rate)

    def ev(x):
        y = x - center
        return rate * np.stack([-y[..., 1], y[..., 0]], axis=-1)

    def jac(x):
        j = np.array([[0.0, -rate], [rate, 0.0]])
        return np.broadcast_to(j, x.shape[:-1] + (2, 2))

    c = abs(rate) * (1.0 + float(np.linalg.norm(center)))
    return VelocityField(2, ev, abs(rate), c, periodic=False, solenoidal=True,
                         jac_eval=jac, name="rotation")


def constant_field(vector) -> VelocityField:
    """Uniform field a(x) = v; periodic and solenoidal trivially."""
    vector = np.atleast_1d(np.asarray(vector, dtype=float))
    dim = vector.size

    def ev(x):
        return np.broadcast_to(vector, x.shape).copy()

    def jac(x):
        return np.zeros(x.shape[:-1] + (dim, dim))

    c = max(float(np.linalg.norm(vector)), 1.0)
    return VelocityField(dim, ev, 1.0, c, periodic=True, solenoidal=True,
                         jac_eval=jac, name="constant")


def shear_field() -> VelocityField:
    """Periodic shear a(x) = (sin x2, 0); 1-Lipschitz, solenoidal."""

    def ev(x):
        return np.stack([np.sin(x[..., 1]), np.zeros_like(x[..., 0])], axis=-1)

    def jac(x):
        z = np.zeros_like(x[..., 0])
        row1 = np.stack([z, np.cos(x[..., 1])], axis=-1)
        row2 = np.stack([z, z], axis=-1)
        return np.stack([row1, row2], axis=-2)

    return VelocityField(2, ev, 1.0, 1.0, periodic=True, solenoidal=True,
                         jac_eval=jac, name="shear_sin")


def vortex_field() -> VelocityField:
    """Periodic solenoidal rotation analogue a(x) = (-sin x2, sin x1)."""

    def ev(x):
        return np.stack([-np.sin(x[..., 1]), np.sin(x[..., 0])], axis=-1)

    def jac(x):
        z = np.zeros_like(x[..., 0])
        row1 = np.stack([z, -np.cos(x[..., 1])], axis=-1)
        row2 = np.stack([np.cos(x[..., 0]), z], axis=-1)
        return np.stack([row1, row2], axis=-2)

    # |a| <= sqrt(2), |Da| <= 1 in the spectral norm (rows are orthogonal)
    return VelocityField(2, ev, 1.0, float(np.sqrt(2.0)), periodic=True,
                         solenoidal=True, jac_eval=jac, name="vortex_sin")


def stream_random_field(seed: int = 0, max_mode: int = 3,
                        amplitude: float = 0.5) -> VelocityField:
    """Solenoidal field from a random band-limited stream function.

    psi(x) = sum over modes |m|_inf <= max_mode of random cos/sin terms;
    a = (d psi/dx2, -d psi/dx1) so div a = 0 identically.
    """
    rng = named_stream(seed, "stream_random")
    modes = [(m1, m2)
             for m1 in range(0, max_mode + 1)
             for m2 in range(-max_mode, max_mode + 1)
             if (m1, m2) != (0, 0) and not (m1 == 0 and m2 < 0)]
    weights = np.array([1.0 / (m1 * m1 + m2 * m2) for m1, m2 in modes])
    cos_amp = amplitude * weights * rng.standard_normal(len(modes))
    sin_amp = amplitude * weights * rng.standard_normal(len(modes))
    m_arr = np.asarray(modes, dtype=float)  # (M, 2)

    def psi_grad(x):
        phase = np.tensordot(x, m_arr.T, axes=([-1], [0]))
        cos_p, sin_p = np.cos(phase), np.sin(phase)
        # d/dx_l psi = sum_m m_l * (-c sin + s cos)
        coeff = -sin_p * cos_amp + cos_p * sin_amp  # (..., M)
        return np.tensordot(coeff, m_arr, axes=([-1], [0]))  # (..., 2)

    def psi_hess(x):
        phase = np.tensordot(x, m_arr.T, axes=([-1], [0]))
        cos_p, sin_p = np.cos(phase), np.sin(phase)
        coeff = -cos_p * cos_amp - sin_p * sin_amp  # (..., M)
        outer = m_arr[:, :, None] * m_arr[:, None, :]  # (M, 2, 2)
        return np.tensordot(coeff, outer, axes=([-1], [0]))  # (..., 2, 2)

    def ev(x):
        g = psi_grad(x)
        return np.stack([g[..., 1], -g[..., 0]], axis=-1)

    def jac(x):
        h = psi_hess(x)
        row1 = np.stack([h[..., 1, 0], h[..., 1, 1]], axis=-1)
        row2 = np.stack([-h[..., 0, 0], -h[..., 0, 1]], axis=-1)
        return np.stack([row1, row2], axis=-2)

    # measure the declared bounds on a fine probe grid; the 0.2% headroom
    # covers sup values falling between probe points
    probe = torus_grid(2, 128).points
    speeds = np.linalg.norm(ev(probe), axis=-1)
    jn = np.linalg.norm(jac(probe), ord=2, axis=(-2, -1))
    m = float(jn.max()) * 1.002 + 1e-12
    c = float(speeds.max()) * 1.002 + 1e-12
    return VelocityField(2, ev, m, c, periodic=True, solenoidal=True,
                         jac_eval=jac, name=f"stream_random({seed})")


def spiral_field(growth_c: float = 2.0) -> VelocityField:
    """Linear outward spiral a(x) = eps*x + (-x2, x1), eps = sqrt(c^2 - 1).

    |a(x)| = c|x| exactly, so growth_c = lipschitz_m = c.  Backward orbits
    spiral into the origin, which makes stationary-solution decay fits
    non-degenerate (a pure rotation never leaves its circle).
    """
    if growth_c <= 1.0:
        raise ValueError("spiral needs growth_c > 1")
    eps = float(np.sqrt(growth_c**2 - 1.0))

    def ev(x):
        return np.stack([eps * x[..., 0] - x[..., 1],
                         x[..., 0] + eps * x[..., 1]], axis=-1)

    def jac(x):
        j = np.array([[eps, -1.0], [1.0, eps]])
        return np.broadcast_to(j, x.shape[:-1] + (2, 2))

    return VelocityField(2, ev, float(growth_c), float(growth_c),
                         periodic=False, solenoidal=False, jac_eval=jac,
                         name=f"spiral(c={growth_c})")


def radial_field(dim: int = 2) -> VelocityField:
    """Non-solenoidal diagnostic a(x) = x (volume growth det = e^{dim*t})."""

    def ev(x):
        return x.copy()

    def jac(x):
        return np.broadcast_to(np.eye(dim), x.shape[:-1] + (dim, dim))

    return VelocityField(dim, ev, 1.0, 1.0, periodic=False, solenoidal=False,
                         jac_eval=jac, name="radial")


def negated(a: VelocityField) -> VelocityField:
    """The reversed field -a (same bounds, same flags)."""

    def ev(x):
        return -a.eval(x)

    if a.jac_eval is None:
        jac = None
    else:
        orig_jac = a.jac_eval

        def jac(x):
            return -orig_jac(x)

    return VelocityField(a.dim, ev, a.lipschitz_m, a.growth_c, a.periodic,
                         a.solenoidal, jac_eval=jac, name=f"-({a.name})")


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

FIELD_REGISTRY = {
    "rotation": rotation_field,
    "constant": constant_field,
    "shear_sin": shear_field,
    "stream_random": stream_random_field,
}


def make_field(name: str, **kwargs) -> VelocityField:
    if name not in FIELD_REGISTRY:
        raise KeyError(f"unknown field {name!r}; known: {sorted(FIELD_REGISTRY)}")
    return FIELD_REGISTRY[name](**kwargs)


# ---------------------------------------------------------------------------
# declared-bound validation
# ---------------------------------------------------------------------------

def validate_field(a: VelocityField, seed: int = 0, box: float = 2.0) -> dict:
    """Probe the declared bounds; raises ValueError on violation.

    Checks, on a 32^dim probe grid (the torus grid for periodic fields, the
    box [-box, box]^dim otherwise) and 1000 random pairs:

    * sampled divergence magnitude <= 1e-6 * (1 + max |grad a|) if solenoidal
    * |a(x) - a(y)| <= lipschitz_m * |x - y|
    * |a(x)| <= growth_c * (1 + |x|)
    """
    if a.periodic:
        pts = torus_grid(a.dim, 32).points
    else:
        axes = [np.linspace(-box, box, 32)] * a.dim
        pts = np.stack(np.meshgrid(*axes, indexing="ij")).reshape(a.dim, -1).T
    vals = a.eval(pts)

    if a.jac_eval is not None:
        jac = a.jac_eval(pts)
        grad_max = float(np.abs(jac).max())
        div = np.trace(jac, axis1=-2, axis2=-1)
    else:
        step = 1e-5
        grad_cols = []
        for j in range(a.dim):
            e = np.zeros(a.dim)
            e[j] = step
            grad_cols.append((a.eval(pts + e) - a.eval(pts - e)) / (2 * step))
        jac = np.stack(grad_cols, axis=-1)
        grad_max = float(np.abs(jac).max())
        div = np.trace(jac, axis1=-2, axis2=-1)

    report = {"div_max": float(np.abs(div).max()), "grad_max": grad_max}
    if a.solenoidal and report["div_max"] > 1e-6 * (1.0 + grad_max):
        raise ValueError(f"declared solenoidal but div reaches {report['div_max']:.3e}")

    rng = named_stream(seed, f"validate:{a.name}")
    x = rng.uniform(-box, box, size=(1000, a.dim))
    y = rng.uniform(-box, box, size=(1000, a.dim))
    num = np.linalg.norm(a.eval(x) - a.eval(y), axis=-1)
    den = np.linalg.norm(x - y, axis=-1)
    lip_ratio = float(np.max(num / np.maximum(den, 1e-300)))
    report["lipschitz_ratio"] = lip_ratio / a.lipschitz_m
    if lip_ratio > a.lipschitz_m * (1.0 + 1e-9):
        raise ValueError(f"Lipschitz bound violated: {lip_ratio:.6g} > {a.lipschitz_m}")

    speeds = np.linalg.norm(np.concatenate([vals, a.eval(x)]), axis=-1)
    radii = np.linalg.norm(np.concatenate([pts, x]), axis=-1)
    growth_ratio = float(np.max(speeds / (a.growth_c * (1.0 + radii))))
    report["growth_ratio"] = growth_ratio
    if growth_ratio > 1.0 + 1e-9:
        raise ValueError(f"growth bound violated by factor {growth_ratio:.6g}")
    return report
