"""
Sampled 2*pi-periodic lifts g: R -> R^3 \\ {0} of closed convex projective curves.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_GRID, DEFAULT_TOLERANCES, Tolerances
from .errors import (
    InvalidCurveSpecError,
    MixedSignError,
    NearDegenerateError,
    NonMonotoneError,
)
from .spectral import TrigInterpolant, fourier_derivative, grid, resolved_bandwidth

log = logging.getLogger(__name__)

FAMILIES = ("circular_cone", "perturbed_ellipse", "affine_graph", "raw_samples")


@dataclass(frozen=True)
class PeriodicVectorCurve:
    samples: np.ndarray
    orientation_flipped: bool = False
    min_delta: float | None = None

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def t(self) -> np.ndarray:
        return grid(self.n)


@dataclass(frozen=True)
class CurveSpec:
    """Description of a test family, or raw samples, as ingested from JSON.

    Families
    --------
    circular_cone
        g(t) = (1, cos t, sin t).
    perturbed_ellipse
        g(t) = (1, rho cos t, rho sin t) with rho = 1 + eps cos(k t).
    affine_graph
        g(t) = (1, x(t), y(t)) with x, y trigonometric polynomials given by
        coefficient lists ``x_cos, x_sin, y_cos, y_sin`` (index j is the
        j-th harmonic, index 0 the constant term of the cosine lists).
    raw_samples
        ``data`` holds N triples at the uniform nodes.
    """

    family: str
    params: dict = field(default_factory=dict)
    n: int | None = None
    data: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidCurveSpecError(f"unknown curve family {self.family!r}")
        if self.family == "raw_samples":
            if self.data is None:
                raise InvalidCurveSpecError("raw_samples requires data")
            data = np.asarray(self.data, dtype=float)
            if data.ndim != 2 or data.shape[1] != 3:
                raise InvalidCurveSpecError("raw_samples data must be a list of triples")
            object.__setattr__(self, "data", data)
            if self.n is None:
                object.__setattr__(self, "n", data.shape[0])
            elif self.n != data.shape[0]:
                raise InvalidCurveSpecError(
                    f"raw_samples has {data.shape[0]} triples but N={self.n}"
                )
        elif self.n is None:
            object.__setattr__(self, "n", DEFAULT_GRID)
        _check_grid_size(self.n)
        if self.family == "perturbed_ellipse":
            eps = float(self.params.get("eps", 0.0))
            k = int(self.params.get("k", 3))
            if k < 1:
                raise InvalidCurveSpecError("perturbed_ellipse needs harmonic k >= 1")
            if abs(eps) * (k * k + 1) >= 1.0:
                raise InvalidCurveSpecError(
                    f"perturbed_ellipse eps={eps}, k={k} violates |eps|(k^2+1) < 1"
                )

    @classmethod
    def from_dict(cls, doc: dict) -> "CurveSpec":
        if not isinstance(doc, dict) or "family" not in doc:
            raise InvalidCurveSpecError("curve spec must be an object with a 'family' key")
        family = doc["family"]
        params = dict(doc.get("params", {}))
        data = doc.get("data")
        n = doc.get("N")
        return cls(family=family, params=params, n=None if n is None else int(n), data=data)


def _check_grid_size(n):
    if not (64 <= n <= 65536) or n & (n - 1):
        raise InvalidCurveSpecError(f"grid size must be a power of two in [64, 65536], got {n}")


def family_function(spec: CurveSpec):
    """Return the analytic map t -> g(t) (shape (..., 3)) of a built-in family."""
    params = spec.params
    if spec.family == "circular_cone":
        def g(t):
            t = np.asarray(t, dtype=float)
            return np.stack([np.ones_like(t), np.cos(t), np.sin(t)], axis=-1)
    elif spec.family == "perturbed_ellipse":
        eps = float(params.get("eps", 0.0))
        k = int(params.get("k", 3))

        def g(t):
            t = np.asarray(t, dtype=float)
            rho = 1.0 + eps * np.cos(k * t)
            return np.stack([np.ones_like(t), rho * np.cos(t), rho * np.sin(t)], axis=-1)
    elif spec.family == "affine_graph":
        def series(t, cos_c, sin_c):
            out = np.zeros_like(t)
            for j, c in enumerate(cos_c):
                out = out + c * np.cos(j * t)
            for j, c in enumerate(sin_c):
                out = out + c * np.sin(j * t)
            return out

        xc, xs = params.get("x_cos", [0.0, 1.0]), params.get("x_sin", [])
        yc, ys = params.get("y_cos", []), params.get("y_sin", [0.0, 1.0])

        def g(t):
            t = np.asarray(t, dtype=float)
            return np.stack([np.ones_like(t), series(t, xc, xs), series(t, yc, ys)], axis=-1)
    else:
        raise InvalidCurveSpecError(f"family {spec.family!r} has no analytic form")
    return g


def build_family(spec: CurveSpec) -> PeriodicVectorCurve:
    """Sample the requested family on the uniform grid (no validation)."""
    if spec.family == "raw_samples":
        return PeriodicVectorCurve(samples=np.array(spec.data, dtype=float))
    return PeriodicVectorCurve(samples=family_function(spec)(grid(spec.n)))


def trig_derivative(curve: PeriodicVectorCurve, order: int) -> np.ndarray:
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    return fourier_derivative(curve.samples, order, resolved_bandwidth(curve.samples))


def determinant_field(samples: np.ndarray) -> np.ndarray:
    """Delta(t_k) = det(g'', g', g) at every node."""
    band = resolved_bandwidth(samples)
    d1 = fourier_derivative(samples, 1, band)
    d2 = fourier_derivative(samples, 2, band)
    return np.linalg.det(np.stack([d2, d1, samples], axis=-1))


def reverse(samples: np.ndarray) -> np.ndarray:
    """Samples of g(-t), keeping node 0 fixed."""
    return np.roll(samples[::-1], 1, axis=0)


def orient_and_validate(curve: PeriodicVectorCurve,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> PeriodicVectorCurve:
    """
    Fix the orientation so that det(g'', g', g) > 0 and reject degenerate input.

    Raises
    ------
    NearDegenerateError
        If min |Delta| is below ``tol.degeneracy`` relative to max |Delta|,
        or if a sample is (numerically) zero.
    MixedSignError
        If Delta changes sign (inflection point).
    """
    samples = np.asarray(curve.samples, dtype=float)
    if not np.all(np.isfinite(samples)):
        raise NearDegenerateError("curve samples are not finite")
    norms = np.linalg.norm(samples, axis=1)
    if norms.min() <= 1e-12 * norms.max():
        raise NearDegenerateError("curve passes through the origin")

    delta = determinant_field(samples)
    scale = np.abs(delta).max()
    significant = np.abs(delta) >= tol.degeneracy * scale if scale > 0 else delta != 0
    if np.any(significant & (delta > 0)) and np.any(significant & (delta < 0)):
        raise MixedSignError("det(g'', g', g) changes sign: curve has inflection points")
    if scale == 0.0 or not np.all(significant):
        raise NearDegenerateError(
            f"min |det(g'', g', g)| = {np.abs(delta).min():.3e} relative to {scale:.3e}"
        )
    if np.all(delta > 0):
        flipped = curve.orientation_flipped
    elif np.all(delta < 0):
        samples = reverse(samples)
        delta = -reverse(delta)
        flipped = not curve.orientation_flipped
    else:
        raise MixedSignError("det(g'', g', g) changes sign: curve has inflection points")

    _warn_on_aliasing(samples)
    return replace(curve, samples=samples, orientation_flipped=flipped,
                   min_delta=float(delta.min()))


def _warn_on_aliasing(samples):
    coeffs = np.abs(np.fft.rfft(samples, axis=0)).max(axis=1)
    n = coeffs.size
    tail = coeffs[int(0.8 * n):].max()
    if tail > 1e-10 * coeffs.max():
        log.warning("spectral tail of the input is %.2e of its peak; the grid may be too coarse",
                    tail / coeffs.max())


def resample(curve: PeriodicVectorCurve, reparam) -> PeriodicVectorCurve:
    """
    Express the curve in a new parameter s on the uniform s-grid.

    ``reparam`` needs ``ds_dt`` (values at the t-nodes) and ``t_of_s``
    (values at the uniform s-nodes); see
    :class:`conebalance.balancer.Reparametrization`.
    """
    if np.any(np.asarray(reparam.ds_dt) <= 0):
        raise NonMonotoneError("reparametrization is not strictly increasing")
    values = TrigInterpolant(curve.samples)(np.asarray(reparam.t_of_s))
    return replace(curve, samples=values, min_delta=None)


def to_csv(curve: PeriodicVectorCurve) -> str:
    lines = [f"# N={curve.n} orientation_flipped={str(curve.orientation_flipped).lower()}",
             "t,g0,g1,g2"]
    for t, row in zip(curve.t, curve.samples):
        lines.append(",".join(f"{v:.17g}" for v in (t, *row)))
    return "\n".join(lines) + "\n"
