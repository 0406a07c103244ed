"""
Canonical lift, invariant coefficients alpha and beta, frame path and dual curve.

The canonical lift y solves

    y''' + 2 alpha y' + alpha' y + beta y = 0,   det(y'', y', y) = 1,

and the frame Y = (y'' + alpha y, y', y) obeys Y' = Y A_- with

    A_(+/-) = [[0, 1, 0], [-alpha, 0, 1], [+/-beta, -alpha, 0]].
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_TOLERANCES, Tolerances
from .curve_model import PeriodicVectorCurve, determinant_field
from .errors import (
    ClosureDefectError,
    GaugeViolationError,
    IllConditionedError,
    NearDegenerateError,
    NegativePairingError,
    StepFailureError,
)
from .spectral import (
    TWO_PI,
    TrigInterpolant,
    fourier_derivative,
    grid,
    resolved_bandwidth,
    truncate_spectrum,
)

# Y^T Z = Q relates the frame of a curve to the frame of its dual
DUAL_Q = np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])


@dataclass(frozen=True)
class CanonicalLift:
    y: np.ndarray
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None
    c2_residual: float | None = None
    max_condition: float | None = None
    orientation_flipped: bool = False

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def t(self):
        return grid(self.n)


@dataclass(frozen=True)
class FramePath:
    Y: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    det_defect: float
    ode_residual: float
    closure_defect: float


@dataclass(frozen=True)
class DualLift:
    z: np.ndarray
    Z: np.ndarray
    alpha_dual: np.ndarray | None
    beta_dual: np.ndarray | None
    duality_defect: float
    orthogonality_defect: float


@dataclass(frozen=True)
class InequalityReport:
    t0_index: int
    max_value: float
    values: np.ndarray
    interior: np.ndarray
    mu: np.ndarray
    nu: np.ndarray


def canonical_lift(curve: PeriodicVectorCurve) -> CanonicalLift:
    """Rescale g by Delta^(-1/3) so that det(y'', y', y) = 1."""
    g = curve.samples
    delta = determinant_field(g)
    if np.any(delta <= 0):
        raise NearDegenerateError("canonical lift needs det(g'', g', g) > 0; orient the curve first")
    band = resolved_bandwidth(g)
    if band is not None:
        # g'' carries ~eps |g| band^2 of rounding noise, which would reach
        # alpha through the second derivatives of Delta^(-1/3)
        noise = 100.0 * np.finfo(float).eps * np.abs(g).max() ** 3 * max(band, 1) ** 2
        delta = truncate_spectrum(delta, noise * np.sqrt(g.shape[0]))
    y = g * np.cbrt(1.0 / delta)[:, None]
    return CanonicalLift(y=y, orientation_flipped=curve.orientation_flipped)


def _frame_derivatives(y):
    band = resolved_bandwidth(y)
    return tuple(fourier_derivative(y, k, band) for k in (1, 2, 3))


def solve_general_coefficients(y, tol: Tolerances = DEFAULT_TOLERANCES):
    """
    Pointwise solve y''' = -c2 y'' - c1 y' - c0 y.

    Returns ``(c2, c1, c0, max_condition)``.
    """
    d1, d2, d3 = _frame_derivatives(y)
    mats = np.stack([d2, d1, y], axis=-1)
    cond = np.linalg.cond(mats)
    max_cond = float(cond.max())
    if not np.isfinite(max_cond) or max_cond > tol.condition:
        raise IllConditionedError(f"nodal coefficient system has condition number {max_cond:.3e}")
    coeffs = np.linalg.solve(mats, -d3[..., None])[..., 0]
    return coeffs[:, 0], coeffs[:, 1], coeffs[:, 2], max_cond


def extract_coefficients(lift: CanonicalLift, tol: Tolerances = DEFAULT_TOLERANCES) -> CanonicalLift:
    """Fill in alpha = c1/2 and beta = c0 - alpha' (the lift is in the c2 = 0 gauge)."""
    c2, c1, c0, max_cond = solve_general_coefficients(lift.y, tol)
    residual = float(np.abs(c2).max())
    if residual > tol.gauge:
        raise GaugeViolationError(f"|c2| reaches {residual:.3e}; lift is not normalized")
    alpha = 0.5 * c1
    beta = c0 - fourier_derivative(alpha, 1, resolved_bandwidth(alpha))
    return replace(lift, alpha=alpha, beta=beta, c2_residual=residual, max_condition=max_cond)


def lift_from_curve(curve: PeriodicVectorCurve, tol: Tolerances = DEFAULT_TOLERANCES) -> CanonicalLift:
    return extract_coefficients(canonical_lift(curve), tol)


def a_matrix(alpha, beta, sign=-1):
    """A_-(t) (sign=-1) or A_+(t) (sign=+1), stacked over the nodes."""
    alpha = np.atleast_1d(alpha)
    beta = np.atleast_1d(beta)
    out = np.zeros(alpha.shape + (3, 3))
    out[..., 0, 1] = 1.0
    out[..., 1, 0] = -alpha
    out[..., 1, 2] = 1.0
    out[..., 2, 0] = sign * beta
    out[..., 2, 1] = -alpha
    return out


def assemble_frame(y, alpha):
    band = resolved_bandwidth(y)
    d1 = fourier_derivative(y, 1, band)
    d2 = fourier_derivative(y, 2, band)
    return np.stack([d2 + alpha[:, None] * y, d1, y], axis=-1)


def propagate_frame(Y0, alpha, beta, t_span=(0.0, TWO_PI), tol: Tolerances = DEFAULT_TOLERANCES,
                    sign=-1):
    """Integrate Y' = Y A(t) with trigonometrically interpolated coefficients."""
    coef = TrigInterpolant(np.column_stack([alpha, beta]))

    def rhs(t, flat):
        a, b = coef(t)
        return (flat.reshape(3, 3) @ a_matrix(a, b, sign)[0]).ravel()

    sol = solve_ivp(rhs, t_span, np.asarray(Y0, dtype=float).ravel(), method="DOP853",
                    rtol=tol.ode_rtol, atol=tol.ode_atol)
    if not sol.success:
        raise StepFailureError(sol.message)
    return sol.y[:, -1].reshape(3, 3)


def frame_path(lift: CanonicalLift, tol: Tolerances = DEFAULT_TOLERANCES) -> FramePath:
    """
    Assemble Y = (y'' + alpha y, y', y) and check it against Y' = Y A_-.

    The closure defect compares Y(0) with Y(0) carried once around the
    period by the matrix ODE.
    """
    if lift.alpha is None:
        raise ValueError("extract_coefficients must run before frame_path")
    Y = assemble_frame(lift.y, lift.alpha)
    det_defect = float(np.abs(np.linalg.det(Y) - 1.0).max())
    flat = Y.reshape(lift.n, 9)
    dY = fourier_derivative(flat, 1, resolved_bandwidth(flat)).reshape(-1, 3, 3)
    ode_residual = float(np.abs(dY - Y @ a_matrix(lift.alpha, lift.beta)).max())
    Y_end = propagate_frame(Y[0], lift.alpha, lift.beta, tol=tol)
    closure = float(np.abs(Y_end - Y[0]).max())
    if closure > tol.closure or det_defect > 1e2 * tol.closure:
        raise ClosureDefectError(
            f"frame does not close up: defect {closure:.3e}, det defect {det_defect:.3e}"
        )
    return FramePath(Y=Y, alpha=lift.alpha, beta=lift.beta, det_defect=det_defect,
                     ode_residual=ode_residual, closure_defect=closure)


def dual_lift(frame: FramePath, tol: Tolerances = DEFAULT_TOLERANCES,
              coefficients: bool = True) -> DualLift:
    """
    Dual frame Z = Y^{-T} Q; its last column z lifts the dual curve.

    With ``coefficients=False`` only the frame and its defects are computed,
    which is all the inequality check needs.
    """
    Z = np.linalg.inv(frame.Y).transpose(0, 2, 1) @ DUAL_Q
    z = Z[:, :, 2].copy()
    alpha_dual = beta_dual = None
    if coefficients:
        dual = extract_coefficients(CanonicalLift(y=z), tol)
        alpha_dual, beta_dual = dual.alpha, dual.beta
    duality = float(np.abs(frame.Y.transpose(0, 2, 1) @ Z - DUAL_Q).max())
    y = frame.Y[:, :, 2]
    dy = frame.Y[:, :, 1]
    ortho = float(max(np.abs(np.einsum("ij,ij->i", y, z)).max(),
                      np.abs(np.einsum("ij,ij->i", dy, z)).max()))
    return DualLift(z=z, Z=Z, alpha_dual=alpha_dual, beta_dual=beta_dual,
                    duality_defect=duality, orthogonality_defect=ortho)


def _divide_double_zero(f):
    """
    f / (1 - cos t) for samples of f with a double zero at node 0.

    Returns the quotient and the bandwidth of f, which bounds that of the
    quotient; the pointwise division is noisy next to the zero, and the
    truncation removes that noise before differentiation.
    """
    n = f.shape[0]
    w = 1.0 - np.cos(grid(n))
    q = np.empty(n)
    q[1:] = f[1:] / w[1:]
    q[0] = fourier_derivative(f, 2)[0]  # limit f''(0) / w''(0)
    return q, resolved_bandwidth(f)


def duality_inequality_check(lift: CanonicalLift, dual: DualLift, t0_index: int,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityReport:
    """
    Evaluate psi' + psi^2 + alpha/2 away from the base point t0.

    mu(t) = <y(t), z(t0)> and nu(t) = <y(t0), z(t)> are nonnegative and vanish
    only at t0. With xi = mu'/mu, theta = nu'/nu and psi = (xi + theta)/4 the
    quantity equals -3/16 (xi - theta)^2, so it is never positive.

    Notes
    -----
    mu and nu vanish to second order at t0, where xi and theta have poles.
    Writing mu = (1 - cos u) m, nu = (1 - cos u) n with u = t - t0 and
    a = m'/m, b = n'/n, the pole terms cancel in closed form
    (cot^2 - csc^2 = -1) and

        psi' + psi^2 + alpha/2
            = -1/4 + (a' + b')/4 + cot(u/2) (a + b)/4 + (a + b)^2/16 + alpha/2,

    which avoids subtracting quantities of size 1/u^2.
    """
    n = lift.n
    t0_index = int(t0_index) % n
    mu = lift.y @ dual.z[t0_index]
    nu = dual.z @ lift.y[t0_index]
    floor = -tol.pairing * max(np.abs(mu).max(), np.abs(nu).max(), 1.0)
    if mu.min() < floor or nu.min() < floor:
        raise NegativePairingError(
            f"pairing with the dual curve is negative (min mu {mu.min():.3e}, min nu {nu.min():.3e})"
        )
    terms = []
    for f in (mu, nu):
        q, band = _divide_double_zero(np.roll(f, -t0_index))
        d1 = fourier_derivative(q, 1, band) / q
        d2 = fourier_derivative(q, 2, band) / q
        terms.append((d1, d2 - d1 ** 2))
    (a, da), (b, db) = terms
    half = 0.5 * grid(n)[1:]
    cot = np.cos(half) / np.sin(half)
    alpha = np.roll(lift.alpha, -t0_index)
    values = (-0.25 + 0.25 * (da[1:] + db[1:]) + 0.25 * cot * (a[1:] + b[1:])
              + (a[1:] + b[1:]) ** 2 / 16.0 + 0.5 * alpha[1:])
    interior = (np.arange(1, n) + t0_index) % n
    return InequalityReport(t0_index=t0_index, max_value=float(values.max()), values=values,
                            interior=interior, mu=mu, nu=nu)
