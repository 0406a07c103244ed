"""
Balanced reparametrization: the 2*pi-periodic parameter s in which alpha is
constant, its inverse, and the lift and cubic form expressed in s.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    GaugeViolationError,
    IllConditionedError,
    InversionFailureError,
    NonMonotoneError,
    NotAQuadricError,
    VerificationFailureError,
    WrongSignatureError,
)
from .reduced_monodromy import (
    ELLIPSOIDAL,
    ELLIPTIC,
    HYPERBOLIC,
    PARABOLIC,
    CanonicalReducedSolution,
    MonodromyClass,
)
from .spectral import (
    TWO_PI,
    TrigInterpolant,
    change_grid,
    fourier_antiderivative,
    fourier_derivative,
    grid,
    resolved_bandwidth,
)
from .wilczynski import CanonicalLift, extract_coefficients

# dense collocation of the kernel problem is O(n^3); coarser grids suffice for
# band-limited alpha and the kernel is carried back by zero-padding
KERNEL_GRID_MAX = 1024


@dataclass(frozen=True)
class Reparametrization:
    """
    s(t) = t + p(t) with p 2*pi-periodic.

    ``s_of_t``, ``p`` and ``ds_dt`` live on the uniform t-grid, ``t_of_s`` on
    the uniform s-grid.
    """

    s_of_t: np.ndarray
    p: np.ndarray
    ds_dt: np.ndarray
    t_of_s: np.ndarray
    periodicity_defect: float = 0.0

    @property
    def n(self):
        return self.p.shape[0]

    def s(self, t):
        t = np.asarray(t, dtype=float)
        return t + TrigInterpolant(self.p)(t)

    @classmethod
    def from_periodic_part(cls, p, ds_dt=None, periodicity_defect=0.0):
        p = np.asarray(p, dtype=float)
        t = grid(p.shape[0])
        if ds_dt is None:
            ds_dt = 1.0 + fourier_derivative(p, 1, resolved_bandwidth(p))
        ds_dt = np.asarray(ds_dt, dtype=float)
        if np.any(ds_dt <= 0):
            raise NonMonotoneError(f"ds/dt reaches {ds_dt.min():.3e}")
        partial = cls(s_of_t=t + p, p=p, ds_dt=ds_dt, t_of_s=t,
                      periodicity_defect=periodicity_defect)
        t_of_s = invert_reparametrization(partial, grid(p.shape[0]))
        return cls(s_of_t=t + p, p=p, ds_dt=ds_dt, t_of_s=t_of_s,
                   periodicity_defect=periodicity_defect)

    @classmethod
    def from_density(cls, ds_dt, periodicity_defect=0.0):
        """s(t) as the primitive of a positive density with mean exactly 1."""
        ds_dt = np.asarray(ds_dt, dtype=float)
        if np.any(ds_dt <= 0):
            raise NonMonotoneError(f"ds/dt reaches {ds_dt.min():.3e}")
        p = fourier_antiderivative(ds_dt - 1.0)
        return cls.from_periodic_part(p, ds_dt=ds_dt, periodicity_defect=periodicity_defect)

    @classmethod
    def identity(cls, n):
        return cls.from_periodic_part(np.zeros(n))


@dataclass(frozen=True)
class BalancedResult:
    alpha_star: float
    beta_balanced: np.ndarray
    y_balanced: np.ndarray
    reparam: Reparametrization
    case_tag: str
    alpha_reextracted: np.ndarray
    beta_reextracted: np.ndarray
    alpha_deviation: float
    beta_deviation: float
    warnings: list = field(default_factory=list)
    non_unique: bool = False


def invert_reparametrization(reparam: Reparametrization, s_values, max_iter: int = 100,
                             residual: float = 1e-12) -> np.ndarray:
    """
    Solve s = t + p(t) for t, elementwise.

    Newton steps on the trigonometric interpolant of p, replaced by bisection
    whenever a step leaves the current bracket.
    """
    s = np.asarray(s_values, dtype=float)
    flat = np.atleast_1d(s).ravel()
    P = TrigInterpolant(reparam.p)
    p_fine = P(grid(4 * reparam.n))
    margin = 0.1 * (p_fine.max() - p_fine.min()) + 1e-9
    lo = flat - p_fine.max() - margin
    hi = flat - p_fine.min() + margin

    def f(t):
        return t + P(t) - flat

    while True:
        flo, fhi = f(lo), f(hi)
        bad = (flo > 0) | (fhi < 0)
        if not bad.any():
            break
        margin *= 2
        if margin > 10 * TWO_PI:
            raise InversionFailureError("could not bracket the inverse; map is not monotone")
        lo = np.where(flo > 0, lo - margin, lo)
        hi = np.where(fhi < 0, hi + margin, hi)

    t = flat - P(flat)
    t = np.clip(t, lo, hi)
    for _ in range(max_iter):
        ft = f(t)
        if np.all(np.abs(ft) <= residual):
            # one step past the tolerance puts t at roundoff level, which
            # matters once the resampled lift is differentiated three times
            polished = t - ft / (1.0 + P(t, derivative=1))
            t = np.where(np.abs(f(polished)) <= np.abs(ft), polished, t)
            return t.reshape(s.shape) if s.ndim else t[0]
        lo = np.where(ft < 0, t, lo)
        hi = np.where(ft > 0, t, hi)
        slope = 1.0 + P(t, derivative=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = t - ft / slope
        outside = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        t = np.where(outside, 0.5 * (lo + hi), step)
    raise InversionFailureError(f"Newton inversion did not converge in {max_iter} iterations")


def symmetric_square_kernel(alpha, dim: int = 1) -> tuple:
    """
    Periodic solutions q of q''' + 2 alpha q' + alpha' q = 0.

    Products of solutions of x'' + (alpha/2) x = 0 solve this equation, so
    dt/ds of every case (x1 x2, x1^2 or |x|^2 up to a constant) lies in its
    periodic kernel. That kernel is one-dimensional except for T = -I, where
    all three products are periodic. Least singular vectors of the spectral
    collocation matrix give kernel elements that are smooth to roundoff,
    unlike integrator output.

    Returns ``(K, ratio)``: K has shape (N, dim) and spans the kernel;
    ``ratio`` is the largest kernel singular value over the next one, a
    diagnostic of how well the kernel is separated.
    """
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.shape[0]
    m = min(n, KERNEL_GRID_MAX)
    a = change_grid(alpha, m)
    t = grid(m)
    ks = np.arange(1, m // 2)
    kt = np.outer(t, ks)
    c, s = np.cos(kt), np.sin(kt)
    basis = np.column_stack([np.ones(m), c, s])
    d1 = np.column_stack([np.zeros(m), -ks * s, ks * c])
    d3 = np.column_stack([np.zeros(m), ks ** 3 * s, -ks ** 3 * c])
    da = fourier_derivative(a, 1, resolved_bandwidth(a))
    op = d3 + 2.0 * a[:, None] * d1 + da[:, None] * basis
    _, sv, vt = np.linalg.svd(op)
    K = basis @ vt[-dim:].T
    return change_grid(K, n), float(sv[-dim] / sv[-dim - 1])


def project_density(alpha, ds_dt, dim: int = 1, warnings=None):
    """
    Replace ds/dt by the reciprocal of its projection onto the kernel.

    The measured density (from integrator output or from an angle) carries
    noise that three spectral derivatives of the balanced lift would
    amplify. Falls back to the measured density, normalized to mean 1, if the
    projection moves it by more than 1e-6 relative.
    """
    ds_dt = np.asarray(ds_dt, dtype=float)
    density = ds_dt / ds_dt.mean()
    K, _ = symmetric_square_kernel(alpha, dim)
    q0 = 1.0 / density
    coef, *_ = np.linalg.lstsq(K, q0, rcond=None)
    q = K @ coef
    if np.all(q > 0):
        polished = 1.0 / q
        polished = polished / polished.mean()
        gap = float(np.abs(polished - density).max() / density.max())
    else:
        gap = np.inf
    if gap <= 1e-6:
        return polished
    if warnings is not None:
        warnings.append(f"SpectralDensity: kernel density differs from the measured one by {gap:.2e}; "
                        "keeping the measured density")
    return density


def build_reparametrization(cls: MonodromyClass, x: CanonicalReducedSolution,
                            tol: Tolerances = DEFAULT_TOLERANCES, warnings=None) -> Reparametrization:
    """
    Case formulas for s(t), normalized so that s(0) = 0.

    When ``x`` carries alpha, the density ds/dt from the case formula is
    smoothed by :func:`project_density`.
    """
    x1, x2 = x.x[:, 0], x.x[:, 1]
    e1, e2 = x.x_end
    if cls.tag == HYPERBOLIC:
        c = np.pi / np.log(cls.lam)
        s = c * np.log(x2 / x1)
        s_end = c * np.log(e2 / e1)
        ds_dt = c / (x1 * x2)
    elif cls.tag == PARABOLIC:
        s = x2 / x1
        s_end = e2 / e1
        ds_dt = 1.0 / x1 ** 2
    elif cls.tag == ELLIPTIC:
        c = TWO_PI / cls.phi
        s = c * x.phase
        s_end = c * (x.phase[0] + x.period_sweep)
        ds_dt = c / (x1 ** 2 + x2 ** 2)
    else:
        raise ValueError("ellipsoidal cones are normalized by ellipsoidal_normalization")
    if np.any(ds_dt <= 0):
        raise NonMonotoneError("balanced parameter is not increasing; classification is inconsistent")
    defect = float(abs(s_end - s[0] - TWO_PI))

    if x.alpha is not None:
        density = project_density(x.alpha, ds_dt, 3, warnings)
    else:
        density = ds_dt / ds_dt.mean()
    reparam = Reparametrization.from_density(density, periodicity_defect=defect)
    drift = float(np.abs(reparam.s_of_t - (s - s[0])).max())
    if drift > 1e-6 and warnings is not None:
        warnings.append(f"CaseFormulaDrift: s(t) from the case formula differs by {drift:.2e}")
    return reparam


def _quadric_monomials(y):
    a, b, c = y[:, 0], y[:, 1], y[:, 2]
    return np.column_stack([a * a, b * b, c * c, a * b, a * c, b * c])


def fit_quadric(y, tol: Tolerances = DEFAULT_TOLERANCES):
    """
    Least-squares quadratic form vanishing on the rays through y.

    Returns the symmetric 3x3 matrix (unit Frobenius norm of the monomial
    vector) and the ratio of smallest to largest singular value.
    """
    rays = y / np.linalg.norm(y, axis=1, keepdims=True)
    _, sv, vt = np.linalg.svd(_quadric_monomials(rays), full_matrices=False)
    q = vt[-1]
    ratio = float(sv[-1] / sv[0])
    M = np.array([[q[0], q[3] / 2, q[4] / 2],
                  [q[3] / 2, q[1], q[5] / 2],
                  [q[4] / 2, q[5] / 2, q[2]]])
    return M, ratio


def ellipsoidal_normalization(lift: CanonicalLift, tol: Tolerances = DEFAULT_TOLERANCES, warnings=None):
    """
    Map an ellipsoidal cone onto the circular cone and read off the angle.

    Returns ``(A, reparam)``: A is unimodular with A y(t) on
    {u0^2 = u1^2 + u2^2, u0 > 0}, and s(t) is the polar angle of A y(t) in
    the (u1, -u2) plane, shifted so that s(0) = 0.
    """
    M, ratio = fit_quadric(lift.y, tol)
    if ratio > tol.quadric:
        raise NotAQuadricError(f"quadric fit residual ratio {ratio:.3e} exceeds {tol.quadric:g}")
    w, V = np.linalg.eigh(M)
    if np.sum(w > 0) == 2 and np.sum(w < 0) == 1:
        pass
    elif np.sum(w < 0) == 2 and np.sum(w > 0) == 1:
        w = -w
    else:
        raise WrongSignatureError(f"quadric eigenvalues {w} are not Lorentzian")
    order = np.argsort(w)  # the single negative eigenvalue first
    A = np.sqrt(np.abs(w[order]))[:, None] * V[:, order].T
    if np.linalg.det(A) < 0:
        A[2] = -A[2]
    u = lift.y @ A.T
    if np.mean(u[:, 0]) < 0:
        A[:2] = -A[:2]
        u = lift.y @ A.T
    A = A / np.cbrt(np.linalg.det(A))
    u = lift.y @ A.T
    if np.any(u[:, 0] <= 0):
        raise WrongSignatureError("cone does not lie on one nappe of the fitted quadric")
    angle = np.unwrap(np.arctan2(-u[:, 2], u[:, 1]))
    steps = np.diff(np.append(angle, angle[0] + TWO_PI))
    if np.any(steps <= 0):
        raise NonMonotoneError("circular-chart angle is not increasing along the curve")
    residual = float(np.abs(u[:, 1] ** 2 + u[:, 2] ** 2 - u[:, 0] ** 2).max() / (u[:, 0] ** 2).max())
    if residual > 1e2 * tol.quadric and warnings is not None:
        warnings.append(f"QuadricResidual: mapped curve leaves the circular cone by {residual:.2e}")
    # u = u0 (1, cos s, -sin s) with det(u'', u', u) = det A = 1 forces
    # u0^3 (ds/dt)^3 = 1, so the density needs no differentiation
    ds_dt = 1.0 / u[:, 0]
    mean = ds_dt.mean()
    if abs(mean - 1.0) > 1e-6 and warnings is not None:
        warnings.append(f"AngleNormalization: mean ds/dt is {mean:.9f}, expected 1")
    return A, Reparametrization.from_density(ds_dt / mean)


def transform_lift(lift: CanonicalLift, reparam: Reparametrization, alpha_star: float,
                   case_tag: str, tol: Tolerances = DEFAULT_TOLERANCES, warnings=()) -> BalancedResult:
    """
    Express lift and cubic form in the balanced parameter.

    y~(s) = (ds/dt) y(t(s)) keeps det(y~'', y~', y~) = 1, and the cubic form
    transforms as beta~(s) = beta(t(s)) (ds/dt)^-3. The result is re-extracted
    from y~ as a check that alpha is constant.
    """
    ts = reparam.t_of_s
    sigma2 = TrigInterpolant(reparam.ds_dt)(ts)
    y_bal = sigma2[:, None] * TrigInterpolant(lift.y)(ts)
    beta_bal = TrigInterpolant(lift.beta)(ts) / sigma2 ** 3
    try:
        check = extract_coefficients(CanonicalLift(y=y_bal), tol)
    except (GaugeViolationError, IllConditionedError) as exc:
        raise VerificationFailureError(f"balanced lift fails re-extraction: {exc}") from exc
    alpha_dev = float(np.abs(check.alpha - alpha_star).max())
    beta_dev = float(np.abs(check.beta - beta_bal).max())
    if alpha_dev > tol.verification:
        raise VerificationFailureError(
            f"re-extracted alpha deviates from {alpha_star:.12g} by {alpha_dev:.3e}"
        )
    return BalancedResult(alpha_star=float(alpha_star), beta_balanced=beta_bal, y_balanced=y_bal,
                          reparam=reparam, case_tag=case_tag, alpha_reextracted=check.alpha,
                          beta_reextracted=check.beta, alpha_deviation=alpha_dev,
                          beta_deviation=beta_dev, warnings=list(warnings),
                          non_unique=case_tag == ELLIPSOIDAL)
