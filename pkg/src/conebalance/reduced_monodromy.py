"""
Hill-type reduced equation x'' + (alpha/2) x = 0: fundamental path, monodromy,
classification and the normalized solution used for balancing.

Conventions
-----------
``X(t)`` is 2x2 with columns ``(x, x')`` where ``x = (u1, u2)`` collects the
two basis solutions with u1(0) = 1, u1'(0) = 0, u2(0) = 0, u2'(0) = 1. Then
X(0) = I, det X = 1 and X(t + 2 pi) = T X(t), so ``T = X(2 pi)`` is the
monodromy acting on vector solutions.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import OrthantViolationError, StepFailureError, TheoremViolationError
from .spectral import TWO_PI, TrigInterpolant, grid

# trace estimates from the integrator agree to ~1e-13 across tolerances and
# grids; a non-flat cone whose trace exceeds -2 by more than this is elliptic
TRACE_RESOLUTION = 1e-12

HYPERBOLIC = "Hyperbolic"
PARABOLIC = "Parabolic"
ELLIPTIC = "Elliptic"
ELLIPSOIDAL = "Ellipsoidal"


@dataclass(frozen=True)
class ReducedSystem:
    alpha: np.ndarray
    t: np.ndarray
    X: np.ndarray
    T: np.ndarray
    wronskian_defect: float


@dataclass(frozen=True)
class MonodromyClass:
    tag: str
    trace: float
    alpha_star: float
    conjugator: np.ndarray
    lam: float | None = None
    phi: float | None = None
    warnings: list = field(default_factory=list)

    def report(self) -> dict:
        out = {"trace": self.trace, "tag": self.tag}
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.phi is not None:
            out["phi"] = self.phi
        out["alpha_star"] = self.alpha_star
        out["warnings"] = list(self.warnings)
        return out


@dataclass(frozen=True)
class CanonicalReducedSolution:
    t: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    phase: np.ndarray
    conjugator: np.ndarray
    x_end: np.ndarray
    period_sweep: float
    alpha: np.ndarray | None = None


def _rhs_factory(alpha):
    coef = TrigInterpolant(alpha)
    half = 0.5

    def rhs(t, state):
        a = coef(t)
        u1, du1, u2, du2 = state
        return [du1, -half * a * u1, du2, -half * a * u2]

    return rhs


def _integrate(alpha, t_end, tol, dense=False, t_eval=None):
    sol = solve_ivp(_rhs_factory(np.asarray(alpha, dtype=float)), (0.0, t_end),
                    [1.0, 0.0, 0.0, 1.0], method="DOP853", rtol=tol.ode_rtol,
                    atol=tol.ode_atol, dense_output=dense, t_eval=t_eval)
    if not sol.success:
        raise StepFailureError(sol.message)
    return sol


def _as_matrices(states):
    # state rows (u1, u1', u2, u2') -> X = [[u1, u1'], [u2, u2']]
    return np.asarray(states).T.reshape(-1, 2, 2)


def integrate_reduced(alpha, tol: Tolerances = DEFAULT_TOLERANCES, oversample: int = 1) -> ReducedSystem:
    """
    Integrate the fundamental matrix over one period.

    The path is reported at ``oversample * N`` uniform nodes on [0, 2 pi) and
    T = X(2 pi) is taken from the final step.
    """
    alpha = np.asarray(alpha, dtype=float)
    m = oversample * alpha.shape[0]
    t = grid(m)
    sol = _integrate(alpha, TWO_PI, tol, t_eval=np.append(t, TWO_PI))
    X_all = _as_matrices(sol.y)
    X, T = X_all[:-1], X_all[-1]
    wronskian = float(np.abs(np.linalg.det(X_all) - 1.0).max())
    return ReducedSystem(alpha=alpha, t=t, X=X, T=T, wronskian_defect=wronskian)


def _unimodular(M):
    d = np.linalg.det(M)
    return M / np.sqrt(d)


def classify_monodromy(system: ReducedSystem, beta, tol: Tolerances = DEFAULT_TOLERANCES) -> MonodromyClass:
    """
    Sort the monodromy into one of the four admissible cases by its trace.

    Spectra with trace < -2, or trace = -2 without a flat cubic form, cannot
    arise from a convex cone and raise :class:`TheoremViolationError`.
    """
    T = system.T
    tau = float(np.trace(T))
    eps_c = tol.classification
    beta_flat = float(np.abs(beta).max()) <= tol.beta_flat
    warnings = []
    if min(abs(tau - 2.0), abs(tau + 2.0)) < 10.0 * eps_c:
        warnings.append(f"NearBoundary: trace {tau:.12g} within {10 * eps_c:g} of +/-2")

    if tau > 2.0 + eps_c:
        lam = 0.5 * (tau + np.sqrt(tau * tau - 4.0))
        evals, evecs = np.linalg.eig(T)
        order = np.argsort(evals.real)
        V = evecs[:, order].real
        if np.linalg.det(V) < 0:
            V[:, 0] = -V[:, 0]
        A = _unimodular(np.linalg.inv(V))
        return MonodromyClass(HYPERBOLIC, tau, -np.log(lam) ** 2 / (2 * np.pi ** 2), A,
                              lam=float(lam), warnings=warnings)

    if abs(tau - 2.0) <= eps_c:
        N = T - np.eye(2)
        j = int(np.argmax(np.linalg.norm(N, axis=0)))
        w = np.eye(2)[:, j]
        Ainv = np.column_stack([w, N @ w / TWO_PI])
        d = np.linalg.det(Ainv)
        if not d > 0:
            raise TheoremViolationError(
                "parabolic monodromy with negative shear: solutions would turn clockwise"
            )
        return MonodromyClass(PARABOLIC, tau, 0.0, _unimodular(np.linalg.inv(Ainv)),
                              warnings=warnings)

    if abs(tau + 2.0) <= eps_c and beta_flat:
        return MonodromyClass(ELLIPSOIDAL, tau, 0.5, np.eye(2), phi=float(np.pi),
                              warnings=warnings)

    # inside the band around -2 a cubic form that is not flat rules out
    # T = -I; the trace can still be resolved as elliptic with phi near pi
    near_pi = abs(tau + 2.0) <= eps_c and tau + 2.0 > TRACE_RESOLUTION
    if abs(tau) < 2.0 - eps_c or near_pi:
        # stable for phi near 0 and near pi, unlike arccos(tau / 2)
        phi = float(2.0 * np.arctan2(np.sqrt(2.0 - tau), np.sqrt(2.0 + tau)))
        evals, evecs = np.linalg.eig(T)
        i = int(np.argmax(evals.imag))
        v = evecs[:, i]
        Ainv = np.column_stack([v.imag, v.real])
        d = np.linalg.det(Ainv)
        if not d > 0:
            raise TheoremViolationError(
                "elliptic monodromy rotates clockwise; solutions would sweep more than pi"
            )
        if near_pi:
            warnings.append(f"NearPi: trace within {eps_c:g} of -2 with non-flat beta; "
                            f"classified elliptic with pi - phi = {np.pi - phi:.3e}")
        return MonodromyClass(ELLIPTIC, tau, phi ** 2 / (2 * np.pi ** 2),
                              _unimodular(np.linalg.inv(Ainv)), phi=phi, warnings=warnings)

    if abs(tau + 2.0) <= eps_c:
        raise TheoremViolationError(
            f"monodromy trace {tau:.12g} equals -2 but the cubic form is not flat "
            f"(max |beta| = {np.abs(beta).max():.3e})"
        )
    raise TheoremViolationError(f"monodromy trace {tau:.12g} < -2 cannot occur for a convex cone")


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def canonical_reduced_solution(cls: MonodromyClass, system: ReducedSystem,
                               tol: Tolerances = DEFAULT_TOLERANCES) -> CanonicalReducedSolution:
    """
    Normalized vector solution x with det(x, x') = 1 in the case's normal region.

    Hyperbolic: open positive quadrant. Parabolic: open right half-plane.
    Elliptic: rotated so that x(0) lies on the positive horizontal axis.
    """
    if cls.tag == ELLIPSOIDAL:
        raise ValueError("ellipsoidal cones are normalized by balancer.ellipsoidal_normalization")
    A = np.array(cls.conjugator, dtype=float)
    x0 = A @ system.X[0][:, 0]
    if cls.tag == ELLIPTIC:
        A = _rotation(-np.arctan2(x0[1], x0[0])) @ A
    elif cls.tag == HYPERBOLIC and x0[0] < 0 and x0[1] < 0:
        A = -A
    elif cls.tag == PARABOLIC and x0[0] < 0:
        A = -A

    x = np.einsum("ij,kj->ki", A, system.X[:, :, 0])
    dx = np.einsum("ij,kj->ki", A, system.X[:, :, 1])
    x_end = A @ system.T[:, 0]

    if cls.tag == HYPERBOLIC:
        worst = min(x[:, 0].min(), x[:, 1].min())
    elif cls.tag == PARABOLIC:
        worst = x[:, 0].min()
    else:
        worst = np.inf
    if worst <= -tol.region or worst == 0.0:
        raise OrthantViolationError(f"normalized solution leaves its region (min coordinate {worst:.3e})")

    angles = np.arctan2(np.append(x[:, 1], x_end[1]), np.append(x[:, 0], x_end[0]))
    steps = np.diff(angles)
    steps = (steps + np.pi) % TWO_PI - np.pi
    if np.any(steps <= 0) or np.any(steps >= 0.5 * np.pi):
        raise OrthantViolationError("solution does not turn counter-clockwise in small steps; refine the grid")
    phase_all = angles[0] + np.concatenate([[0.0], np.cumsum(steps)])
    return CanonicalReducedSolution(t=system.t, x=x, dx=dx, phase=phase_all[:-1], conjugator=A,
                                    x_end=x_end, period_sweep=float(phase_all[-1] - phase_all[0]),
                                    alpha=system.alpha)


def zero_spacing_scan(system: ReducedSystem, trials: int = 100, seed: int = 0,
                      periods: int = 3, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Smallest distance between consecutive zeros of random scalar solutions.

    Scalar solutions u = a u1 + b u2 with (a, b) uniform on the unit circle are
    followed over ``periods`` periods; zeros are bracketed on a fine grid and
    bisected on the dense output. Returns ``inf`` if no solution has two zeros.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t_end = periods * TWO_PI
    sol = _integrate(system.alpha, t_end, tol, dense=True)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, TWO_PI, size=trials)
    coeffs = np.stack([np.cos(theta), np.sin(theta)])  # (2, trials)

    def values(t):
        st = sol.sol(t)  # rows u1, u1', u2, u2'
        return st[0][..., None] * coeffs[0] + st[2][..., None] * coeffs[1]

    ts = np.linspace(0.0, t_end, 8 * periods * system.alpha.shape[0] + 1)
    vals = values(ts)  # (len(ts), trials)
    best = np.inf
    for j in range(trials):
        v = vals[:, j]
        idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
        if idx.size < 2:
            continue
        lo, hi = ts[idx].copy(), ts[idx + 1].copy()
        flo = v[idx]
        while np.max(hi - lo) > 1e-12:
            mid = 0.5 * (lo + hi)
            fm = sol.sol(mid)[0] * coeffs[0, j] + sol.sol(mid)[2] * coeffs[1, j]
            same = np.sign(fm) == np.sign(flo)
            lo = np.where(same, mid, lo)
            flo = np.where(same, fm, flo)
            hi = np.where(same, hi, mid)
        zeros = 0.5 * (lo + hi)
        best = min(best, float(np.diff(zeros).min()))
    return best
