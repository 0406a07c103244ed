"""
Invariants of the cubic form: sextactic points, projective arc length
between them, and alignment of two balanced outputs up to a shift.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import FlatBetaError
from .spectral import TWO_PI, TrigInterpolant, fourier_shift, grid


@dataclass(frozen=True)
class SextacticReport:
    zeros: list
    count: int
    segment_lengths: list = field(default_factory=list)
    touch_points: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def total_length(self) -> float:
        return float(sum(self.segment_lengths))


def _bisect(f, lo, hi, tol):
    """Vectorized bisection; f(lo) and f(hi) must have opposite signs."""
    flo = f(lo)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def sextactic_points(beta, tol: Tolerances = DEFAULT_TOLERANCES, xtol: float = 1e-10,
                     with_lengths: bool = True) -> SextacticReport:
    """
    Transversal zeros of the cubic form on [0, 2 pi).

    Sign changes between neighbouring nodes (cyclically) are refined by
    bisection on the trigonometric interpolant. Two sign changes closer than
    one grid step are a tangential dip through zero: they are merged into a
    single touch point, reported separately with a warning, and left out of
    the count, which therefore stays even.

    Raises
    ------
    FlatBetaError
        If max |beta| <= ``tol.beta_flat`` (the ellipsoidal case, where every
        point is sextactic).
    """
    beta = np.asarray(beta, dtype=float)
    n = beta.shape[0]
    scale = float(np.abs(beta).max())
    if scale <= tol.beta_flat:
        raise FlatBetaError(f"max |beta| = {scale:.3e}: cubic form vanishes identically")
    h = TWO_PI / n
    interp = TrigInterpolant(beta)
    sign = np.sign(beta)
    # an exact nodal zero takes the sign of its successor so it is bracketed once
    for i in np.flatnonzero(sign == 0):
        sign[i] = sign[(i + 1) % n] or 1.0
    idx = np.flatnonzero(sign != np.roll(sign, -1))
    lo = grid(n)[idx]
    zeros = _bisect(interp, lo, lo + h, xtol) % TWO_PI if idx.size else np.array([])
    zeros = np.where(TWO_PI - zeros < xtol, 0.0, zeros)
    zeros = np.sort(zeros)

    warnings, touches = [], []
    if zeros.size >= 2:
        gaps = np.diff(np.append(zeros, zeros[0] + TWO_PI))
        close = gaps < h
        keep = np.ones(zeros.size, dtype=bool)
        for i in np.flatnonzero(close):
            j = (i + 1) % zeros.size
            if keep[i] and keep[j]:
                keep[i] = keep[j] = False
                mid = (zeros[i] + 0.5 * gaps[i]) % TWO_PI
                touches.append(float(mid))
                warnings.append(f"TangentialZero: sign changes at {zeros[i]:.6f} and "
                                f"{zeros[j]:.6f} merged into a touch point")
        zeros = zeros[keep]

    # dips to zero that stay on one side
    mag = np.abs(beta)
    minima = (mag <= np.roll(mag, 1)) & (mag <= np.roll(mag, -1)) & (mag <= 1e-6 * scale)
    for i in np.flatnonzero(minima & (sign == np.roll(sign, -1)) & (sign == np.roll(sign, 1))):
        touches.append(float(grid(n)[i]))
        warnings.append(f"TangentialZero: |beta| touches {mag[i]:.2e} at node {i} without a sign change")

    zeros = [float(z) for z in zeros]
    lengths = projective_segment_lengths(beta, zeros) if with_lengths and len(zeros) >= 2 else []
    return SextacticReport(zeros=zeros, count=len(zeros), segment_lengths=lengths,
                           touch_points=sorted(touches), warnings=warnings)


def projective_segment_lengths(beta, zeros, epsabs: float = 1e-12) -> list:
    """
    Signed projective lengths, the integrals of cbrt(beta) between consecutive zeros.

    The last segment wraps around from the final zero to the first plus
    2 pi; with a single zero the whole period is one segment. The integrand
    behaves like |s - z|^(1/3) at a simple zero; QUADPACK's extrapolating
    rule (QAGS) handles such end-point singularities without a weight.
    """
    zeros = sorted(float(z) for z in zeros)
    if not zeros:
        raise ValueError("need at least one zero to delimit segments")
    interp = TrigInterpolant(np.asarray(beta, dtype=float))
    ends = zeros[1:] + [zeros[0] + TWO_PI]
    out = []
    for a, b in zip(zeros, ends):
        val, _ = quad(lambda s: np.cbrt(interp(s)), a, b, epsabs=epsabs, epsrel=1e-12, limit=400)
        out.append(float(val))
    return out


def align_up_to_shift(beta_a, beta_b, max_newton: int = 20) -> tuple[float, float]:
    """
    Shift delta in [0, 2 pi) minimizing || beta_a(s) - beta_b(s + delta) ||.

    The best node shift comes from the FFT cross-correlation; it is refined by
    Newton's method on the derivative of the (trigonometric) correlation
    C(delta) = sum_k beta_a(s_k) beta_b(s_k + delta). Returns
    ``(delta, rms_residual)``.
    """
    a = np.asarray(beta_a, dtype=float)
    b = np.asarray(beta_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("beta arrays must share a grid")
    n = a.shape[0]
    h = TWO_PI / n
    A = np.fft.fft(a)
    B = np.fft.fft(b)
    corr = np.real(np.fft.ifft(np.conj(A) * B))  # corr[m] = sum_k a[k] b[k + m]
    m = int(np.argmax(corr))
    k = np.fft.fftfreq(n, d=1.0 / n)
    weight = np.conj(A) * B
    if n % 2 == 0:
        weight[n // 2] = 0.0  # the Nyquist term has no well-defined derivative

    def derivs(delta):
        phase = np.exp(1j * k * delta)
        return (np.real(np.sum(1j * k * weight * phase)), np.real(np.sum(-(k ** 2) * weight * phase)))

    delta = m * h
    lo, hi = delta - h, delta + h
    for _ in range(max_newton):
        d1, d2 = derivs(delta)
        step = -d1 / d2 if d2 < 0 else 0.0
        nxt = delta + step
        if not lo <= nxt <= hi:
            break
        delta = nxt
        if abs(step) < 1e-15:
            break
    delta = delta % TWO_PI
    if min(delta, TWO_PI - delta) < 1e-12:  # below what the correlation resolves
        delta = 0.0
    resid = float(np.sqrt(np.mean((a - fourier_shift(b, delta)) ** 2)))
    return float(delta), resid
