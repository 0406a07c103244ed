"""
Trigonometric interpolation on the uniform periodic grid t_k = 2*pi*k/N.

All periodic quantities in the package (curve lifts, coefficient arrays,
periodic parts of reparametrizations) are stored as nodal samples and
differentiated / evaluated through the routines below.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def grid(n):
    """Uniform nodes on [0, 2*pi)."""
    return TWO_PI * np.arange(n) / n


def _wavenumbers(n):
    return np.fft.rfftfreq(n, d=1.0 / n)


def fourier_derivative(values, order=1, bandwidth=None):
    """
    Derivative of the trigonometric interpolant at the nodes.

    Works along axis 0, so ``values`` may be ``(N,)`` or ``(N, d)``.
    The Nyquist mode is dropped for odd orders, where its derivative is not
    representable on the grid. Modes above ``bandwidth`` (see
    :func:`resolved_bandwidth`) are discarded so that sample roundoff is not
    amplified by the high wavenumbers.
    """
    values = np.asarray(values, dtype=float)
    if order == 0:
        return values.copy()
    n = values.shape[0]
    coeffs = np.fft.rfft(values, axis=0)
    k = _wavenumbers(n)
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[-1] = 0.0
    if bandwidth is not None:
        mult[bandwidth + 1:] = 0.0
    shape = (-1,) + (1,) * (values.ndim - 1)
    return np.fft.irfft(coeffs * mult.reshape(shape), n=n, axis=0)


def fourier_shift(values, delta):
    """Samples of f(t + delta) for the interpolant f of ``values``."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    coeffs = np.fft.rfft(values, axis=0)
    k = _wavenumbers(n)
    phase = np.exp(1j * k * delta)
    if n % 2 == 0:
        # keep the Nyquist term real (cos(N t / 2) shifted and projected)
        phase[-1] = np.cos(k[-1] * delta)
    shape = (-1,) + (1,) * (values.ndim - 1)
    return np.fft.irfft(coeffs * phase.reshape(shape), n=n, axis=0)


def fourier_antiderivative(values):
    """
    Periodic primitive F of a zero-mean f, normalized by F(0) = 0.

    Raises ``ValueError`` if the mean of ``values`` is not negligible, since
    the primitive would then not be periodic.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    coeffs = np.fft.rfft(values, axis=0)
    scale = max(np.abs(values).max(), 1.0)
    if np.abs(coeffs[0]).max() > 1e-10 * n * scale:
        raise ValueError("function has nonzero mean; its primitive is not periodic")
    k = _wavenumbers(n)
    mult = np.zeros(k.size, dtype=complex)
    mult[1:] = 1.0 / (1j * k[1:])
    if n % 2 == 0:
        mult[-1] = 0.0
    shape = (-1,) + (1,) * (values.ndim - 1)
    prim = np.fft.irfft(coeffs * mult.reshape(shape), n=n, axis=0)
    return prim - prim[0]


def change_grid(values, m):
    """Resample the interpolant of ``values`` onto ``grid(m)`` (truncating or zero-padding modes)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if m == n:
        return values.copy()
    coeffs = np.fft.rfft(values, axis=0)
    out = np.zeros((m // 2 + 1,) + values.shape[1:], dtype=complex)
    keep = min(n, m) // 2
    out[:keep] = coeffs[:keep]
    if n < m and n % 2 == 0:
        out[keep] = 0.5 * coeffs[keep]  # split the Nyquist term symmetrically
    return np.fft.irfft(out, n=m, axis=0) * (m / n)


class TrigInterpolant:
    """
    Evaluate the trigonometric interpolant of uniform samples anywhere.

    Parameters
    ----------
    values : array_like, shape (N,) or (N, d)
        Samples at ``grid(N)``.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        self.n = values.shape[0]
        self.scalar = values.ndim == 1
        self._coeffs = np.fft.rfft(values.reshape(self.n, -1), axis=0) / self.n
        weights = np.full(self._coeffs.shape[0], 2.0)
        weights[0] = 1.0
        if self.n % 2 == 0:
            weights[-1] = 1.0
        self._coeffs = self._coeffs * weights[:, None]
        self._k = _wavenumbers(self.n)

    def __call__(self, t, derivative=0):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        mult = (1j * self._k) ** derivative
        if derivative % 2 == 1 and self.n % 2 == 0:
            mult[-1] = 0.0
        weighted = self._coeffs * mult[:, None]
        out = np.empty((flat.size, weighted.shape[1]))
        step = max(1, 2 ** 21 // self._k.size)  # bound the size of the basis block
        for i in range(0, flat.size, step):
            basis = np.exp(1j * np.outer(flat[i:i + step], self._k))
            out[i:i + step] = np.real(basis @ weighted)
        if self.scalar:
            out = out[:, 0]
            return out.reshape(t.shape) if t.ndim else out[0]
        return out.reshape(t.shape + (out.shape[1],)) if t.ndim else out[0]


def resolved_bandwidth(values, factor=100.0, resolved=1e-10):
    """
    Highest wavenumber whose coefficient clears the roundoff floor.

    Sample rounding puts roughly ``eps * max|f| * sqrt(N)`` into every rfft
    coefficient; modes below ``factor`` times that carry no signal. Returns
    ``None`` when the top of the spectrum still exceeds ``resolved`` relative
    to the peak (under-resolved data: keep every mode).
    """
    values = np.asarray(values, dtype=float)
    flat = values.reshape(values.shape[0], -1)
    coeffs = np.fft.rfft(flat, axis=0)
    mag = np.abs(coeffs).max(axis=1)
    peak = mag.max()
    if peak == 0.0:
        return 0
    if mag[-max(1, mag.size // 16):].max() > resolved * peak:
        return None
    floor = factor * np.finfo(float).eps * np.abs(flat).max() * np.sqrt(values.shape[0])
    above = np.flatnonzero(mag > floor)
    return int(above[-1]) if above.size else 0


def truncate_spectrum(values, floor):
    """
    Drop every mode above the last one whose rfft magnitude exceeds ``floor``.

    ``floor`` is in rfft units (sum over N samples), like the threshold in
    :func:`resolved_bandwidth`.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    coeffs = np.fft.rfft(values, axis=0)
    mag = np.abs(coeffs).reshape(coeffs.shape[0], -1).max(axis=1)
    above = np.flatnonzero(mag > floor)
    cut = int(above[-1]) + 1 if above.size else 1
    coeffs[cut:] = 0.0
    return np.fft.irfft(coeffs, n=n, axis=0)
