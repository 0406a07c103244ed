import numpy as np
import pytest

from conebalance.spectral import (
    TWO_PI,
    TrigInterpolant,
    change_grid,
    fourier_antiderivative,
    fourier_derivative,
    fourier_shift,
    grid,
    resolved_bandwidth,
)


def test_derivative_of_band_limited_signal():
    t = grid(64)
    f = np.sin(3 * t) + 0.5 * np.cos(7 * t)
    assert np.allclose(fourier_derivative(f, 1), 3 * np.cos(3 * t) - 3.5 * np.sin(7 * t), atol=1e-12)
    assert np.allclose(fourier_derivative(f, 2), -9 * np.sin(3 * t) - 24.5 * np.cos(7 * t), atol=1e-11)


def test_shift_and_interpolant_agree():
    t = grid(128)
    f = np.exp(np.cos(t))
    out = fourier_shift(f, 0.3)
    assert np.allclose(out, np.exp(np.cos(t + 0.3)), atol=1e-13)
    assert np.allclose(TrigInterpolant(f)(t + 0.3), out, atol=1e-13)


def test_antiderivative_round_trip():
    t = grid(128)
    f = np.cos(2 * t) + np.sin(5 * t)
    prim = fourier_antiderivative(f)
    assert prim[0] == 0.0
    assert np.allclose(fourier_derivative(prim, 1), f, atol=1e-12)


def test_antiderivative_rejects_nonzero_mean():
    with pytest.raises(ValueError):
        fourier_antiderivative(np.ones(64))


def test_change_grid_preserves_band_limited_signal():
    f = lambda t: np.cos(3 * t) + np.sin(t)
    assert np.allclose(change_grid(f(grid(64)), 256), f(grid(256)), atol=1e-13)
    assert np.allclose(change_grid(f(grid(256)), 64), f(grid(64)), atol=1e-13)


def test_resolved_bandwidth_of_trig_polynomial():
    band = resolved_bandwidth(np.cos(5 * grid(128)))
    assert band is not None and 5 <= band < 64


def test_interpolant_is_periodic():
    f = np.exp(np.sin(grid(64)))
    p = TrigInterpolant(f)
    assert abs(p(0.4) - p(0.4 + TWO_PI)) < 1e-13
