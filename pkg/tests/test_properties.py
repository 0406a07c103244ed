"""Randomized property checks (hypothesis)."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conebalance.analysis import align_up_to_shift, sextactic_points
from conebalance.balancer import Reparametrization, invert_reparametrization
from conebalance.curve_model import PeriodicVectorCurve, orient_and_validate, trig_derivative
from conebalance.spectral import fourier_shift, grid
from conebalance.wilczynski import lift_from_curve

N = 128
coef = st.floats(-1.0, 1.0, allow_nan=False)


def trig_poly(cos_c, sin_c, t):
    out = np.zeros_like(t)
    for j, (a, b) in enumerate(zip(cos_c, sin_c), start=1):
        out += a * np.cos(j * t) + b * np.sin(j * t)
    return out


@given(st.lists(coef, min_size=1, max_size=10), st.lists(coef, min_size=1, max_size=10))
def test_derivative_exact_on_band_limited(cos_c, sin_c):
    t = grid(N)
    f = trig_poly(cos_c, sin_c, t)
    df = trig_poly([j * b for j, b in enumerate(sin_c, 1)], [-j * a for j, a in enumerate(cos_c, 1)], t)
    c = PeriodicVectorCurve(samples=np.stack([f, f, f], axis=1) + 1.0)
    scale = max(1.0, np.abs(df).max())
    assert np.abs(trig_derivative(c, 1)[:, 0] - df).max() <= 1e-12 * scale * 10


@given(st.floats(0.0, 2 * np.pi, exclude_max=True))
@settings(max_examples=40, deadline=None)
def test_alignment_recovers_any_shift(d0):
    t = grid(N)
    beta = np.exp(np.sin(t)) + 0.5 * np.cos(2 * t)
    delta, resid = align_up_to_shift(beta, fourier_shift(beta, -d0))
    err = abs(np.angle(np.exp(1j * (delta - d0))))
    assert err < 1e-8 and resid < 1e-10


@given(st.lists(coef, min_size=2, max_size=6), st.lists(coef, min_size=2, max_size=6))
@settings(deadline=None)
def test_sign_change_count_is_even(cos_c, sin_c):
    beta = trig_poly(cos_c, sin_c, grid(N))
    if np.abs(beta).max() < 1e-3:
        return
    assert sextactic_points(beta, with_lengths=False).count % 2 == 0


@given(st.lists(st.floats(-0.2, 0.2), min_size=1, max_size=4))  # keeps ds/dt > 0
@settings(deadline=None)
def test_inversion_round_trip(amps):
    t = grid(N)
    p = sum(a / (j + 1) * np.sin((j + 1) * t + j) for j, a in enumerate(amps))
    rp = Reparametrization.from_periodic_part(p)
    s = np.linspace(-3.0, 9.0, 41)
    back = rp.s(invert_reparametrization(rp, s))
    assert np.abs(back - s).max() < 1e-12


small = st.floats(-0.03, 0.03)


@given(small, small, small, st.floats(0.2, 5.0), st.booleans())
@settings(max_examples=25, deadline=None)
def test_lift_gauge_and_orientation(a, b, c, scale, flip):
    t = grid(N)
    x = np.cos(t) + a * np.cos(2 * t) + c * np.sin(3 * t)
    y = (-1 if flip else 1) * (np.sin(t) + b * np.sin(2 * t))
    g = np.stack([np.ones_like(t), x, y], axis=1)
    once = orient_and_validate(PeriodicVectorCurve(samples=g))
    twice = orient_and_validate(once)
    assert np.array_equal(once.samples, twice.samples)
    ref = lift_from_curve(once)
    other = lift_from_curve(orient_and_validate(PeriodicVectorCurve(samples=scale * g)))
    assert np.abs(other.y - ref.y).max() < 1e-10
    assert np.abs(other.alpha - ref.alpha).max() < 1e-9
