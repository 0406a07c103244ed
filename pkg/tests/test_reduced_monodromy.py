import numpy as np
import pytest

from conebalance.config import DEFAULT_TOLERANCES
from conebalance.errors import TheoremViolationError
from conebalance.reduced_monodromy import (
    ELLIPSOIDAL,
    ELLIPTIC,
    HYPERBOLIC,
    PARABOLIC,
    ReducedSystem,
    canonical_reduced_solution,
    classify_monodromy,
    integrate_reduced,
    zero_spacing_scan,
)
from conebalance.spectral import grid

N = 128


def const(a):
    return np.full(N, float(a))


def fake_system(T):
    return ReducedSystem(alpha=const(0.0), t=grid(N), X=np.tile(np.eye(2), (N, 1, 1)),
                         T=np.asarray(T, dtype=float), wronskian_defect=0.0)


def test_ellipsoidal_monodromy_is_minus_identity():
    sys = integrate_reduced(const(0.5))
    assert np.abs(sys.T + np.eye(2)).max() < 1e-9


def test_parabolic_monodromy_is_a_shear():
    sys = integrate_reduced(const(0.0))
    assert np.abs(sys.T - [[1.0, 0.0], [2 * np.pi, 1.0]]).max() < 1e-9


def test_hyperbolic_eigenvalues():
    sys = integrate_reduced(const(-0.5))
    ev = np.sort(np.linalg.eigvals(sys.T).real)
    assert np.allclose(ev, [np.exp(-np.pi), np.exp(np.pi)], rtol=1e-9)


def test_wronskian_conserved(ellipse_analysis):
    assert ellipse_analysis.system.wronskian_defect < 1e-9


def test_tolerance_halving(ellipse_analysis):
    tight = DEFAULT_TOLERANCES.with_overrides(ode_rtol=0.5e-11, ode_atol=0.5e-13)
    T2 = integrate_reduced(ellipse_analysis.lift.alpha, tight).T
    assert np.abs(T2 - ellipse_analysis.system.T).max() < 1e-9


def test_trace_is_base_point_independent(ellipse_analysis):
    alpha = ellipse_analysis.lift.alpha
    tau = np.trace(integrate_reduced(np.roll(alpha, 97)).T)
    assert abs(tau - ellipse_analysis.monodromy.trace) < 1e-9


def test_classify_ellipsoidal():
    cls = classify_monodromy(integrate_reduced(const(0.5)), np.zeros(N))
    assert cls.tag == ELLIPSOIDAL and cls.alpha_star == 0.5


def test_classify_quarter_turn():
    c, s = np.cos(np.pi / 2), np.sin(np.pi / 2)
    cls = classify_monodromy(fake_system([[c, -s], [s, c]]), np.ones(N))
    assert cls.tag == ELLIPTIC
    assert abs(cls.phi - np.pi / 2) < 1e-14
    assert abs(cls.alpha_star - 0.125) < 1e-14


def test_classify_hyperbolic():
    cls = classify_monodromy(fake_system(np.diag([np.exp(-np.pi), np.exp(np.pi)])), np.ones(N))
    assert cls.tag == HYPERBOLIC
    assert abs(cls.lam - np.exp(np.pi)) < 1e-9
    assert abs(cls.alpha_star + 0.5) < 1e-14


def test_classify_parabolic():
    cls = classify_monodromy(integrate_reduced(const(0.0)), np.ones(N))
    assert cls.tag == PARABOLIC and cls.alpha_star == 0.0


@pytest.mark.parametrize("T", [
    -np.eye(2),                                # T = -I with a cubic form that does not vanish
    [[-2.0, 0.0], [0.0, -0.5]],                # trace < -2
])
def test_forbidden_spectra(T):
    with pytest.raises(TheoremViolationError):
        classify_monodromy(fake_system(T), np.ones(N))


def test_near_boundary_warning():
    cls = classify_monodromy(integrate_reduced(const(0.5)), np.zeros(N))
    assert any(w.startswith("NearBoundary") for w in cls.warnings)


def test_elliptic_solution_constant_coefficients():
    sys = integrate_reduced(const(0.125))
    cls = classify_monodromy(sys, np.ones(N))
    x = canonical_reduced_solution(cls, sys)
    t = grid(N)
    assert np.abs(x.x - np.stack([2 * np.cos(t / 4), 2 * np.sin(t / 4)], axis=1)).max() < 1e-8
    assert abs(x.period_sweep - np.pi / 2) < 1e-9
    det = x.x[:, 0] * x.dx[:, 1] - x.x[:, 1] * x.dx[:, 0]
    assert np.abs(det - 1).max() < 1e-9


def test_hyperbolic_solution_in_positive_quadrant():
    sys = integrate_reduced(const(-0.5))
    x = canonical_reduced_solution(classify_monodromy(sys, np.ones(N)), sys)
    t = grid(N)
    assert x.x.min() > 0
    # each coordinate is a multiple of e^(-t/2) resp. e^(t/2)
    r0, r1 = x.x[:, 0] * np.exp(t / 2), x.x[:, 1] * np.exp(-t / 2)
    assert np.ptp(r0) < 1e-8 * r0.max() and np.ptp(r1) < 1e-8 * r1.max()
    assert abs(r0[0] * r1[0] - 1.0) < 1e-8  # det(x, x') = 1


def test_parabolic_solution_in_right_half_plane():
    sys = integrate_reduced(const(0.0))
    x = canonical_reduced_solution(classify_monodromy(sys, np.ones(N)), sys)
    assert x.x[:, 0].min() > 0
    assert np.ptp(x.x[:, 0]) < 1e-9
    slope = np.diff(x.x[:, 1] / x.x[:, 0]) / np.diff(grid(N))
    assert np.allclose(slope, 1.0 / x.x[0, 0] ** 2, rtol=1e-8)


def test_elliptic_sweep_equals_phi(ellipse_analysis):
    cls = ellipse_analysis.monodromy
    x = canonical_reduced_solution(cls, ellipse_analysis.system)
    assert abs(x.period_sweep - cls.phi) < 1e-8


def test_zero_spacing_closed_forms():
    assert abs(zero_spacing_scan(integrate_reduced(const(0.5)), trials=20) - 2 * np.pi) < 1e-8
    assert zero_spacing_scan(integrate_reduced(const(0.0)), trials=20) == np.inf


def test_zero_spacing_on_ellipse(ellipse_analysis):
    assert zero_spacing_scan(ellipse_analysis.system, trials=30) > 2 * np.pi
