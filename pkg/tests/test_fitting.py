"""Damped Gauss-Newton exponential fitting: recovery accuracy, invariance
properties and failure reporting."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eprsim import (
    FitError,
    bare_pump_time,
    fit_mono_exponential,
    fit_piecewise_recovery,
    initial_guess,
)
from eprsim.fitting import _model_and_jacobian


def _decay(t, amplitude=1.0, tau=48.0, offset=0.0):
    return amplitude * np.exp(-t / tau) + offset


def test_noiseless_recovery_is_exact():
    t = np.linspace(2.0, 240.0, 60)
    fit = fit_mono_exponential(t, _decay(t, 0.8, 48.0, 0.05))
    assert fit.converged
    assert fit.amplitude == pytest.approx(0.8, rel=1e-8)
    assert fit.tau == pytest.approx(48.0, rel=1e-8)
    assert fit.offset == pytest.approx(0.05, abs=1e-9)
    assert fit.residual_norm < 1e-10


def test_noisy_recovery_within_two_percent(rng):
    t = np.linspace(2.0, 240.0, 241)
    y = _decay(t) + rng.normal(0.0, 0.01, len(t))
    fit = fit_mono_exponential(t, y)
    assert fit.converged
    assert fit.tau == pytest.approx(48.0, rel=0.02)
    assert fit.std_errors["tau"] < 0.02 * fit.tau


def test_constant_data_reports_undetermined():
    t = np.linspace(0.0, 10.0, 20)
    fit = fit_mono_exponential(t, np.full(20, 0.3))
    assert not fit.converged
    assert "undetermined" in fit.message
    assert fit.offset == pytest.approx(0.3)


def test_linear_data_does_not_converge():
    # a straight line is the tau -> infinity limit; the solver must
    # report failure instead of pretending a time constant exists
    t = np.linspace(0.0, 10.0, 50)
    fit = fit_mono_exponential(t, 2.0 + 0.5 * t)
    assert not fit.converged
    assert fit.message != ""
    assert fit.tau > t[-1]


def test_too_few_samples_raises():
    with pytest.raises(FitError, match="at least 4"):
        fit_mono_exponential(np.array([0.0, 1.0, 2.0]), np.ones(3))


def test_refit_from_solution_is_idempotent(rng):
    t = np.linspace(0.0, 200.0, 80)
    y = _decay(t, 1.0, 48.0, 0.1) + rng.normal(0.0, 0.005, len(t))
    first = fit_mono_exponential(t, y)
    second = fit_mono_exponential(
        t, y, p0=np.array([first.amplitude, first.tau, first.offset]))
    assert second.iterations <= 2
    assert second.tau == pytest.approx(first.tau, abs=1e-10)
    assert second.amplitude == pytest.approx(first.amplitude, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(1e-3, 1e3))
def test_fit_is_scale_equivariant(scale):
    t = np.linspace(0.0, 150.0, 64)
    base = _decay(t, 1.0, 37.0, 0.2) + 0.01 * np.sin(5.0 * t)
    plain = fit_mono_exponential(t, base)
    scaled = fit_mono_exponential(t, scale * base)
    assert scaled.tau == pytest.approx(plain.tau, rel=1e-9)
    assert scaled.amplitude == pytest.approx(scale * plain.amplitude,
                                             rel=1e-9)
    assert scaled.offset == pytest.approx(scale * plain.offset, rel=1e-9)


def test_fit_is_time_shift_equivariant():
    t = np.linspace(0.0, 150.0, 64)
    y = _decay(t, 1.0, 37.0, 0.2) + 0.01 * np.sin(5.0 * t)
    plain = fit_mono_exponential(t, y)
    shifted = fit_mono_exponential(t + 500.0, y)
    assert shifted.tau == pytest.approx(plain.tau, rel=1e-6)
    assert shifted.offset == pytest.approx(plain.offset, abs=1e-6)
    assert shifted.amplitude * np.exp(-500.0 / shifted.tau) == pytest.approx(
        plain.amplitude, rel=1e-6)


def test_gradient_vanishes_at_solution(rng):
    t = np.linspace(0.0, 200.0, 120)
    y = _decay(t, 1.0, 48.0, 0.1) + rng.normal(0.0, 0.01, len(t))
    fit = fit_mono_exponential(t, y)
    theta = np.array([fit.amplitude, fit.tau, fit.offset])
    model, jac = _model_and_jacobian(theta, t)
    grad = jac.T @ (y - model)
    assert np.linalg.norm(grad) < 1e-6 * fit.residual_norm


def test_analytic_jacobian_matches_finite_differences():
    t = np.linspace(0.5, 90.0, 31)
    theta = np.array([0.7, 23.0, 0.13])
    _, jac = _model_and_jacobian(theta, t)
    for col in range(3):
        h = 1e-6 * max(abs(theta[col]), 1.0)
        up = theta.copy()
        up[col] += h
        down = theta.copy()
        down[col] -= h
        fd = (_model_and_jacobian(up, t)[0]
              - _model_and_jacobian(down, t)[0]) / (2.0 * h)
        assert np.allclose(jac[:, col], fd, rtol=1e-4, atol=1e-10)


def test_initial_guess_is_reasonable():
    t = np.linspace(0.0, 300.0, 100)
    guess = initial_guess(t, _decay(t, 1.0, 48.0, 0.2))
    assert guess[1] > 0
    assert guess[1] == pytest.approx(48.0, rel=0.3)
    assert guess[2] == pytest.approx(0.2, abs=0.05)


def _recovery_trace(t, eff=99.8093, t1=354.0, off=1000.0):
    y = np.where(t < off, 1.0 - np.exp(-t / eff), 0.0)
    level = 1.0 - np.exp(-off / eff)
    return np.where(t >= off, level * np.exp(-(t - off) / t1), y)


def test_piecewise_recovery_noiseless():
    t = np.linspace(0.0, 3000.0, 301)
    pw = fit_piecewise_recovery(t, _recovery_trace(t), 1000.0)
    assert pw.during.converged and pw.after.converged
    assert pw.during.tau == pytest.approx(99.8093, rel=1e-6)
    assert pw.after.tau == pytest.approx(354.0, rel=1e-6)
    assert pw.boundary_gap < 1e-8
    assert bare_pump_time(pw.during.tau, pw.after.tau) == pytest.approx(
        139.0, rel=1e-5)


def test_piecewise_recovery_with_noise(rng):
    t = np.linspace(0.0, 3000.0, 601)
    y = _recovery_trace(t) + rng.normal(0.0, 0.01, len(t))
    pw = fit_piecewise_recovery(t, y, 1000.0)
    assert pw.during.tau == pytest.approx(99.8093, rel=0.02)
    assert pw.after.tau == pytest.approx(354.0, rel=0.02)
    assert bare_pump_time(pw.during.tau, pw.after.tau) == pytest.approx(
        139.0, rel=0.02)


def test_piecewise_flat_segments_do_not_converge():
    t = np.linspace(0.0, 2000.0, 200)
    pw = fit_piecewise_recovery(t, np.full(200, 0.7), 1000.0)
    assert not pw.during.converged
    assert not pw.after.converged


def test_piecewise_segment_errors_name_the_segment():
    t = np.linspace(0.0, 3000.0, 301)
    y = _recovery_trace(t)
    with pytest.raises(FitError, match="during-light"):
        fit_piecewise_recovery(t, y, 1000.0, light_on_time=990.0)
    with pytest.raises(FitError, match="after-light"):
        fit_piecewise_recovery(t[t < 1010.0], y[t < 1010.0], 1000.0)
    with pytest.raises(FitError, match="swapped"):
        fit_piecewise_recovery(t, y, 100.0, light_on_time=500.0)


def test_bare_pump_time_validation():
    assert bare_pump_time(99.8093, 354.0) == pytest.approx(139.0, abs=1e-3)
    with pytest.raises(FitError):
        bare_pump_time(400.0, 354.0)
    with pytest.raises(FitError):
        bare_pump_time(-1.0, 354.0)
