import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eprsim import LineShape, Spectrum


def test_lorentzian_fwhm_from_pp_width():
    shape = LineShape("lorentzian_derivative", width_pp=3.0)
    assert shape.fwhm == pytest.approx(np.sqrt(3.0) * 3.0)


def test_gaussian_fwhm_from_pp_width():
    shape = LineShape("gaussian_derivative", width_pp=3.0)
    assert shape.fwhm == pytest.approx(np.sqrt(2.0 * np.log(2.0)) * 3.0)


@pytest.mark.parametrize("kind", ["lorentzian", "gaussian"])
def test_absorption_normalized_to_unit_area(kind):
    shape = LineShape(kind, width_pp=3.0)
    # heavy lorentzian tails need a wide window to capture the full area
    x = np.linspace(-8000.0, 8000.0, 400001)
    area = np.trapezoid(shape.evaluate(x), x)
    assert area == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("kind", ["lorentzian_derivative", "gaussian_derivative"])
def test_derivative_integrates_to_zero(kind):
    shape = LineShape(kind, width_pp=3.0)
    x = np.linspace(-400.0, 400.0, 200001)
    assert np.trapezoid(shape.evaluate(x), x) == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("kind", ["lorentzian", "gaussian",
                                  "lorentzian_derivative",
                                  "gaussian_derivative"])
def test_peak_to_peak_amplitude_matches_curve(kind):
    shape = LineShape(kind, width_pp=2.4)
    x = np.linspace(-60.0, 60.0, 2_000_001)
    y = shape.evaluate(x)
    measured = y.max() - y.min() if "derivative" in kind else y.max()
    assert measured == pytest.approx(shape.peak_to_peak_amplitude(), rel=1e-6)


def test_derivative_extrema_separated_by_pp_width():
    shape = LineShape("gaussian_derivative", width_pp=5.0)
    x = np.linspace(-30.0, 30.0, 600001)
    y = shape.evaluate(x)
    assert x[np.argmin(y)] - x[np.argmax(y)] == pytest.approx(5.0, abs=1e-3)


@settings(max_examples=25, deadline=None)
@given(width=st.floats(0.1, 50.0),
       kind=st.sampled_from(["lorentzian", "gaussian"]))
def test_absorption_even_and_peaked_at_center(width, kind):
    shape = LineShape(kind, width_pp=width)
    x = np.linspace(-5 * width, 5 * width, 4001)
    y = shape.evaluate(x)
    assert np.allclose(y, y[::-1], rtol=1e-12, atol=1e-15)
    assert np.argmax(y) == len(x) // 2


def test_width_must_be_positive():
    with pytest.raises(ValueError):
        LineShape("lorentzian", width_pp=0.0)
    with pytest.raises(ValueError):
        LineShape("triangle", width_pp=1.0)


def test_spectrum_validates_axis():
    with pytest.raises(ValueError):
        Spectrum("voltage", np.arange(4.0), np.zeros(4))
    with pytest.raises(ValueError):
        Spectrum("field", np.arange(4.0), np.zeros(3))
    spec = Spectrum("field", np.arange(4.0), np.zeros(4), {"a": 1})
    assert spec.meta["a"] == 1
