import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eprsim import (
    ConfigError,
    PopulationState,
    PumpModel,
    combined_fixed_point,
    echo_detected_recovery_trace,
    effective_pump_time,
    evolve_populations,
    thermal_populations,
)


def test_pump_steady_state_pattern():
    state = PumpModel(pump_efficiency=0.0065).pump_steady_state(4)
    p = state.p
    assert p == pytest.approx([0.25 - 0.0065, 0.25 + 0.0065,
                               0.25 + 0.0065, 0.25 - 0.0065])
    assert sum(p) == pytest.approx(1.0, abs=1e-15)


def test_zero_efficiency_is_uniform():
    state = PumpModel(pump_efficiency=0.0).pump_steady_state(4)
    assert np.allclose(state.p, 0.25)


def test_efficiency_bound_enforced():
    with pytest.raises(ValueError):
        PumpModel(pump_efficiency=0.3)
    with pytest.raises(ValueError):
        PumpModel(pump_efficiency=-0.01)


def test_thermal_population_differences(v2, central_orientation):
    state = thermal_populations(v2, central_orientation, 300.0)
    diffs = [state.difference((k, k + 1)) for k in range(3)]
    # adjacent differences grow with transition frequency at high T
    assert diffs == pytest.approx([3.6946e-4, 3.7226e-4, 3.7506e-4],
                                  rel=2e-3)
    assert sum(state.p) == pytest.approx(1.0, abs=1e-12)


def test_effective_pump_time_value():
    assert effective_pump_time(139.0, 354.0) == pytest.approx(99.8093,
                                                              abs=1e-3)


def test_combined_fixed_point_is_rate_weighted(v2, central_orientation):
    pump = PumpModel(pump_efficiency=0.01)
    thermal = thermal_populations(v2, central_orientation, 300.0)
    mixed = combined_fixed_point(pump, thermal)
    pumped = pump.pump_steady_state(4)
    expected = (np.array(pumped.p) / 139.0 + np.array(thermal.p) / 354.0) \
        * effective_pump_time(139.0, 354.0)
    assert np.allclose(mixed.p, expected, atol=1e-15)


UNIFORM = PopulationState((0.25, 0.25, 0.25, 0.25))


@settings(max_examples=40, deadline=None)
@given(dt1=st.floats(0.0, 500.0), dt2=st.floats(0.0, 500.0),
       eps=st.floats(0.0, 0.2))
def test_evolution_semigroup(dt1, dt2, eps):
    pump = PumpModel(pump_efficiency=eps)
    start = PopulationState((0.4, 0.3, 0.2, 0.1))
    one = evolve_populations(
        evolve_populations(start, pump, dt1, light_on=True, thermal=UNIFORM),
        pump, dt2, light_on=True, thermal=UNIFORM)
    both = evolve_populations(start, pump, dt1 + dt2, light_on=True,
                              thermal=UNIFORM)
    assert np.allclose(one.p, both.p, atol=1e-12)
    assert sum(one.p) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(eps=st.floats(0.0, 0.24), dt=st.floats(0.0, 2000.0))
def test_populations_stay_normalized_and_positive(eps, dt):
    pump = PumpModel(pump_efficiency=eps)
    start = PopulationState((0.25, 0.25, 0.25, 0.25))
    out = evolve_populations(start, pump, dt, light_on=True, thermal=UNIFORM)
    assert sum(out.p) == pytest.approx(1.0, abs=1e-12)
    assert min(out.p) >= -1e-15


def test_monotone_approach_to_fixed_point():
    pump = PumpModel(pump_efficiency=0.02)
    target = np.array(combined_fixed_point(pump, UNIFORM).p)
    state = PopulationState((0.4, 0.1, 0.1, 0.4))
    last = np.inf
    for dt in np.linspace(0.0, 600.0, 25):
        now = np.array(evolve_populations(state, pump, dt, light_on=True,
                                          thermal=UNIFORM).p)
        dist = np.linalg.norm(now - target)
        assert dist <= last + 1e-12
        last = dist


def test_light_off_relaxes_to_thermal(v2, central_orientation):
    pump = PumpModel(pump_efficiency=0.02)
    thermal = thermal_populations(v2, central_orientation, 300.0)
    start = pump.pump_steady_state(4)
    end = evolve_populations(start, pump, 1e6, light_on=False,
                             thermal=thermal)
    assert np.allclose(end.p, thermal.p, atol=1e-12)


def test_recovery_trace_shape(v2, low_field_orientation):
    pump = PumpModel(pump_efficiency=0.0065)
    delays = np.linspace(-200.0, 3000.0, 161)
    spec = echo_detected_recovery_trace(v2, low_field_orientation, pump,
                                        delays, pair=(2, 3),
                                        light_duration=1000.0,
                                        tau_echo=1.2, t2=48.0)
    assert spec.axis_kind == "time"
    assert spec.meta["effective_pump_time_us"] == pytest.approx(99.8093,
                                                                abs=1e-3)
    before = spec.intensity[delays < 0]
    assert np.allclose(before, before[0])  # thermal baseline is flat
    during = spec.intensity[(delays > 0) & (delays < 1000.0)]
    assert during[-1] > during[0]  # signal grows under illumination
    after = spec.intensity[delays > 1000.0]
    assert after[-1] < after[0]  # and decays back once light stops


def test_zero_efficiency_light_saturates_but_never_inverts(
        v2, low_field_orientation):
    # with no alignment excess the pump target is uniform populations, so
    # light can only shrink the probed difference toward zero
    pump = PumpModel(pump_efficiency=0.0)
    delays = np.linspace(-100.0, 2000.0, 64)
    spec = echo_detected_recovery_trace(v2, low_field_orientation, pump,
                                        delays, pair=(2, 3))
    baseline = spec.intensity[0]
    assert baseline > 0
    assert np.all(spec.intensity <= baseline + 1e-18)
    assert spec.intensity.min() > 0
    assert spec.intensity.min() < 0.5 * baseline


def test_recovery_rejects_pulse_before_sweep_start(v2, low_field_orientation):
    pump = PumpModel()
    with pytest.raises(ConfigError, match="before"):
        echo_detected_recovery_trace(v2, low_field_orientation, pump,
                                     np.array([-50.0, 0.0, 50.0]),
                                     sweep_start=-10.0)


def test_population_state_validation():
    with pytest.raises(ValueError):
        PopulationState((0.5, 0.6, -0.1, 0.0))
    with pytest.raises(ValueError):
        PopulationState((0.5, 0.2, 0.2, 0.2))
