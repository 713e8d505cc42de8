import numpy as np
import pytest

from eprsim import FieldOrientation, SpinSystem, resonance_fields


@pytest.fixture
def v2():
    return SpinSystem()


@pytest.fixture
def v2_lines(v2):
    """The three allowed lines at 9.308 GHz, field along the defect axis."""
    return resonance_fields(v2, 0.0, 9308.0, 3200.0, 3400.0)


@pytest.fixture
def central_orientation(v2_lines):
    line = next(l for l in v2_lines if l.pair == (1, 2))
    return FieldOrientation(line.field, 0.0)


@pytest.fixture
def low_field_orientation(v2_lines):
    line = next(l for l in v2_lines if l.pair == (2, 3))
    return FieldOrientation(line.field, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
