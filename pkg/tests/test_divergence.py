import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qccsim.classical import ClassicalState
from qccsim.divergence import DivergenceSeries, EmptyEnsemble, record, rms_deviation
from qccsim.grid import PhasePoint


def test_rms_of_known_points():
    c = ClassicalState(0.0, 1.0, 2.0)
    pts = [PhasePoint(1.0, 2.0), PhasePoint(4.0, 6.0)]
    assert rms_deviation(c, pts) == pytest.approx(math.sqrt(25 / 2))
    assert rms_deviation(c, np.array([[1.0, 2.0], [4.0, 6.0]])) == rms_deviation(c, pts)


@given(pts=st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=20))
def test_rms_is_bounded_by_max_distance(pts):
    c = ClassicalState(0.0, 0.0, 0.0)
    d = rms_deviation(c, np.array(pts))
    dists = [math.hypot(x, p) for x, p in pts]
    assert min(dists) - 1e-9 <= d <= max(dists) + 1e-9


def test_empty_ensemble():
    with pytest.raises(EmptyEnsemble):
        rms_deviation(ClassicalState(0.0, 0.0, 0.0), [])


def test_threshold_is_strict():
    s = DivergenceSeries(0.05)
    record(s, 0.1, 0.05)
    assert not s.diverged
    record(s, 0.2, 0.0500001)
    record(s, 0.3, 1.0)
    assert s.divergence_time == 0.2
    assert s.max() == 1.0
    assert s.samples[0] == (0.1, 0.05)


def test_series_rejects_bad_records():
    s = DivergenceSeries(0.05).record(0.1, 0.0)
    with pytest.raises(ValueError):
        s.record(0.1, 0.0)
    with pytest.raises(ValueError):
        s.record(0.2, -1.0)
    assert DivergenceSeries(1.0).max() == 0.0
