"""Tests for the unit-interval scalar optimizer."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dbm_lab.optimize import (
    OptResult,
    maximize_unit_interval,
    minimize_unit_interval,
)


class TestMaximize:
    def test_interior_quadratic(self):
        res = maximize_unit_interval(lambda t: -(t - 0.37) ** 2)
        assert res.argopt == pytest.approx(0.37, abs=1e-8)
        assert res.value == pytest.approx(0.0, abs=1e-15)

    def test_boundary_maximum(self):
        res = maximize_unit_interval(lambda t: 3.0 * t)
        assert res.argopt == pytest.approx(1.0, abs=1e-8)
        assert res.value == pytest.approx(3.0, abs=1e-9)

    def test_endpoint_jump_sees_supremum_side(self):
        # Downward jump at t=1: the interior approach carries the max.
        res = maximize_unit_interval(lambda t: t if t < 1.0 else -1.0)
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_infinite_value_short_circuits(self):
        res = maximize_unit_interval(lambda t: math.inf if t == 0.0 else 0.0)
        assert res.value == math.inf
        assert res.argopt == 0.0
        assert res.iterations == 0

    def test_returns_result_type(self):
        assert isinstance(maximize_unit_interval(lambda t: 0.0), OptResult)

    @given(st.floats(0.05, 0.95), st.floats(0.1, 10.0))
    def test_concave_family(self, peak, scale):
        res = maximize_unit_interval(lambda t: -scale * (t - peak) ** 2)
        assert res.argopt == pytest.approx(peak, abs=1e-7)


class TestMinimize:
    def test_interior_quadratic(self):
        res = minimize_unit_interval(lambda t: (t - 0.8) ** 2 + 2.0)
        # the 2.0 offset flattens the objective to float precision within
        # ~1e-8 of the minimum, so argopt is only sqrt(eps)-accurate
        assert res.argopt == pytest.approx(0.8, abs=1e-6)
        assert res.value == pytest.approx(2.0, abs=1e-12)

    def test_agrees_with_negated_maximize(self):
        f = lambda t: (t - 0.25) ** 2
        mn = minimize_unit_interval(f)
        mx = maximize_unit_interval(lambda t: -f(t))
        assert mn.value == -mx.value
        assert mn.argopt == mx.argopt
