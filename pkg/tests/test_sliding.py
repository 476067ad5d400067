import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcs_sim.sliding import rolling_any, rolling_min_argmin


def brute_min(x, half):
    n = x.size
    vals = np.empty(n)
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        vals[i] = x[lo:hi].min()
    return vals


class TestRollingMinArgmin:
    @given(
        data=st.lists(
            st.floats(-1e6, 1e6, allow_nan=False) | st.just(float("inf")),
            min_size=1,
            max_size=200,
        ),
        half=st.integers(0, 40),
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_brute_force(self, data, half):
        x = np.asarray(data, dtype=float)
        vals, idx = rolling_min_argmin(x, half)
        expect = brute_min(x, half)
        assert np.array_equal(vals, expect, equal_nan=True)
        finite = np.isfinite(vals)
        # the reported index must achieve the reported value inside the window
        for i in np.nonzero(finite)[0]:
            assert abs(idx[i] - i) <= half
            assert x[idx[i]] == vals[i]

    def test_two_dimensional(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(5, 97))
        vals, idx = rolling_min_argmin(x, 7)
        for r in range(5):
            v1, i1 = rolling_min_argmin(x[r], 7)
            assert np.array_equal(vals[r], v1)
            assert np.array_equal(x[r][idx[r]], x[r][i1])

    def test_zero_width(self):
        x = np.array([3.0, 1.0, 2.0])
        vals, idx = rolling_min_argmin(x, 0)
        assert np.array_equal(vals, x)
        assert np.array_equal(idx, [0, 1, 2])

    def test_window_larger_than_array(self):
        x = np.array([5.0, 4.0, 7.0])
        vals, idx = rolling_min_argmin(x, 10)
        assert np.array_equal(vals, [4.0, 4.0, 4.0])
        assert np.array_equal(idx, [1, 1, 1])

    def test_all_inf_windows(self):
        x = np.full(5, np.inf)
        vals, idx = rolling_min_argmin(x, 1)
        assert np.all(np.isinf(vals))
        assert np.all((idx >= 0) & (idx < 5))

    def test_negative_half_rejected(self):
        with pytest.raises(ValueError):
            rolling_min_argmin(np.array([1.0]), -1)


class TestRollingAny:
    @given(
        data=st.lists(st.booleans(), min_size=1, max_size=120),
        half=st.integers(0, 20),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_brute_force(self, data, half):
        m = np.asarray(data, dtype=bool)
        got = rolling_any(m, half)
        n = m.size
        for i in range(n):
            lo, hi = max(0, i - half), min(n, i + half + 1)
            assert got[i] == m[lo:hi].any()
