import math

import numpy as np
import pytest

from rolescout.errors import ValidationError
from rolescout.ranges import (
    OptimalRange,
    RoleRangeSet,
    distance_transform,
    fit_optimal_range,
    transform_dataset,
)


def quantile_oracle(values, p):
    """Sort-and-interpolate oracle: linear interpolation at p * (n - 1)."""
    ordered = sorted(float(v) for v in values)
    pos = p * (len(ordered) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    return ordered[lo] + (ordered[hi] - ordered[lo]) * (pos - lo)


class TestFitOptimalRange:
    def test_five_point_sample(self):
        r = fit_optimal_range([0.0, 1.0, 2.0, 3.0, 4.0], 0.25)
        assert (r.lower, r.upper) == (1.0, 3.0)

    def test_two_point_interpolation(self):
        r = fit_optimal_range([-2.0, 2.0], 0.25)
        assert (r.lower, r.upper) == (-1.0, 1.0)

    def test_degenerate_constant_sample(self):
        r = fit_optimal_range([0.7] * 9, 0.1)
        assert r.lower == r.upper == 0.7

    def test_matches_oracle_for_all_small_sizes(self):
        rng = np.random.default_rng(7)
        for n in range(1, 51):
            values = rng.uniform(-2.0, 2.0, size=n)
            beta = float(rng.uniform(0.01, 0.49))
            fitted = fit_optimal_range(values, beta)
            assert fitted.lower == quantile_oracle(values, beta)
            assert fitted.upper == quantile_oracle(values, 1.0 - beta)

    def test_monotone_in_beta(self):
        rng = np.random.default_rng(8)
        values = rng.uniform(-2.0, 2.0, size=37)
        betas = sorted(rng.uniform(0.01, 0.49, size=6))
        fitted = [fit_optimal_range(values, b) for b in betas]
        for narrow, wide in zip(fitted[1:], fitted):
            # larger beta never widens the range
            assert narrow.lower >= wide.lower - 1e-12
            assert narrow.upper <= wide.upper + 1e-12

    def test_empty_sample_rejected(self):
        with pytest.raises(ValidationError):
            fit_optimal_range([], 0.25)

    def test_beta_bounds_enforced(self):
        for bad in (0.0, 0.5, -0.1, 0.9):
            with pytest.raises(ValidationError):
                fit_optimal_range([1.0, 2.0], bad)

    def test_invalid_range_rejected(self):
        with pytest.raises(ValidationError):
            OptimalRange("f", 1.0, 0.5, 0.25)
        with pytest.raises(ValidationError):
            OptimalRange("f", -3.0, 0.0, 0.25)


class TestDistanceTransform:
    def test_inside_range_is_zero(self):
        assert distance_transform(0.5, OptimalRange("f", -0.3, 1.1, 0.25)) == 0.0

    def test_above_range_distance_to_upper(self):
        assert distance_transform(2.0, OptimalRange("f", -0.5, 1.0, 0.25)) == 1.0

    def test_extreme_case_reaches_four(self):
        assert distance_transform(-2.0, OptimalRange("f", 2.0, 2.0, 0.25)) == 4.0

    def test_law_on_randomized_cases(self):
        rng = np.random.default_rng(9)
        for _ in range(2000):
            value = float(rng.uniform(-2.0, 2.0))
            a, b = sorted(rng.uniform(-2.0, 2.0, size=2))
            r = OptimalRange("f", float(a), float(b), 0.25)
            out = distance_transform(value, r)
            assert 0.0 <= out <= 4.0
            if r.lower <= value <= r.upper:
                assert out == 0.0
            elif value < r.lower:
                assert out == r.lower - value
            else:
                assert out == value - r.upper

    def test_lipschitz_in_value(self):
        rng = np.random.default_rng(10)
        for _ in range(500):
            a, b = sorted(rng.uniform(-2.0, 2.0, size=2))
            r = OptimalRange("f", float(a), float(b), 0.25)
            v1, v2 = rng.uniform(-2.0, 2.0, size=2)
            d1, d2 = distance_transform(float(v1), r), distance_transform(float(v2), r)
            assert abs(d1 - d2) <= abs(v1 - v2) + 1e-12

    def test_non_increasing_as_range_widens(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            a, b = sorted(rng.uniform(-1.5, 1.5, size=2))
            pad = float(rng.uniform(0.0, 0.5))
            v = float(rng.uniform(-2.0, 2.0))
            narrow = OptimalRange("f", float(a), float(b), 0.25)
            wide = OptimalRange("f", float(a) - pad, float(b) + pad, 0.25)
            assert distance_transform(v, wide) <= distance_transform(v, narrow)


class TestTransformDataset:
    def _range_set(self, lower, upper, beta=0.25):
        names = tuple(f"f{i}" for i in range(len(lower)))
        return RoleRangeSet(
            role="R",
            features=names,
            lower=np.asarray(lower, dtype=np.float64),
            upper=np.asarray(upper, dtype=np.float64),
            beta=beta,
            fitted_on=10,
        )

    def test_midpoint_row_maps_to_zero(self):
        rs = self._range_set([-1.0, 0.0, 0.5], [0.0, 1.0, 1.5])
        mid = (rs.lower + rs.upper) / 2.0
        out = transform_dataset(mid[None, :], rs)
        assert np.all(out == 0.0)

    def test_zero_row_is_fixed_point_when_ranges_cover_zero(self):
        rs = self._range_set([-0.5, -1.0, -0.2], [0.5, 0.1, 1.0])
        zero = np.zeros((1, 3))
        once = transform_dataset(zero, rs)
        assert np.all(once == 0.0)
        assert np.array_equal(transform_dataset(once, rs), once)

    def test_matches_scalar_oracle_elementwise(self):
        rng = np.random.default_rng(12)
        lower = np.sort(rng.uniform(-2.0, 0.0, size=8))
        upper = lower + rng.uniform(0.0, 1.5, size=8)
        rs = self._range_set(lower, upper)
        X = rng.uniform(-2.0, 2.0, size=(30, 8))
        out = transform_dataset(X, rs)
        for i in range(30):
            for j in range(8):
                expected = max(lower[j] - X[i, j], X[i, j] - upper[j], 0.0)
                assert out[i, j] == expected

    def test_feature_mismatch_rejected(self):
        rs = self._range_set([0.0], [1.0])
        with pytest.raises(ValidationError):
            transform_dataset(np.zeros((2, 3)), rs)

    def test_roundtrip_serialization(self):
        rs = RoleRangeSet.fit(
            np.random.default_rng(13).uniform(-2, 2, (20, 4)),
            ["a", "b", "c", "d"],
            0.25,
            role="BWM",
        )
        again = RoleRangeSet.from_dict(rs.to_dict())
        assert again.role == rs.role
        assert again.features == rs.features
        assert np.array_equal(again.lower, rs.lower)
        assert np.array_equal(again.upper, rs.upper)

    def test_fit_uses_column_quantiles(self):
        X = np.array([[0.0, -2.0], [1.0, 0.0], [2.0, 2.0], [3.0, 2.0], [4.0, 2.0]])
        rs = RoleRangeSet.fit(X, ["a", "b"], 0.25)
        assert rs.lower[0] == 1.0 and rs.upper[0] == 3.0
        assert rs.range_for("a").lower == 1.0
