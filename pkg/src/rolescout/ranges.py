"""Optimal feature ranges and the distance transform.

For each feature a role has an optimal value range, taken as the [beta,
1 - beta] percentile interval of the fitted sample (by default the role's
positive examples). Standardized values in [-2, 2] are then mapped to
distance space: 0 inside the range, otherwise the distance to the nearest
bound, giving values in [0, 4].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError


def _check_beta(beta: float) -> None:
    if not 0.0 < beta < 0.5:
        raise ValidationError(f"beta must be in (0, 0.5), got {beta}")


def empirical_quantile(sorted_values: np.ndarray, p: float) -> np.ndarray:
    """Linear-interpolation quantile at position p * (n - 1) on a sorted sample.

    Works on a 1-D sample or column-wise on a column-sorted matrix. The
    interpolation is exactly lo + frac * (hi - lo); this formula is part of
    the package's pinned convention.
    """
    n = sorted_values.shape[0]
    pos = p * (n - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    frac = pos - lo
    return sorted_values[lo] + (sorted_values[hi] - sorted_values[lo]) * frac


@dataclass(frozen=True)
class OptimalRange:
    feature: str
    lower: float
    upper: float
    beta: float

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.lower <= self.upper:
            raise ValidationError(
                f"range for {self.feature!r} has lower {self.lower} > upper {self.upper}"
            )
        if self.lower < -2.0 or self.upper > 2.0:
            raise ValidationError(
                f"range for {self.feature!r} outside the standardized [-2, 2] interval"
            )


def fit_optimal_range(values, beta: float, feature: str = "") -> OptimalRange:
    """Empirical [beta, 1 - beta] percentile bounds of one feature sample.

    Quantiles use linear interpolation between closest ranks at position
    p * (n - 1) on the sorted sample.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("cannot fit a range on an empty sample")
    _check_beta(beta)
    sorted_values = np.sort(values)
    lower = float(empirical_quantile(sorted_values, beta))
    upper = float(empirical_quantile(sorted_values, 1.0 - beta))
    return OptimalRange(feature=feature, lower=lower, upper=upper, beta=beta)


def distance_transform(value: float, optimal: OptimalRange) -> float:
    """0 inside the range, else distance to the nearest bound; in [0, 4]."""
    return max(optimal.lower - value, value - optimal.upper, 0.0)


@dataclass(frozen=True)
class RoleRangeSet:
    """Per-feature optimal ranges for one role."""

    role: str
    features: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    beta: float
    fitted_on: int

    @classmethod
    def fit(cls, X, features, beta: float, role: str = "") -> "RoleRangeSet":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValidationError("range fitting needs a non-empty 2-D sample")
        if X.shape[1] != len(features):
            raise ValidationError("feature names do not match sample width")
        _check_beta(beta)
        sorted_cols = np.sort(X, axis=0)
        lower = np.asarray(empirical_quantile(sorted_cols, beta), dtype=np.float64)
        upper = np.asarray(empirical_quantile(sorted_cols, 1.0 - beta), dtype=np.float64)
        return cls(
            role=role,
            features=tuple(features),
            lower=lower,
            upper=upper,
            beta=beta,
            fitted_on=X.shape[0],
        )

    def range_for(self, feature: str) -> OptimalRange:
        i = self.features.index(feature)
        return OptimalRange(feature, float(self.lower[i]), float(self.upper[i]), self.beta)

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "features": list(self.features),
            "lower": [float(v) for v in self.lower],
            "upper": [float(v) for v in self.upper],
            "beta": self.beta,
            "fitted_on": self.fitted_on,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoleRangeSet":
        return cls(
            role=d["role"],
            features=tuple(d["features"]),
            lower=np.asarray(d["lower"], dtype=np.float64),
            upper=np.asarray(d["upper"], dtype=np.float64),
            beta=float(d["beta"]),
            fitted_on=int(d["fitted_on"]),
        )


def transform_dataset(X, ranges: RoleRangeSet) -> np.ndarray:
    """Elementwise distance transform of a matrix against a range set."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(ranges.features):
        raise ValidationError(
            f"row width {X.shape[-1]} does not match range set "
            f"({len(ranges.features)} features)"
        )
    return _kernels.distance_transform_matrix(X, ranges.lower, ranges.upper)
