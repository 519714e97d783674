"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from ..exceptions import ValidationError


def check_real(value, name, *, low=None, high=None, low_open=True, high_open=True):
    """Return ``value`` as a float after checking it lies in the given interval."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}")
    bad_low = low is not None and (value < low or (low_open and value == low))
    bad_high = high is not None and (value > high or (high_open and value == high))
    if bad_low or bad_high:
        if low is not None and high is not None:
            interval = f"{'(' if low_open else '['}{low:g}, {high:g}{')' if high_open else ']'}"
            raise ValidationError(f"{name} must lie in {interval}, got {value:g}")
        if bad_low:
            raise ValidationError(f"{name} must be {'>' if low_open else '>='} {low:g}, got {value:g}")
        raise ValidationError(f"{name} must be {'<' if high_open else '<='} {high:g}, got {value:g}")
    return value


def check_exponent(p):
    """Check ``0 < p < 2``."""
    return check_real(p, "p", low=0.0, high=2.0)


def check_oversampling(d):
    """Check the barrier oversampling parameter ``d > 1``."""
    return check_real(d, "d", low=1.0)


def check_matrix(X, name="X", *, min_rows=1, min_cols=1):
    """Validate a finite 2-D float array."""
    try:
        X = check_array(
            X,
            dtype=np.float64,
            ensure_2d=True,
            ensure_min_samples=min_rows,
            ensure_min_features=min_cols,
            ensure_all_finite=True,
        )
    except ValueError as exc:
        raise ValidationError(f"{name}: {exc}") from exc
    return X


def check_points(X, p):
    """Validate a point set: ``k`` rows of ``m`` coordinates, and its exponent."""
    return check_matrix(X, "points"), check_exponent(p)
