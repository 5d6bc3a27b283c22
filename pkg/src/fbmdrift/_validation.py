"""Small argument-checking helpers shared across modules."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array


class HypothesisError(ValueError):
    """A formula was requested outside the parameter range where it holds.

    ``condition`` names the violated hypothesis so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, message: str, condition: str | None = None):
        super().__init__(message)
        self.condition = condition or message


def check_hurst(H, name: str = "H") -> float:
    if not isinstance(H, numbers.Real) or isinstance(H, bool):
        raise TypeError(f"{name} must be a real number, got {type(H).__name__}")
    H = float(H)
    if not 0.0 < H < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {H}")
    return H


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_points(points) -> np.ndarray:
    """Validate a point cloud of shape (n_points, 2) and return it as float64."""
    points = check_array(points, dtype=np.float64, ensure_min_samples=1,
                         ensure_all_finite=True, copy=False)
    if points.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {points.shape}")
    return points


def check_scale(delta, name: str = "delta") -> float:
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {delta}")
    return delta
