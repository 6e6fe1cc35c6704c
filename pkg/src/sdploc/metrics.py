"""Position-error statistics: per-trial average error and across-trial mean."""

from __future__ import annotations

import numpy as np


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


def per_node_errors(estimated: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Euclidean error of each estimated position against ground truth."""
    estimated = np.asarray(estimated, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimated.shape != truth.shape:
        raise LengthMismatch(
            f"shape mismatch: {estimated.shape} vs {truth.shape}")
    if estimated.size == 0:
        raise EmptyInput("need at least one position")
    return np.sqrt(((estimated - truth) ** 2).sum(axis=1))


def position_error(estimated: np.ndarray, truth: np.ndarray) -> float:
    """Average position error over all blind nodes (meters)."""
    return float(per_node_errors(estimated, truth).mean())


def mean_position_error(trial_errors) -> tuple[float, float]:
    """Mean and population variance of a list of per-trial errors.

    Variance uses divisor L (population), matching how the across-trial
    spread of the density sweep is reported.
    """
    arr = np.asarray(trial_errors, dtype=float)
    if arr.size == 0:
        raise EmptyInput("need at least one trial")
    mean = float(arr.mean())
    var = float(((arr - mean) ** 2).mean())
    return mean, var
