"""Per-revolution localization error and the Similarity Index."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


def _per_spot_errors(truth, estimate) -> np.ndarray:
    truth = np.asarray(truth, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if truth.shape != estimate.shape or truth.ndim != 2 or len(truth) == 0:
        raise ShapeError(f"shape mismatch: truth {truth.shape} vs estimate {estimate.shape}")
    return np.linalg.norm(truth - estimate, axis=1)


def si_from_errors(errors) -> float:
    """Jain-style uniformity of a vector of non-negative errors.

    Ranges from ``1/N`` (a single nonzero error) to ``1`` (all equal). An
    all-zero vector is treated as perfectly uniform and returns 1. Sums are
    exactly rounded, so the result does not depend on the order of errors.
    """
    e = np.asarray(errors, dtype=float).ravel()
    sq = math.fsum(e * e)
    if sq == 0.0:
        return 1.0
    total = math.fsum(e)
    return total * total / (len(e) * sq)  # pow() is not always correctly rounded


def similarity_index(truth, estimate) -> float:
    return si_from_errors(_per_spot_errors(truth, estimate))


def mean_localization_error(truth, estimate) -> float:
    return float(_per_spot_errors(truth, estimate).mean())


@dataclass(frozen=True)
class TrackError:
    per_spot_errors: np.ndarray
    mean: float
    si: float

    @classmethod
    def compute(cls, truth, estimate) -> "TrackError":
        e = _per_spot_errors(truth, estimate)
        return cls(per_spot_errors=e, mean=float(e.mean()), si=si_from_errors(e))
