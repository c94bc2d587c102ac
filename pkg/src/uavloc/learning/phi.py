"""Per-revolution measurement matrix: ranges block next to spot coordinates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, ShapeError
from ..geometry import UavPath


@dataclass(frozen=True)
class PhiMatrix:
    gamma_block: np.ndarray  # (N, L) ranges, m
    spot_block: np.ndarray  # (N, 3) spot coordinates, m

    @property
    def n_spots(self) -> int:
        return self.gamma_block.shape[0]

    @property
    def n_meas(self) -> int:
        return self.gamma_block.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return np.hstack([self.gamma_block, self.spot_block])

    @property
    def center(self) -> np.ndarray:
        """Orbit center; equally spaced spots of a (perturbed) circle average to it."""
        return self.spot_block[:, :2].mean(axis=0)

    def normalized(self, scale: float | None = 1000.0) -> np.ndarray:
        """Network input, ``(N, L + 3)``.

        Spot coordinates are taken relative to the orbit center, then every
        entry is divided by ``scale``. ``scale=None`` divides by the largest
        absolute entry instead, mapping everything into ``[-1, 1]``.
        """
        rel = self.spot_block.copy()
        rel[:, :2] -= self.center
        m = np.hstack([self.gamma_block, rel])
        if scale is None:
            peak = np.max(np.abs(m))
            return m / peak if peak > 0 else m
        if scale <= 0:
            raise ParameterError("scale must be positive")
        return m / scale


def build_phi(ranges, path: UavPath) -> PhiMatrix:
    gamma = np.asarray(ranges, dtype=float)
    if gamma.ndim == 1:
        gamma = gamma[:, None]
    if gamma.ndim != 2 or gamma.shape[0] != len(path):
        raise ShapeError(f"ranges {gamma.shape} do not match {len(path)} spots")
    if np.any(gamma < 0):
        raise ParameterError("ranges must be non-negative")
    return PhiMatrix(gamma.copy(), path.spots.copy())


def stripe_rows(phi: PhiMatrix, z_thresh: float = 3.0) -> np.ndarray:
    """Indices of rows whose mean range is an outlier against the row-mean spread.

    Uses the median absolute deviation so a contiguous block of inflated rows
    does not mask itself.
    """
    row = phi.gamma_block.mean(axis=1)
    med = np.median(row)
    mad = np.median(np.abs(row - med)) * 1.4826
    if mad == 0:
        return np.flatnonzero(row != med)
    return np.flatnonzero(np.abs(row - med) / mad > z_thresh)
