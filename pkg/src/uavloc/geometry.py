"""Coordinate types, perturbed circular UAV orbits and true ranges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, ShapeError


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class TrajectoryParams:
    """Circular orbit of radius ``rho`` at altitude ``h`` about ``(x_c, y_c)``.

    ``a`` is the amplitude of the sinusoidal radius perturbation and
    ``n_spots`` the number of equally spaced measurement spots.
    """

    x_c: float
    y_c: float
    h: float
    rho: float
    a: float = 0.0
    n_spots: int = 100

    def validate(self, rho_bounds: tuple[float, float] | None = None) -> None:
        vals = (self.x_c, self.y_c, self.h, self.rho, self.a)
        if not all(np.isfinite(v) for v in vals):
            raise ParameterError("trajectory parameters must be finite")
        if self.h <= 0:
            raise ParameterError(f"altitude must be positive, got {self.h}")
        if self.n_spots < 2:
            raise ParameterError(f"need at least 2 spots, got {self.n_spots}")
        # a == 0 is accepted as the unperturbed circle
        if self.a < 0 or self.a >= self.rho:
            raise ParameterError(f"perturbation must satisfy 0 <= a < rho (a={self.a}, rho={self.rho})")
        if rho_bounds is not None:
            lo, hi = rho_bounds
            if not lo <= self.rho <= hi:
                raise ParameterError(f"rho={self.rho} outside [{lo}, {hi}]")

    @property
    def center(self) -> np.ndarray:
        return np.array([self.x_c, self.y_c], dtype=float)

    def replace(self, **changes) -> "TrajectoryParams":
        fields = dict(x_c=self.x_c, y_c=self.y_c, h=self.h, rho=self.rho, a=self.a, n_spots=self.n_spots)
        fields.update(changes)
        return TrajectoryParams(**fields)


@dataclass(frozen=True)
class UavPath:
    spots: np.ndarray  # (N, 3)

    def __post_init__(self):
        spots = np.asarray(self.spots, dtype=float)
        if spots.ndim != 2 or spots.shape[1] != 3:
            raise ShapeError(f"spots must be (N, 3), got {spots.shape}")
        object.__setattr__(self, "spots", spots)

    def __len__(self) -> int:
        return len(self.spots)

    def __getitem__(self, i) -> Vec3:
        return Vec3(*self.spots[i])

    @property
    def horizontal(self) -> np.ndarray:
        return self.spots[:, :2]

    def length(self) -> float:
        """Closed-loop length through all spots and back to the first."""
        steps = np.diff(np.vstack([self.spots, self.spots[:1]]), axis=0)
        return float(np.linalg.norm(steps, axis=1).sum())


def gen_uav_trajectory(params: TrajectoryParams) -> UavPath:
    params.validate()
    n = np.arange(1, params.n_spots + 1)
    angle = 2.0 * np.pi * n / params.n_spots
    radius = params.rho + params.a * np.sin(angle)
    spots = np.column_stack([
        radius * np.cos(angle) + params.x_c,
        radius * np.sin(angle) + params.y_c,
        np.full(params.n_spots, float(params.h)),
    ])
    return UavPath(spots)


def as_points(track: Sequence | np.ndarray, dim: int = 3) -> np.ndarray:
    """Coerce a list of Vec3 / rows into an ``(N, dim)`` float array.

    2D rows are lifted to 3D with ``z = 0`` when ``dim == 3``.
    """
    arr = np.asarray(track, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ShapeError(f"expected a list of points, got shape {arr.shape}")
    if arr.shape[1] == dim:
        return arr
    if dim == 3 and arr.shape[1] == 2:
        return np.column_stack([arr, np.zeros(len(arr))])
    raise ShapeError(f"expected points of dimension {dim}, got {arr.shape[1]}")


def true_ranges(path: UavPath, target_track) -> np.ndarray:
    targets = as_points(target_track)
    if len(targets) != len(path):
        raise ShapeError(f"target track has {len(targets)} points, path has {len(path)} spots")
    return np.linalg.norm(path.spots - targets, axis=1)
