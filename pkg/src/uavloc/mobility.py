"""Ground-target tracks: static, polyline and a simplified SLAW walk.

A track is produced by building a piecewise-linear :class:`Route` through a
set of waypoints, walking it at constant speed, and sampling the walk at a
fixed period. Once the last waypoint is reached the target stays there.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

CLUSTER_LEVELS = 3
CLUSTERS_PER_LEVEL = 4


class MobilityModel(enum.Enum):
    STATIC = "static"
    POLYLINE = "polyline"
    SLAW = "slaw"


@dataclass(frozen=True)
class MobilityConfig:
    model: MobilityModel = MobilityModel.SLAW
    num_waypoints: int = 100
    area_side: float = 1000.0
    mean_speed: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.model, str):
            object.__setattr__(self, "model", MobilityModel(self.model))
        if self.num_waypoints < 1:
            raise ParameterError("num_waypoints must be >= 1")
        if self.area_side <= 0:
            raise ParameterError("area_side must be positive")
        if not self.mean_speed >= 0:
            raise ParameterError("mean_speed must be >= 0")


@dataclass(frozen=True)
class Route:
    """Constant-speed walk along ``waypoints`` (K, 2)."""

    waypoints: np.ndarray
    speed: float

    def __post_init__(self):
        wp = np.atleast_2d(np.asarray(self.waypoints, dtype=float))
        object.__setattr__(self, "waypoints", wp)
        seg = np.linalg.norm(np.diff(wp, axis=0), axis=1)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def translated(self, offset) -> "Route":
        return Route(self.waypoints + np.asarray(offset, dtype=float)[:2], self.speed)

    def position_at(self, t) -> np.ndarray:
        """Planar position(s) at time(s) ``t`` seconds; shape ``t.shape + (2,)``."""
        t = np.asarray(t, dtype=float)
        s = np.clip(t * self.speed, 0.0, self.length)
        wp = self.waypoints
        if len(wp) == 1 or self.length == 0.0:
            return np.broadcast_to(wp[0], t.shape + (2,)).copy()
        i = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(wp) - 2)
        seg = self._cum[i + 1] - self._cum[i]
        frac = np.where(seg > 0, (s - self._cum[i]) / np.where(seg > 0, seg, 1.0), 0.0)
        return wp[i] + frac[..., None] * (wp[i + 1] - wp[i])


@dataclass(frozen=True)
class UserTrack:
    positions: np.ndarray  # (n, 3), z = 0
    sample_period: float

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def xy(self) -> np.ndarray:
        return self.positions[:, :2]

    def step_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.xy, axis=0), axis=1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "x", "y"])
            for n, (x, y) in enumerate(self.xy, start=1):
                w.writerow([n, repr(float(x)), repr(float(y))])


def slaw_waypoints(n: int, area_side: float, rng: np.random.Generator) -> np.ndarray:
    """Cluster-of-clusters point process inside ``[0, area_side]^2``.

    Each level places 4 sub-cells at uniform positions inside the parent
    cell, at half the parent's side. Waypoints are drawn uniformly inside
    leaf cells picked at random, so points concentrate where cells nest.
    """
    cells = np.array([[0.0, 0.0]])  # lower-left corners
    side = area_side
    for _ in range(CLUSTER_LEVELS):
        child = side / 2
        offsets = rng.uniform(0.0, side - child, size=(len(cells), CLUSTERS_PER_LEVEL, 2))
        cells = (cells[:, None, :] + offsets).reshape(-1, 2)
        side = child
    leaf = rng.integers(0, len(cells), size=n)
    return cells[leaf] + rng.uniform(0.0, side, size=(n, 2))


def nearest_neighbor_order(points: np.ndarray) -> np.ndarray:
    """Greedy visiting order starting at the first point."""
    n = len(points)
    order = [0]
    left = np.ones(n, dtype=bool)
    left[0] = False
    for _ in range(n - 1):
        d = np.linalg.norm(points - points[order[-1]], axis=1)
        d[~left] = np.inf
        j = int(np.argmin(d))
        order.append(j)
        left[j] = False
    return np.asarray(order)


def gen_route(cfg: MobilityConfig) -> Route:
    rng = np.random.default_rng(cfg.seed)
    side = cfg.area_side
    if cfg.model is MobilityModel.STATIC:
        wp = rng.uniform(0.0, side, size=(1, 2))
    elif cfg.model is MobilityModel.POLYLINE:
        wp = rng.uniform(0.0, side, size=(cfg.num_waypoints, 2))
    else:
        pts = slaw_waypoints(cfg.num_waypoints, side, rng)
        wp = pts[nearest_neighbor_order(pts)]
    speed = 0.0 if cfg.model is MobilityModel.STATIC else cfg.mean_speed
    return Route(wp, speed)


def sample_route(route: Route, n_samples: int, sample_period: float = 1.0, start_time: float = 0.0) -> UserTrack:
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    if sample_period <= 0:
        raise ParameterError("sample_period must be positive")
    t = start_time + sample_period * np.arange(n_samples)
    xy = route.position_at(t)
    return UserTrack(np.column_stack([xy, np.zeros(n_samples)]), sample_period)


def gen_track(cfg: MobilityConfig, n_samples: int, sample_period: float = 1.0) -> UserTrack:
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    return sample_route(gen_route(cfg), n_samples, sample_period)


def direction_changes_per_length(xy, min_turn_deg: float = 5.0) -> float:
    """Heading changes larger than ``min_turn_deg`` per meter travelled."""
    xy = np.asarray(xy, dtype=float)
    d = np.diff(xy, axis=0)
    step = np.linalg.norm(d, axis=1)
    d = d[step > 1e-12]
    length = step.sum()
    if len(d) < 2 or length == 0:
        return 0.0
    heading = np.arctan2(d[:, 1], d[:, 0])
    turn = np.abs(np.angle(np.exp(1j * np.diff(heading))))
    return float(np.count_nonzero(turn > np.radians(min_turn_deg)) / length)
