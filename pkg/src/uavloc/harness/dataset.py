"""Synthetic training data: one simulated revolution per sample."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..channel import RangingNoiseModel
from ..errors import ParameterError
from ..geometry import TrajectoryParams
from ..learning.phi import PhiMatrix
from ..mobility import MobilityConfig, MobilityModel, gen_route
from .measure import measure_revolution

DATASET_VERSION = 1


@dataclass(frozen=True)
class DatasetTemplate:
    n_spots: int = 100
    meas_per_spot: int = 100
    horizon: int | None = None  # forecast length F, defaults to N
    h: float = 100.0
    rho_bounds: tuple[float, float] = (50.0, 250.0)
    a_max_fraction: float = 0.1  # a ~ U[0, a_max_fraction * rho]
    area_side: float = 1000.0
    speed_bounds: tuple[float, float] = (0.0, 2.0)
    num_waypoints: int = 100
    uav_speed: float = 5.0
    noise: RangingNoiseModel = field(default_factory=RangingNoiseModel)

    @property
    def forecast_len(self) -> int:
        return self.n_spots if self.horizon is None else self.horizon


@dataclass
class Dataset:
    gamma: np.ndarray  # (S, N, L)
    spots: np.ndarray  # (S, N, 3)
    tracks: np.ndarray  # (S, N, 2) U_m
    futures: np.ndarray  # (S, F, 2) F_m

    def __len__(self) -> int:
        return len(self.gamma)

    def phi(self, i: int) -> PhiMatrix:
        return PhiMatrix(self.gamma[i], self.spots[i])

    def phis(self, idx=None) -> list[PhiMatrix]:
        idx = range(len(self)) if idx is None else idx
        return [self.phi(int(i)) for i in idx]

    def save(self, path) -> Path:
        path = Path(path).with_suffix(".npz")
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez(path, version=np.array(DATASET_VERSION), gamma=self.gamma, spots=self.spots,
                 tracks=self.tracks, futures=self.futures)
        return path

    @classmethod
    def load(cls, path) -> "Dataset":
        with np.load(Path(path).with_suffix(".npz")) as d:
            if int(d["version"]) != DATASET_VERSION:
                raise ParameterError(f"unsupported dataset version {int(d['version'])}")
            return cls(d["gamma"], d["spots"], d["tracks"], d["futures"])


def _sample(template: DatasetTemplate, rng: np.random.Generator):
    lo, hi = template.rho_bounds
    rho = rng.uniform(lo, hi)
    a = rng.uniform(0.0, template.a_max_fraction * rho)
    center = rng.uniform(0.0, template.area_side, size=2)
    params = TrajectoryParams(center[0], center[1], template.h, rho, a, template.n_spots)
    # target starts uniformly inside the orbit's disk
    r = rho * np.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2 * np.pi)
    start = center + r * np.array([np.cos(phi), np.sin(phi)])
    mob = MobilityConfig(MobilityModel.SLAW, template.num_waypoints, template.area_side,
                         rng.uniform(*template.speed_bounds), int(rng.integers(2**63)))
    route = gen_route(mob)
    route = route.translated(start - route.position_at(0.0))
    rev = measure_revolution(params, route, 0.0, template.meas_per_spot, template.noise, rng,
                             template.uav_speed)
    t_next = rev.duration + rev.spot_period * np.arange(template.forecast_len)
    return rev.ranges, rev.path.spots, rev.truth, route.position_at(t_next)


def generate_dataset(n_samples: int, template: DatasetTemplate = DatasetTemplate(), seed: int = 0) -> Dataset:
    """Independent revolutions with random orbit, perturbation and SLAW target.

    Every sample has its own generator spawned from ``seed``, so samples can be
    produced in any order or in parallel with the same result.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(n_samples)
    parts = [_sample(template, np.random.default_rng(s)) for s in streams]
    return Dataset(*(np.stack(p) for p in zip(*parts)))
