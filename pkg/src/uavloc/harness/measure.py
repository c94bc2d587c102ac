"""Per-revolution measurement synthesis shared by episodes and datasets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channel import (
    ChannelParams,
    RangingNoiseModel,
    draw_rubble_losses,
    path_loss_db,
    snr_db,
    synth_range,
)
from ..errors import ParameterError
from ..geometry import TrajectoryParams, UavPath, gen_uav_trajectory, true_ranges
from ..mobility import Route
from ..ranging import RangingConfig, gen_zc, simulate_ranging

RANGE_MODES = ("fast", "full")


@dataclass(frozen=True)
class Revolution:
    path: UavPath
    start_time: float  # s
    spot_period: float  # s
    truth: np.ndarray  # (N, 2) target position at each spot time
    ranges: np.ndarray  # (N, L) measured ranges
    rubble: np.ndarray  # (N,) per-spot rubble loss, dB
    snr: np.ndarray  # (N,) link SNR report, dB

    @property
    def duration(self) -> float:
        return self.spot_period * len(self.path)

    @property
    def spot_ranges(self) -> np.ndarray:
        """One range per spot: the mean of its L measurements."""
        return self.ranges.mean(axis=1)


def spot_period(path: UavPath, uav_speed: float) -> float:
    if uav_speed <= 0:
        raise ParameterError("UAV speed must be positive")
    return path.length() / uav_speed / len(path)


def measure_revolution(params: TrajectoryParams, route: Route, start_time: float, meas_per_spot: int,
                       noise: RangingNoiseModel, rng: np.random.Generator, uav_speed: float = 5.0,
                       mode: str = "fast", channel: ChannelParams = ChannelParams(),
                       ranging: RangingConfig = RangingConfig()) -> Revolution:
    """Fly one revolution and collect ``meas_per_spot`` ranges at every spot.

    All L measurements at a spot are taken at the same instant. In ``fast``
    mode the ranges come from the statistical noise model; in ``full`` mode
    each one is a signal-level ToF estimate at the SNR implied by the path
    loss, reduced by the spot's rubble loss.
    """
    if meas_per_spot < 1:
        raise ParameterError("meas_per_spot must be >= 1")
    if mode not in RANGE_MODES:
        raise ParameterError(f"unknown range mode {mode!r}")
    path = gen_uav_trajectory(params)
    dt = spot_period(path, uav_speed)
    n = len(path)
    truth = route.position_at(start_time + dt * np.arange(n))
    gamma = true_ranges(path, truth)
    rubble = draw_rubble_losses(n, noise, rng)
    horiz = np.linalg.norm(path.horizontal - truth, axis=1)
    pl = path_loss_db(params.h, horiz, channel, rng if channel.sigma_sh > 0 else None)
    snr = snr_db(pl) - rubble
    if mode == "fast":
        ranges = synth_range(gamma[:, None], noise, rubble[:, None], rng, size=(n, meas_per_spot))
    else:
        seq = gen_zc(ranging.root_q, ranging.n_zc)
        ranges = np.array([[simulate_ranging(g, ranging, s, rng, seq).range_meters
                            for _ in range(meas_per_spot)] for g, s in zip(gamma, snr)])
    return Revolution(path, start_time, dt, truth, np.asarray(ranges, dtype=float), rubble, np.asarray(snr))
