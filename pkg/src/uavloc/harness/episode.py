"""Closed-loop episodes: measure, estimate, forecast, relocate, repeat."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..control import ControllerState, LoopRecord, LoopState, SpeedEstimates, closed_loop_step, predicted_mean_speed
from ..errors import ConfigurationError, RevolutionError, UavLocError
from ..geometry import TrajectoryParams
from ..learning.checkpoint import load_model
from ..learning.nn import CnnModel, Seq2SeqModel
from ..learning.phi import build_phi
from ..learning.training import cnn_forward, lstm_forecast, persistence_forecast
from ..metrics import TrackError
from ..mobility import Route, gen_route
from ..multilateration import AnchorSet, locate
from ..pseudotri import PseudoTriInstance, solve_dp_oracle, solve_greedy
from .config import SCHEMA_VERSION, EpisodeConfig
from .measure import Revolution, measure_revolution


@dataclass(frozen=True)
class RevolutionRecord:
    index: int  # 1-based
    params: TrajectoryParams  # orbit flown during this revolution
    start_time: float  # simulated seconds
    spot_period: float
    truth: np.ndarray  # (N, 2)
    estimate: np.ndarray  # (N, 2)
    forecast: np.ndarray  # (F, 2)
    error: TrackError
    wall_time: float  # seconds of compute, not part of the summary
    control: LoopRecord | None  # None after the last revolution


@dataclass
class EpisodeLog:
    config: EpisodeConfig
    records: list[RevolutionRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def mean_errors(self) -> np.ndarray:
        return np.array([r.error.mean for r in self.records])

    @property
    def rhos(self) -> np.ndarray:
        return np.array([r.params.rho for r in self.records])

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config_hash": self.config.config_hash(),
            "estimator": self.config.estimator,
            "predictor": self.config.predictor,
            "seed": self.config.seed,
            "revolutions": [
                {
                    "revolution": r.index,
                    "mean_error": r.error.mean,
                    "si": r.error.si,
                    "rho": r.params.rho,
                    "center": [r.params.x_c, r.params.y_c],
                }
                for r in self.records
            ],
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def write_summary(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.summary_json())
        return path

    def write_controller_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["revolution", "x_c", "y_c", "rho", "mean_error", "integral_error"])
            for r in self.records:
                integral = r.control.integral_error if r.control is not None else ""
                w.writerow([r.index, repr(r.params.x_c), repr(r.params.y_c), repr(r.params.rho),
                            repr(r.error.mean), repr(integral) if integral != "" else ""])

    def write_tracks(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["revolution", "n", "true_x", "true_y", "est_x", "est_y"])
            for r in self.records:
                for n, (t, e) in enumerate(zip(r.truth, r.estimate), start=1):
                    w.writerow([r.index, n, repr(t[0]), repr(t[1]), repr(e[0]), repr(e[1])])


@dataclass
class Models:
    cnn: CnnModel | None = None
    lstm: Seq2SeqModel | None = None

    @classmethod
    def for_config(cls, cfg: EpisodeConfig) -> "Models":
        models = cls()
        if cfg.estimator == "cnn":
            if not cfg.cnn_model:
                raise ConfigurationError("the cnn estimator needs a cnn_model checkpoint")
            models.cnn = load_model(cfg.cnn_model)
        if cfg.predictor == "lstm":
            if not cfg.lstm_model:
                raise ConfigurationError("the lstm predictor needs an lstm_model checkpoint")
            models.lstm = load_model(cfg.lstm_model)
        return models


def estimate_track(cfg: EpisodeConfig, rev: Revolution, models: Models, previous: np.ndarray | None) -> np.ndarray:
    """Run the configured estimator on one revolution; returns ``(N, 2)``.

    Every estimator sees the same input: the spots and the ``(N, L)`` ranges.
    The geometric solvers use the per-spot mean range.
    """
    if cfg.estimator == "cnn":
        model = models.cnn
        if model is None:
            raise ConfigurationError("cnn estimator selected but no model loaded")
        if (model.arch.n_spots, model.arch.n_cols) != (cfg.n_spots, cfg.meas_per_spot + 3):
            raise ConfigurationError("cnn checkpoint was trained for a different N or L")
        return cnn_forward(model, build_phi(rev.ranges, rev.path))
    inst = PseudoTriInstance(rev.path, rev.spot_ranges)
    if cfg.estimator == "greedy":
        if cfg.greedy_warm_start and previous is not None:
            return solve_greedy(inst, init=previous[-1], passes=cfg.greedy_passes).positions
        return solve_greedy(inst, passes=cfg.greedy_cold_passes).positions
    if cfg.estimator == "dp_oracle":
        return solve_dp_oracle(inst, cfg.dp_bins).positions
    # static-target multilateration over all spots, fixed ground altitude
    fix = locate(AnchorSet(rev.path.spots, rev.spot_ranges), fixed_z=0.0)
    return np.repeat(fix.position[None, :2], len(rev.path), axis=0)


def forecast_track(cfg: EpisodeConfig, estimate: np.ndarray, models: Models) -> np.ndarray:
    if cfg.predictor == "lstm":
        if models.lstm is None:
            raise ConfigurationError("lstm predictor selected but no model loaded")
        return lstm_forecast(models.lstm, estimate)
    return persistence_forecast(estimate, cfg.n_spots)


def _target_route(cfg: EpisodeConfig, seed: int) -> Route:
    mob = cfg.mobility.__class__(cfg.mobility.model, cfg.mobility.num_waypoints, cfg.mobility.area_side,
                                 cfg.mobility.mean_speed, seed)
    route = gen_route(mob)
    start = cfg.trajectory.center + np.asarray(cfg.target_offset, dtype=float)
    return route.translated(start - route.position_at(0.0))


def run_episode(cfg: EpisodeConfig, models: Models | None = None) -> EpisodeLog:
    """Simulate ``cfg.revolutions`` revolutions of the measurement-control loop.

    All randomness derives from ``cfg.seed``. The UAV is assumed to move to
    the relocated orbit instantly, so revolution ``m + 1`` starts when
    revolution ``m`` ends. No relocation follows the last revolution.
    """
    models = models if models is not None else Models.for_config(cfg)
    mob_seq, meas_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    route = _target_route(cfg, int(mob_seq.generate_state(1, np.uint64)[0]))
    rng = np.random.default_rng(meas_seq)
    state = LoopState(cfg.trajectory, ControllerState(cfg.kp, cfg.ki), cfg.rho_bounds)
    log = EpisodeLog(cfg)
    t = 0.0
    previous = None
    for m in range(1, cfg.revolutions + 1):
        tic = time.perf_counter()
        try:
            params = state.params
            rev = measure_revolution(params, route, t, cfg.meas_per_spot, cfg.noise, rng, cfg.uav_speed,
                                     cfg.range_mode, cfg.channel, cfg.ranging)
            est = estimate_track(cfg, rev, models, previous)
            fc = forecast_track(cfg, est, models)
            err = TrackError.compute(rev.truth, est)
            loop = None
            if m < cfg.revolutions:
                speeds = SpeedEstimates(predicted_mean_speed(fc, rev.spot_period), cfg.uav_speed)
                state, loop = closed_loop_step(state, fc, speeds)
        except UavLocError as e:
            raise RevolutionError(m, e) from e
        log.records.append(RevolutionRecord(m, params, t, rev.spot_period, rev.truth, est, fc, err,
                                            time.perf_counter() - tic, loop))
        t += rev.duration
        previous = est
    return log
