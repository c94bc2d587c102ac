"""Episode configuration, INI loading and the config hash."""

from __future__ import annotations

import configparser
import dataclasses
import enum
import hashlib
import json
from dataclasses import dataclass

from ..channel import ChannelParams, RangingNoiseModel
from ..control import KI, KP, RHO_BOUNDS
from ..errors import ConfigurationError, UavLocError
from ..geometry import TrajectoryParams
from ..mobility import MobilityConfig, MobilityModel
from ..ranging import RangingConfig
from .measure import RANGE_MODES

ESTIMATORS = ("greedy", "dp_oracle", "cnn", "multilat_baseline")
PREDICTORS = ("persistence", "lstm")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EpisodeConfig:
    trajectory: TrajectoryParams = TrajectoryParams(500.0, 500.0, 100.0, 100.0, 0.0, 100)
    mobility: MobilityConfig = MobilityConfig(MobilityModel.STATIC, num_waypoints=100, mean_speed=0.0)
    target_offset: tuple[float, float] = (30.0, 40.0)  # initial target position minus initial orbit center
    channel: ChannelParams = ChannelParams()
    noise: RangingNoiseModel = RangingNoiseModel()
    ranging: RangingConfig = RangingConfig()
    range_mode: str = "fast"
    n_spots: int = 100
    meas_per_spot: int = 100
    revolutions: int = 10
    estimator: str = "greedy"
    predictor: str = "persistence"
    seed: int = 0
    uav_speed: float = 5.0
    rho_bounds: tuple[float, float] = RHO_BOUNDS
    kp: float = KP
    ki: float = KI
    greedy_passes: int = 1  # sweeps per revolution when warm-started
    greedy_cold_passes: int = 3  # sweeps when there is no previous estimate
    greedy_warm_start: bool = True
    dp_bins: int = 360
    cnn_model: str = ""
    lstm_model: str = ""

    def __post_init__(self):
        if min(self.n_spots, self.meas_per_spot, self.revolutions) < 1:
            raise ConfigurationError("n_spots, meas_per_spot and revolutions must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise ConfigurationError(f"unknown estimator {self.estimator!r}; choose from {ESTIMATORS}")
        if self.predictor not in PREDICTORS:
            raise ConfigurationError(f"unknown predictor {self.predictor!r}; choose from {PREDICTORS}")
        if self.range_mode not in RANGE_MODES:
            raise ConfigurationError(f"unknown range mode {self.range_mode!r}")
        if self.trajectory.n_spots != self.n_spots:
            object.__setattr__(self, "trajectory", self.trajectory.replace(n_spots=self.n_spots))
        try:
            self.trajectory.validate(self.rho_bounds)
        except UavLocError as e:
            raise ConfigurationError(str(e)) from e

    def replace(self, **changes) -> "EpisodeConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, enum.Enum):
        return value.value
    return value


# INI sections map onto nested dataclasses; [episode] holds the top level
SECTIONS = {
    "trajectory": "trajectory",
    "mobility": "mobility",
    "channel": "channel",
    "noise": "noise",
    "ranging": "ranging",
}


def _coerce(default, text: str, key: str):
    text = text.strip()
    try:
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes", "on")
        if isinstance(default, enum.Enum):
            return type(default)(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            return tuple(float(v) for v in text.split(","))
    except ValueError as e:
        raise ConfigurationError(f"bad value for {key}: {text!r}") from e
    return text


def _apply(obj, values: dict[str, str], section: str):
    names = {f.name for f in dataclasses.fields(obj)}
    changes = {}
    for key, text in values.items():
        if key not in names:
            raise ConfigurationError(f"unknown key [{section}] {key}")
        changes[key] = _coerce(getattr(obj, key), text, f"[{section}] {key}")
    try:
        return dataclasses.replace(obj, **changes)
    except UavLocError as e:
        raise ConfigurationError(f"[{section}]: {e}") from e


def parse_config(text: str, base: EpisodeConfig = EpisodeConfig()) -> EpisodeConfig:
    """Build a config from INI text; keys not mentioned keep ``base`` values."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigurationError(str(e)) from e
    nested = {}
    for section in cp.sections():
        values = dict(cp.items(section))
        if section == "episode":
            continue
        if section not in SECTIONS:
            raise ConfigurationError(f"unknown section [{section}]")
        nested[SECTIONS[section]] = _apply(getattr(base, SECTIONS[section]), values, section)
    top = dict(cp.items("episode")) if cp.has_section("episode") else {}
    cfg = dataclasses.replace(base, **nested) if nested else base
    # the top-level n_spots wins and is synced into the trajectory
    if "n_spots" not in top and cp.has_section("trajectory") and "n_spots" in cp["trajectory"]:
        top["n_spots"] = cp["trajectory"]["n_spots"]
    return _apply(cfg, top, "episode") if top else cfg


def load_config(path) -> EpisodeConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
