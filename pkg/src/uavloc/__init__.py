"""Locating a ground target from a single circling UAV."""

from .errors import UavLocError
from .geometry import TrajectoryParams, UavPath, Vec3, gen_uav_trajectory, true_ranges

__version__ = "0.1.0"

__all__ = ["UavLocError", "TrajectoryParams", "UavPath", "Vec3", "gen_uav_trajectory", "true_ranges"]
