"""Orbit relocation from forecast positions and the discrete PI radius loop."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .geometry import TrajectoryParams

KP = 0.1
KI = 0.11
RHO_BOUNDS = (50.0, 250.0)


@dataclass(frozen=True)
class RelocationOffsets:
    delta_x: float = 0.0
    delta_y: float = 0.0
    delta_rho: float = 0.0


@dataclass(frozen=True)
class SpeedEstimates:
    v_bar_t: float = 0.0  # predicted mean target speed, m/s
    v_bar_d: float = 5.0  # UAV speed, m/s

    def __post_init__(self):
        if self.v_bar_d <= 0:
            raise ParameterError("UAV speed must be positive")


@dataclass
class ControllerState:
    kp: float = KP
    ki: float = KI
    integral_error: float = 0.0
    omega: float = 0.0  # angular position logged at linearization time
    integral_limit: float | None = None  # |ki * integral| bound

    def __post_init__(self):
        if self.kp <= 0 or self.ki <= 0:
            raise ParameterError("PI gains must be positive")


def pi_step(state: ControllerState, error: float) -> float:
    """One step of ``C(z) = Kp + Ki/(z - 1)`` with unit sample time."""
    if not np.isfinite(error):
        raise ParameterError("error must be finite")
    state.integral_error += error
    if state.integral_limit is not None:
        bound = state.integral_limit / state.ki
        state.integral_error = float(np.clip(state.integral_error, -bound, bound))
    return state.kp * error + state.ki * state.integral_error


def predicted_mean_speed(predicted, dt: float) -> float:
    """Mean step length of the forecast divided by the spot period ``dt``."""
    pts = np.asarray(predicted, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).mean() / dt)


@dataclass(frozen=True)
class Relocation:
    params: TrajectoryParams  # center moved, radius set to the target radius
    offsets: RelocationOffsets
    spread: float  # (v_t / v_d) * max distance of a forecast from its mean
    target_rho: float


def relocate(params: TrajectoryParams, predicted, speeds: SpeedEstimates,
             bounds: tuple[float, float] = RHO_BOUNDS) -> Relocation:
    """Move the orbit center onto the forecast centroid and size the radius.

    The target radius is the speed-weighted forecast spread, floored at the
    minimum radius and clamped to ``bounds``.
    """
    pts = np.asarray(predicted, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ParameterError("empty prediction")
    mean = pts.mean(axis=0)
    spread = speeds.v_bar_t / speeds.v_bar_d * float(np.max(np.linalg.norm(pts - mean, axis=1)))
    lo, hi = bounds
    target = float(np.clip(max(lo, spread), lo, hi))
    offsets = RelocationOffsets(mean[0] - params.x_c, mean[1] - params.y_c, target - params.rho)
    new = params.replace(x_c=float(mean[0]), y_c=float(mean[1]), rho=target)
    return Relocation(new, offsets, spread, target)


@dataclass
class LoopState:
    params: TrajectoryParams
    controller: ControllerState = field(default_factory=ControllerState)
    bounds: tuple[float, float] = RHO_BOUNDS


@dataclass(frozen=True)
class LoopRecord:
    params: TrajectoryParams
    center_shift: float
    target_rho: float
    rho_error: float
    pi_output: float
    integral_error: float
    spread: float
    v_bar_t: float


def closed_loop_step(state: LoopState, predicted, speeds: SpeedEstimates) -> tuple[LoopState, LoopRecord]:
    """Relocate the orbit for the next revolution.

    The center jumps to the forecast centroid. The radius follows the PI law
    on the radius excess (reference 0): ``error = target_rho - rho``. The
    commanded radius is clamped to the bounds and the integrator is
    back-calculated whenever the clamp is active, so a saturated radius does
    not accumulate windup.
    """
    params = state.params
    reloc = relocate(params, predicted, speeds, state.bounds)
    ctrl = replace(state.controller)
    lo, hi = state.bounds
    if ctrl.integral_limit is None:
        ctrl.integral_limit = hi - lo
    error = reloc.target_rho - params.rho
    u = pi_step(ctrl, error)
    rho = float(np.clip(params.rho + u, lo, hi))
    applied = rho - params.rho
    if applied != u:
        ctrl.integral_error = (applied - ctrl.kp * error) / ctrl.ki
    ctrl.omega = float(2.0 * np.pi / params.n_spots)
    new_params = params.replace(x_c=reloc.params.x_c, y_c=reloc.params.y_c, rho=rho)
    if new_params.a >= rho:
        new_params = new_params.replace(a=0.5 * rho)
    record = LoopRecord(
        params=new_params,
        center_shift=float(np.hypot(reloc.offsets.delta_x, reloc.offsets.delta_y)),
        target_rho=reloc.target_rho,
        rho_error=error,
        pi_output=u,
        integral_error=ctrl.integral_error,
        spread=reloc.spread,
        v_bar_t=speeds.v_bar_t,
    )
    return LoopState(new_params, ctrl, state.bounds), record
