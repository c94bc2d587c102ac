"""Air-to-ground propagation and noisy range synthesis.

Path loss follows the usual LoS/NLoS-weighted free-space model with
log-normal shadowing. Ranging error is modeled directly on the distance:
Gaussian with a standard deviation that grows linearly with the true range,
plus an optional per-spot rubble bias proportional to the rubble loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ChannelParams:
    eta_los: float = 2.3  # dB
    eta_nlos: float = 34.0  # dB
    a_env: float = 27.23
    b_env: float = 0.08
    f_c: float = 1.8e9  # Hz
    sigma_sh: float = 4.0  # dB

    def __post_init__(self):
        if self.f_c <= 0:
            raise ParameterError("carrier frequency must be positive")
        if self.sigma_sh < 0:
            raise ParameterError("shadowing deviation must be non-negative")


@dataclass(frozen=True)
class RangingNoiseModel:
    sigma0: float = 2.0  # m
    k_dist: float = 0.05
    rubble_enabled: bool = False
    rubble_loss_max: float = 60.0  # dB
    beta_rubble: float = 0.5  # m/dB
    mode: str = "gaussian"  # or "rayleigh"
    rayleigh_alpha: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.sigma0 < 0 or self.k_dist < 0 or self.rubble_loss_max < 0:
            raise ParameterError("noise parameters must be non-negative")
        if self.mode not in ("gaussian", "rayleigh"):
            raise ParameterError(f"unknown noise mode {self.mode!r}")

    @classmethod
    def noiseless(cls) -> "RangingNoiseModel":
        return cls(sigma0=0.0, k_dist=0.0, rubble_enabled=False)


def elevation_deg(h, r):
    return np.degrees(np.arctan2(h, r))


def p_los(h, r, p: ChannelParams = ChannelParams()):
    """Probability of line of sight for altitude ``h`` and ground distance ``r``.

    The elevation angle enters in degrees.
    """
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(h <= 0):
        raise ParameterError("altitude must be positive")
    if np.any(r < 0):
        raise ParameterError("ground distance must be non-negative")
    theta = elevation_deg(h, r)
    out = 1.0 / (1.0 + p.a_env * np.exp(-p.b_env * (theta - p.a_env)))
    return out if out.ndim else float(out)


def path_loss_db(h, r, p: ChannelParams = ChannelParams(), rng: np.random.Generator | None = None):
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    d = np.hypot(h, r)
    if np.any(d <= 0):
        raise DomainError("zero 3D distance")
    prob = p_los(h, r, p)
    pl = (20.0 * np.log10(4.0 * np.pi * p.f_c / SPEED_OF_LIGHT)
          + 20.0 * np.log10(d)
          + prob * p.eta_los + (1.0 - prob) * p.eta_nlos)
    if p.sigma_sh > 0:
        if rng is None:
            raise ParameterError("a generator is required when sigma_sh > 0")
        pl = pl + rng.normal(0.0, p.sigma_sh, size=np.shape(pl))
    return pl if np.ndim(pl) else float(pl)


def snr_db(path_loss, tx_power_dbm: float = 23.0, noise_floor_dbm: float = -97.0):
    """Link SNR for a UE transmit power and receiver noise floor (20 MHz band)."""
    return tx_power_dbm - np.asarray(path_loss) - noise_floor_dbm


def draw_rubble_losses(n_spots: int, model: RangingNoiseModel, rng: np.random.Generator) -> np.ndarray:
    if n_spots < 1:
        raise ParameterError("n_spots must be >= 1")
    if not model.rubble_enabled:
        return np.zeros(n_spots)
    return rng.uniform(0.0, model.rubble_loss_max, size=n_spots)


def synth_range(true_gamma, model: RangingNoiseModel, spot_rubble_loss=0.0,
                rng: np.random.Generator | None = None, size=None):
    """Noisy range measurement(s) for true distance(s) ``true_gamma``.

    ``size`` follows numpy broadcasting: pass ``(N, L)`` with ``true_gamma``
    and ``spot_rubble_loss`` shaped ``(N, 1)`` to draw L measurements per spot
    that share the spot's rubble loss.
    """
    gamma = np.asarray(true_gamma, dtype=float)
    if np.any(gamma < 0):
        raise DomainError("true range must be non-negative")
    shape = np.broadcast_shapes(gamma.shape, np.shape(spot_rubble_loss)) if size is None else size
    bias = model.beta_rubble * np.asarray(spot_rubble_loss, dtype=float) if model.rubble_enabled else 0.0

    if model.mode == "gaussian":
        sigma = model.sigma0 + model.k_dist * gamma
        if np.all(sigma == 0):
            noise = np.zeros(shape)
        else:
            if rng is None:
                raise ParameterError("a generator is required for noisy ranging")
            noise = rng.normal(0.0, 1.0, size=shape) * sigma
    else:
        # variance alpha * gamma, Rayleigh scale from Var = (2 - pi/2) s^2
        if rng is None:
            raise ParameterError("a generator is required for noisy ranging")
        scale = np.sqrt(model.rayleigh_alpha * gamma / (2.0 - np.pi / 2.0))
        noise = rng.rayleigh(1.0, size=shape) * scale

    out = np.maximum(0.0, gamma + bias + noise)
    return out if np.ndim(out) else float(out)
