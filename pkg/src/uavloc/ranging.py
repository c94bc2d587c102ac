"""Zadoff-Chu reference signals and time-of-flight estimation.

The delay of a received copy of a known ZC sequence is found from the
magnitude peak of their circular cross-correlation, computed in the
frequency domain. Zero-padding the cross spectrum before the inverse DFT
upsamples the correlation by ``K`` (band-limited interpolation), refining the
delay grid from one sample to ``1/K`` samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .channel import SPEED_OF_LIGHT
from .errors import NoPeakError, ParameterError, ShapeError


@dataclass(frozen=True)
class ZcSequence:
    root_q: int
    n_zc: int
    samples: np.ndarray

    @property
    def is_cazac(self) -> bool:
        return gcd(self.root_q, self.n_zc) == 1


@dataclass(frozen=True)
class RangingConfig:
    sample_rate_hz: float = 30.72e6
    upsample_k: int = 4
    n_zc: int = 839
    root_q: int = 25

    def __post_init__(self):
        if self.upsample_k < 1:
            raise ParameterError("upsample_k must be >= 1")
        if self.sample_rate_hz <= 0:
            raise ParameterError("sample rate must be positive")


@dataclass(frozen=True)
class ToFEstimate:
    delay_samples: float
    delay_seconds: float
    range_meters: float
    peak_magnitude: float
    peak_to_sidelobe: float


def gen_zc(root_q: int, n_zc: int) -> ZcSequence:
    if n_zc < 1 or n_zc % 2 == 0:
        raise ParameterError(f"ZC length must be odd and positive, got {n_zc}")
    if not 1 <= root_q < n_zc:
        raise ParameterError(f"root must lie in [1, {n_zc - 1}], got {root_q}")
    n = np.arange(n_zc, dtype=np.int64)
    # reduce n(n+1)/2 * q modulo N in integers to keep the phase exact for long sequences
    phase_index = (root_q * (n * (n + 1) // 2)) % n_zc
    samples = np.exp(-2j * np.pi * phase_index / n_zc)
    return ZcSequence(root_q=root_q, n_zc=n_zc, samples=samples)


def circ_autocorr(seq: ZcSequence, lag: int) -> complex:
    x = seq.samples
    return complex(np.sum(x * np.conj(np.roll(x, -lag))))


def xcorr_direct(known, received) -> np.ndarray:
    """O(N^2) circular cross-correlation, ``c[m] = sum_n y[n] conj(x[n - m])``."""
    x = np.asarray(known, dtype=complex)
    y = np.asarray(received, dtype=complex)
    n = len(x)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return (y[None, :] * np.conj(x[idx])).sum(axis=1)


def _signed_bins(n: int) -> np.ndarray:
    return np.fft.fftfreq(n) * n


def xcorr_dft(known, received, upsample_k: int = 1) -> np.ndarray:
    """Circular cross-correlation via the DFT, optionally upsampled by ``K``.

    Returns ``K * N`` lags spaced ``1/K`` base samples apart; for ``K = 1`` it
    matches :func:`xcorr_direct`.
    """
    x = np.asarray(known, dtype=complex)
    y = np.asarray(received, dtype=complex)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError(f"sequences must be 1D and equal length, got {x.shape} and {y.shape}")
    n = len(x)
    cross = np.fft.fft(y) * np.conj(np.fft.fft(x))
    if upsample_k == 1:
        return np.fft.ifft(cross)
    m = upsample_k * n
    padded = np.zeros(m, dtype=complex)
    half = (n + 1) // 2
    padded[:half] = cross[:half]
    if n % 2 == 0:
        # split the Nyquist bin so the interpolant stays real-symmetric
        padded[half] = cross[half] / 2
        padded[m - half] = cross[half] / 2
        padded[m - half + 1:] = cross[half + 1:]
    else:
        padded[m - (n - half):] = cross[half:]
    return np.fft.ifft(padded) * upsample_k


def delay_signal(samples, delay: float) -> np.ndarray:
    """Circularly delay a signal by a possibly fractional number of samples."""
    s = np.asarray(samples, dtype=complex)
    k = _signed_bins(len(s))
    return np.fft.ifft(np.fft.fft(s) * np.exp(-2j * np.pi * k * delay / len(s)))


def add_awgn(signal, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise; SNR is signal power over noise power."""
    s = np.asarray(signal, dtype=complex)
    power = np.mean(np.abs(s) ** 2)
    noise_var = power / 10.0 ** (snr_db / 10.0)
    noise = rng.normal(size=s.shape) + 1j * rng.normal(size=s.shape)
    return s + noise * np.sqrt(noise_var / 2.0)


def range_resolution(cfg: RangingConfig = RangingConfig()) -> float:
    return SPEED_OF_LIGHT / (cfg.sample_rate_hz * cfg.upsample_k)


def estimate_tof(known: ZcSequence, received, cfg: RangingConfig = RangingConfig()) -> ToFEstimate:
    y = np.asarray(received, dtype=complex)
    if y.shape != (known.n_zc,):
        raise ShapeError(f"received signal must have {known.n_zc} samples, got {y.shape}")
    if not np.any(y):
        raise NoPeakError("received signal is identically zero")
    k = cfg.upsample_k
    mag = np.abs(xcorr_dft(known.samples, y, k))
    peak = int(np.argmax(mag))
    # main lobe spans one base sample on either side of the peak
    offsets = (np.arange(len(mag)) - peak) % len(mag)
    offsets = np.minimum(offsets, len(mag) - offsets)
    side = mag[offsets >= k]
    sidelobe = float(side.max()) if side.size else 0.0
    psr = float(mag[peak] / sidelobe) if sidelobe > 0 else float("inf")
    delay = peak / k
    seconds = delay / cfg.sample_rate_hz
    return ToFEstimate(
        delay_samples=delay,
        delay_seconds=seconds,
        range_meters=SPEED_OF_LIGHT * seconds,
        peak_magnitude=float(mag[peak]),
        peak_to_sidelobe=psr,
    )


def simulate_ranging(true_range: float, cfg: RangingConfig, snr_db: float, rng: np.random.Generator,
                     seq: ZcSequence | None = None) -> ToFEstimate:
    """Signal-level range measurement: delay the reference, add noise, estimate."""
    seq = seq if seq is not None else gen_zc(cfg.root_q, cfg.n_zc)
    delay = true_range / SPEED_OF_LIGHT * cfg.sample_rate_hz
    rx = add_awgn(delay_signal(seq.samples, delay), snr_db, rng)
    return estimate_tof(seq, rx, cfg)
