"""Frequency-agile waveform schedule and per-pulse echo synthesis.

Works directly with post-compression baseband spectra: each pulse
contributes bins_per_band complex samples on its sub-band, with the
stop-and-go delay phase exp(-j 4 pi (f + f_n)(R + n V T_r)/c) applied at
the absolute frequency of every bin.  The per-pulse waveform spectrum is
flat unit magnitude by default; an optional raised-cosine edge taper is
available on RadarParams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import Prng, _is_power_of_two
from .scene import SPEED_OF_LIGHT, TargetInstance, target_transfer


@dataclass(frozen=True)
class RadarParams:
    """Band plan of the synthetic wideband waveform.

    Defaults give 16 x 50 MHz = 800 MHz total bandwidth starting at
    2.4 GHz, sampled on 16 x 64 = 1024 bins.
    """

    f_start: float = 2.4e9
    n_bands: int = 16
    band_bw: float = 50e6
    bins_per_band: int = 64
    pri: float = 1e-3
    c: float = SPEED_OF_LIGHT
    edge_taper: float = 0.0  # raised-cosine taper fraction per band edge, 0 = flat

    def __post_init__(self):
        if self.n_bands < 1 or self.bins_per_band < 1:
            raise ValueError("n_bands and bins_per_band must be positive")
        if not _is_power_of_two(self.n_bands * self.bins_per_band):
            raise ValueError(
                f"n_bands * bins_per_band must be a power of two, "
                f"got {self.n_bands} * {self.bins_per_band}"
            )
        if self.band_bw <= 0 or self.pri <= 0 or self.c <= 0:
            raise ValueError("band_bw, pri, and c must be positive")
        if not 0.0 <= self.edge_taper <= 0.5:
            raise ValueError("edge_taper must be in [0, 0.5]")

    @property
    def total_bandwidth(self) -> float:
        return self.n_bands * self.band_bw

    @property
    def n_bins(self) -> int:
        return self.n_bands * self.bins_per_band

    @property
    def bin_width(self) -> float:
        return self.band_bw / self.bins_per_band

    @property
    def range_resolution(self) -> float:
        """Range bin spacing c / (2 B_total); 0.1875 m at defaults."""
        return self.c / (2.0 * self.total_bandwidth)

    @property
    def window_length_m(self) -> float:
        """Unambiguous range window of the synthetic profile."""
        return self.n_bins * self.range_resolution

    def band_center(self, band: int) -> float:
        """Carrier frequency of a sub-band (band center)."""
        return self.f_start + band * self.band_bw + self.band_bw / 2.0

    def baseband_freqs(self) -> np.ndarray:
        """Bin-center offsets within one band, relative to its carrier."""
        k = np.arange(self.bins_per_band)
        return (k + 0.5) * self.bin_width - self.band_bw / 2.0

    def band_freqs(self, band: int) -> np.ndarray:
        """Absolute bin-center frequencies of a sub-band."""
        return self.band_center(band) + self.baseband_freqs()

    def wideband_grid(self) -> np.ndarray:
        """Absolute bin-center frequencies of the full stitched spectrum."""
        k = np.arange(self.n_bins)
        return self.f_start + (k + 0.5) * self.bin_width

    def waveform_spectrum(self) -> np.ndarray:
        """|A_n(f)| over one band: flat, or raised-cosine tapered edges."""
        n = self.bins_per_band
        a = np.ones(n)
        n_taper = int(round(self.edge_taper * n))
        if n_taper > 0:
            ramp = 0.5 * (1.0 - np.cos(np.pi * (np.arange(n_taper) + 0.5) / n_taper))
            a[:n_taper] = ramp
            a[-n_taper:] = ramp[::-1]
        return a


@dataclass(frozen=True)
class FaSchedule:
    """Per-pulse band assignment: a permutation of 0..n_bands-1, so every
    band is visited exactly once per CPI."""

    band_of_pulse: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.band_of_pulse) != list(range(len(self.band_of_pulse))):
            raise ValueError(f"schedule must be a permutation, got {self.band_of_pulse}")

    @property
    def n_pulses(self) -> int:
        return len(self.band_of_pulse)


@dataclass(frozen=True)
class MotionState:
    """Stop-and-go kinematics: fixed range plus constant radial velocity
    (positive receding)."""

    range_R: float
    velocity_V: float = 0.0

    def __post_init__(self):
        if self.range_R <= 0:
            raise ValueError(f"range_R must be positive, got {self.range_R}")

    @staticmethod
    def unchecked(range_R: float, velocity_V: float = 0.0) -> "MotionState":
        """Bypass the positivity guard (limit-case tests only)."""
        m = object.__new__(MotionState)
        object.__setattr__(m, "range_R", range_R)
        object.__setattr__(m, "velocity_V", velocity_V)
        return m


@dataclass
class PulseEcho:
    """One pulse's complex baseband spectrum, tagged with its band."""

    pulse_index_n: int
    band_index: int
    spectrum: np.ndarray  # complex, bins_per_band samples
    baseband_freqs: np.ndarray  # Hz offsets within the band


def make_schedule(params: RadarParams, prng: Prng | None = None,
                  mode: str = "random") -> FaSchedule:
    """Band-hopping order for one CPI.

    sequential: identity order; random: uniform permutation from prng.
    """
    if mode == "sequential":
        perm = list(range(params.n_bands))
    elif mode == "random":
        if prng is None:
            raise ValueError("random schedule requires a prng")
        perm = [int(b) for b in prng.permutation(params.n_bands)]
    else:
        raise ValueError(f"unknown schedule mode {mode!r}")
    return FaSchedule(band_of_pulse=tuple(perm))


def simulate_pulse(target: TargetInstance, params: RadarParams, schedule: FaSchedule,
                   n: int, motion: MotionState) -> PulseEcho:
    """Frequency-domain echo of pulse n.

    spectrum(f) = A_n(f) * H(f + f_n) * exp(-j 4 pi (f + f_n)(R + n V T_r)/c)
    with f the baseband bin offsets and f_n the pulse's carrier.
    """
    if not 0 <= n < schedule.n_pulses:
        raise ValueError(f"pulse index {n} out of range for {schedule.n_pulses} pulses")
    band = schedule.band_of_pulse[n]
    f_base = params.baseband_freqs()
    f_abs = params.band_center(band) + f_base
    h = target_transfer(target, f_abs, c=params.c)
    delay_range = motion.range_R + n * motion.velocity_V * params.pri
    phase = -4.0 * np.pi * f_abs * delay_range / params.c
    spectrum = params.waveform_spectrum() * h * np.exp(1j * phase)
    return PulseEcho(pulse_index_n=n, band_index=band, spectrum=spectrum,
                     baseband_freqs=f_base)


def simulate_cpi(target: TargetInstance, params: RadarParams, schedule: FaSchedule,
                 motion: MotionState, prng: Prng | None = None,
                 noise_floor_variance: float = 0.0) -> list[PulseEcho]:
    """All pulses of one CPI, visiting every band exactly once.

    An optional white receiver-noise floor (per-bin complex variance)
    can be added; it requires a prng.
    """
    from .numerics import gaussian_complex

    echoes = []
    for n in range(schedule.n_pulses):
        echo = simulate_pulse(target, params, schedule, n, motion)
        if noise_floor_variance > 0.0:
            if prng is None:
                raise ValueError("noise floor requires a prng")
            echo.spectrum = echo.spectrum + gaussian_complex(
                prng, params.bins_per_band, noise_floor_variance)
        echoes.append(echo)
    return echoes
