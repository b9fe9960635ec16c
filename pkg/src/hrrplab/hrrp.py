"""Motion compensation, spectrum stitching, and profile formation.

A CPI's per-pulse spectra are compensated for inter-pulse motion,
optionally deramped to re-center the target inside the unambiguous
window, then concatenated by band index into one wideband spectrum whose
inverse DFT is the high-resolution range profile.  Range bin k maps to
k * c/(2 B_total); bin 0 corresponds to the deramp reference range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import ifft
from .radar_sim import FaSchedule, PulseEcho, RadarParams


class StitchError(ValueError):
    pass


@dataclass
class WidebandSpectrum:
    """Stitched CPI spectrum: bins ordered by ascending absolute frequency."""

    bins: np.ndarray  # complex, n_bands * bins_per_band samples
    freq_grid: np.ndarray  # absolute Hz, same length


@dataclass
class Hrrp:
    range_profile: np.ndarray  # magnitudes
    range_axis: np.ndarray  # meters, bin k at k * c/(2B)
    complex_profile: np.ndarray


def motion_compensate(echo: PulseEcho, v_est: float, params: RadarParams) -> PulseEcho:
    """Remove the inter-pulse velocity phase using an estimated velocity.

    Multiplies every bin by exp(+j 4 pi (f + f_n) n v T_r / c); with the
    true velocity this cancels the stop-and-go motion term exactly,
    leaving the stationary-target phase law.
    """
    f_abs = params.band_center(echo.band_index) + echo.baseband_freqs
    phase = 4.0 * np.pi * f_abs * echo.pulse_index_n * v_est * params.pri / params.c
    return PulseEcho(
        pulse_index_n=echo.pulse_index_n,
        band_index=echo.band_index,
        spectrum=echo.spectrum * np.exp(1j * phase),
        baseband_freqs=echo.baseband_freqs,
    )


def range_deramp(echo: PulseEcho, r_ref: float, params: RadarParams) -> PulseEcho:
    """Shift the profile origin to a reference range.

    Multiplies by exp(+j 4 pi (f + f_n) r_ref / c) so a scatterer at
    absolute range R lands at relative range R - r_ref in the profile.
    Keeps km-scale absolute ranges from aliasing the 192 m window.
    """
    f_abs = params.band_center(echo.band_index) + echo.baseband_freqs
    phase = 4.0 * np.pi * f_abs * r_ref / params.c
    return PulseEcho(
        pulse_index_n=echo.pulse_index_n,
        band_index=echo.band_index,
        spectrum=echo.spectrum * np.exp(1j * phase),
        baseband_freqs=echo.baseband_freqs,
    )


def stitch(echoes: list[PulseEcho], schedule: FaSchedule,
           params: RadarParams) -> WidebandSpectrum:
    """Arrange per-pulse spectra by band index into the wideband spectrum.

    Band b's samples land at absolute bin positions
    b*bins_per_band .. (b+1)*bins_per_band - 1 regardless of transmit
    order; every band must appear exactly once.
    """
    seen = [e.band_index for e in echoes]
    expected = sorted(schedule.band_of_pulse)
    if sorted(seen) != expected:
        missing = set(expected) - set(seen)
        dupes = {b for b in seen if seen.count(b) > 1}
        raise StitchError(f"bands must cover the CPI exactly once "
                          f"(missing={sorted(missing)}, duplicated={sorted(dupes)})")
    bins = np.zeros(params.n_bins, dtype=np.complex128)
    for echo in echoes:
        if len(echo.spectrum) != params.bins_per_band:
            raise StitchError(f"pulse on band {echo.band_index} has "
                              f"{len(echo.spectrum)} bins, expected {params.bins_per_band}")
        lo = echo.band_index * params.bins_per_band
        bins[lo:lo + params.bins_per_band] = echo.spectrum
    return WidebandSpectrum(bins=bins, freq_grid=params.wideband_grid())


def form_hrrp(spec: WidebandSpectrum, c: float | None = None) -> Hrrp:
    """Inverse-transform the wideband spectrum into a range profile.

    Uses the 1/N inverse DFT; the range axis has bin spacing
    c / (2 B_total) with B_total inferred from the frequency grid.
    """
    n = len(spec.bins)
    if c is None:
        from .scene import SPEED_OF_LIGHT
        c = SPEED_OF_LIGHT
    df = float(spec.freq_grid[1] - spec.freq_grid[0])
    resolution = c / (2.0 * n * df)
    profile_c = ifft(spec.bins)
    return Hrrp(
        range_profile=np.abs(profile_c),
        range_axis=np.arange(n) * resolution,
        complex_profile=profile_c,
    )


def normalize_profile(h: Hrrp, mode: str = "max") -> Hrrp:
    """Rescale a profile: peak magnitude 1 ("max") or unit energy ("l2")."""
    if mode == "max":
        denom = float(np.max(h.range_profile))
    elif mode == "l2":
        denom = float(np.sqrt(np.sum(h.range_profile ** 2)))
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    if denom == 0.0:
        raise ValueError("cannot normalize an all-zero profile")
    return Hrrp(
        range_profile=h.range_profile / denom,
        range_axis=h.range_axis,
        complex_profile=h.complex_profile / denom,
    )
