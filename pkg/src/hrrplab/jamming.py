"""Compound multi-jammer noise model.

Each jammer is a stationary Gaussian noise source with a rectangular
power spectral density; the received power of jammer i follows the
one-way range equation

    sigma_i^2 = P_JT G_J G_R lambda^2 / (4 pi R_J)^2

and the composite PSD is the sum of the individual rectangles, a
staircase of varying heights and widths.  Noise realizations are
synthesized directly in the frequency domain (independent bins), which
realizes the rectangular PSDs exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .numerics import Prng, gaussian_complex, ifft
from .radar_sim import FaSchedule, RadarParams


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class JammerSpec:
    """One noise jammer: transmit-side parameters plus its band."""

    p_jt_w: float
    g_j: float
    g_r: float
    lambda_m: float
    r_j_m: float
    f_center_hz: float
    bandwidth_hz: float

    def __post_init__(self):
        if self.r_j_m <= 0:
            raise ValueError(f"jammer range must be positive, got {self.r_j_m}")
        if self.bandwidth_hz <= 0:
            raise ValueError(f"jammer bandwidth must be positive, got {self.bandwidth_hz}")
        for name in ("p_jt_w", "g_j", "g_r", "lambda_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class CompoundJammingConfig:
    """A set of jammers plus the global power scale used for SJR
    calibration (relative jammer powers are never touched)."""

    jammers: tuple[JammerSpec, ...]
    power_scale: float = 1.0
    sjr_override_db: float | None = None
    jammed_band_indices: frozenset[int] | None = None


def jammer_power(spec: JammerSpec) -> float:
    """Received average power of one jammer (one-way range equation)."""
    return (spec.p_jt_w * spec.g_j * spec.g_r * spec.lambda_m ** 2
            / (4.0 * np.pi * spec.r_j_m) ** 2)


def compound_psd(config: CompoundJammingConfig, freqs: np.ndarray) -> np.ndarray:
    """Composite jamming PSD sampled at the given frequencies (power/Hz).

    Each jammer contributes sigma^2/B inside |f - f_center| <= B/2 and
    nothing outside; overlapping jammers add.
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    psd = np.zeros(freqs.shape)
    for spec in config.jammers:
        inside = np.abs(freqs - spec.f_center_hz) <= spec.bandwidth_hz / 2.0
        psd[inside] += jammer_power(spec) / spec.bandwidth_hz
    return config.power_scale * psd


def _band_mask(config: CompoundJammingConfig, band: int) -> bool:
    if config.jammed_band_indices is None:
        return True
    return band in config.jammed_band_indices


def synthesize_jamming(config: CompoundJammingConfig, params: RadarParams,
                       schedule: FaSchedule, prng: Prng) -> list[np.ndarray]:
    """Per-pulse jamming noise, one bins_per_band complex vector per pulse.

    Bin b of pulse n receives an independent circular complex Gaussian
    draw of variance S_J(F_nb) * bin_width, where F_nb is the bin's
    absolute frequency; bins outside every jammer band stay exactly zero.
    """
    out = []
    for n in range(schedule.n_pulses):
        band = schedule.band_of_pulse[n]
        f_abs = params.band_freqs(band)
        var = compound_psd(config, f_abs) * params.bin_width
        if not _band_mask(config, band):
            var = np.zeros_like(var)
        z = gaussian_complex(prng, params.bins_per_band, 1.0)
        out.append(np.sqrt(var) * z)
    return out


def wideband_jam_capture(config: CompoundJammingConfig, params: RadarParams,
                         n_segments: int, prng: Prng) -> np.ndarray:
    """Jam-only listening: full-band noise snapshots, one per PRI.

    The compound jamming occupies its bands continuously, so a receiver
    sampling the whole radar band sees every jammed bin each PRI.
    Returns an (n_segments, n_bins) complex array on the wideband grid.
    """
    grid = params.wideband_grid()
    var = compound_psd(config, grid) * params.bin_width
    if config.jammed_band_indices is not None:
        bands = np.arange(params.n_bins) // params.bins_per_band
        allowed = np.isin(bands, sorted(config.jammed_band_indices))
        var = np.where(allowed, var, 0.0)
    segs = np.empty((n_segments, params.n_bins), dtype=np.complex128)
    for i in range(n_segments):
        segs[i] = np.sqrt(var) * gaussian_complex(prng, params.n_bins, 1.0)
    return segs


def to_time_domain(spectrum_bins: np.ndarray) -> np.ndarray:
    """Time-domain realization of spectrum samples, power-consistent.

    Spectrum bins in this toolkit carry power directly
    (sum |bins|^2 = received power over the CPI); scaling by N before the
    inverse DFT makes the time signal's mean power equal the PSD
    integral, so periodogram estimates recover the analytic PSD.
    """
    bins = np.asarray(spectrum_bins)
    return bins.shape[-1] * ifft(bins)


def in_band_jam_power(config: CompoundJammingConfig, params: RadarParams) -> float:
    """Expected jamming power received across one CPI (in-radar-band only)."""
    grid = params.wideband_grid()
    var = compound_psd(config, grid) * params.bin_width
    if config.jammed_band_indices is not None:
        bands = np.arange(params.n_bins) // params.bins_per_band
        var = np.where(np.isin(bands, sorted(config.jammed_band_indices)), var, 0.0)
    return float(np.sum(var))


def jammed_bands(config: CompoundJammingConfig, params: RadarParams) -> set[int]:
    """Band indices whose bins receive any jamming power."""
    grid = params.wideband_grid()
    var = compound_psd(config, grid) * params.bin_width
    bands = np.arange(params.n_bins) // params.bins_per_band
    hit = set(int(b) for b in np.unique(bands[var > 0]))
    if config.jammed_band_indices is not None:
        hit &= set(config.jammed_band_indices)
    return hit


def calibrate_sjr(signal_power: float, config: CompoundJammingConfig,
                  target_sjr_db: float, params: RadarParams) -> CompoundJammingConfig:
    """Rescale all jammer powers by one common factor so that
    10 log10(signal_power / jam_power) equals the target SJR.

    SJR is defined over the full CPI: total received target-echo power
    divided by total received in-radar-band jamming power.  Relative
    jammer powers are preserved; the result is idempotent.
    """
    if signal_power <= 0:
        raise CalibrationError(f"signal power must be positive, got {signal_power}")
    jam = in_band_jam_power(config, params)
    if jam <= 0:
        raise CalibrationError("config has zero in-band jamming power")
    wanted = signal_power / (10.0 ** (target_sjr_db / 10.0))
    return replace(config, power_scale=config.power_scale * wanted / jam)


def default_scenario(params: RadarParams, lambda_m: float | None = None) -> CompoundJammingConfig:
    """Three noise jammers covering 8 of the 16 sub-bands in three power
    tiers (1 : 4 : 16 via ranges 20 / 10 / 5 km).

    Tier 1 spans bands 2-4, tier 2 bands 7-8, tier 3 bands 11-13, so the
    composite PSD is a staircase of three heights and the remaining
    8 bands stay clean.
    """
    lam = lambda_m if lambda_m is not None else params.c / (params.f_start + params.total_bandwidth / 2.0)

    def band_span_center(lo: int, hi: int) -> tuple[float, float]:
        f_lo = params.f_start + lo * params.band_bw
        f_hi = params.f_start + (hi + 1) * params.band_bw
        return (f_lo + f_hi) / 2.0, f_hi - f_lo

    c24, b24 = band_span_center(2, 4)
    c78, b78 = band_span_center(7, 8)
    c1113, b1113 = band_span_center(11, 13)
    common = dict(p_jt_w=1e3, g_j=10.0, g_r=1.0, lambda_m=lam)
    return CompoundJammingConfig(jammers=(
        JammerSpec(**common, r_j_m=20e3, f_center_hz=c24, bandwidth_hz=b24),
        JammerSpec(**common, r_j_m=10e3, f_center_hz=c78, bandwidth_hz=b78),
        JammerSpec(**common, r_j_m=5e3, f_center_hz=c1113, bandwidth_hz=b1113),
    ))


def scenario_to_json(config: CompoundJammingConfig) -> str:
    doc: dict = {
        "jammers": [
            {
                "p_jt_w": j.p_jt_w,
                "g_j": j.g_j,
                "g_r": j.g_r,
                "lambda_m": j.lambda_m,
                "r_j_m": j.r_j_m,
                "f_center_hz": j.f_center_hz,
                "bandwidth_hz": j.bandwidth_hz,
            }
            for j in config.jammers
        ]
    }
    if config.power_scale != 1.0:
        doc["power_scale"] = config.power_scale
    if config.sjr_override_db is not None:
        doc["sjr_override_db"] = config.sjr_override_db
    if config.jammed_band_indices is not None:
        doc["jammed_band_indices"] = sorted(config.jammed_band_indices)
    return json.dumps(doc, indent=2)


def scenario_from_json(text: str | dict) -> CompoundJammingConfig:
    doc = json.loads(text) if isinstance(text, str) else text
    known = {"jammers", "power_scale", "sjr_override_db", "jammed_band_indices"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown jammer-scenario keys: {sorted(unknown)}")
    jammers = []
    for j in doc["jammers"]:
        jknown = {"p_jt_w", "g_j", "g_r", "lambda_m", "r_j_m", "f_center_hz", "bandwidth_hz"}
        junknown = set(j) - jknown
        if junknown:
            raise ValueError(f"unknown jammer keys: {sorted(junknown)}")
        jammers.append(JammerSpec(**{k: float(v) for k, v in j.items()}))
    bands = doc.get("jammed_band_indices")
    return CompoundJammingConfig(
        jammers=tuple(jammers),
        power_scale=float(doc.get("power_scale", 1.0)),
        sjr_override_db=(None if doc.get("sjr_override_db") is None
                         else float(doc["sjr_override_db"])),
        jammed_band_indices=(None if bands is None else frozenset(int(b) for b in bands)),
    )
