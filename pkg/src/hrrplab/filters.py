"""Model-based baseline: per-bin Wiener gains from signal/jamming PSDs.

The gain at bin k is P_s(k) / (P_s(k) + P_j(k)), the MMSE-optimal linear
filter when both PSDs are known.  Two PSD sources are provided: oracle
(clean-ensemble signal statistics plus the analytic jamming PSD) and
estimated (periodograms of jam-only captures and jammed training data),
quantifying how much the estimation gap costs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .hrrp import WidebandSpectrum
from .jamming import CompoundJammingConfig, compound_psd
from .radar_sim import RadarParams


@dataclass
class PsdPair:
    """Signal and jamming PSDs on the wideband grid (power/Hz)."""

    p_s: np.ndarray
    p_j: np.ndarray

    def __post_init__(self):
        if self.p_s.shape != self.p_j.shape:
            raise ValueError("p_s and p_j must share one grid")
        if np.any(self.p_s < 0) or np.any(self.p_j < 0):
            raise ValueError("PSDs must be non-negative")


@dataclass
class WienerGains:
    h: np.ndarray  # one real gain per wideband bin, each in [0, 1]


def wiener_gains(psd: PsdPair) -> WienerGains:
    """h(k) = P_s / (P_s + P_j); bins with neither signal nor jamming get
    gain 0 (dead bins carry no information, passing them is harmful)."""
    total = psd.p_s + psd.p_j
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.where(total > 0, psd.p_s / np.where(total > 0, total, 1.0), 0.0)
    return WienerGains(h=h)


def apply_gains(spec: WidebandSpectrum, gains: WienerGains) -> WidebandSpectrum:
    """Bin-wise real-gain multiply (magnitudes scaled, phases untouched)."""
    if len(spec.bins) != len(gains.h):
        raise ValueError(f"spectrum has {len(spec.bins)} bins, gains have {len(gains.h)}")
    return WidebandSpectrum(bins=spec.bins * gains.h, freq_grid=spec.freq_grid)


def _spectra_to_array(spectra) -> np.ndarray:
    if isinstance(spectra, np.ndarray) and spectra.ndim == 2:
        return spectra
    rows = [s.bins if isinstance(s, WidebandSpectrum) else np.asarray(s) for s in spectra]
    return np.asarray(rows)


def spectral_psd(spectra, bin_width: float) -> np.ndarray:
    """Ensemble-average power density of wideband spectrum samples.

    Spectrum bins carry power directly (sum |bins|^2 = CPI power), so the
    density estimate is mean |S_k|^2 / bin_width.
    """
    arr = _spectra_to_array(spectra)
    if arr.shape[0] < 1:
        raise ValueError("need at least one spectrum")
    return np.mean(np.abs(arr) ** 2, axis=0) / bin_width


def oracle_psds(target_population, jam_config: CompoundJammingConfig,
                params: RadarParams) -> PsdPair:
    """PSDs from privileged knowledge: clean-spectrum ensemble average for
    the signal, analytic compound PSD for the jamming."""
    arr = _spectra_to_array(target_population)
    if arr.shape[0] < 1:
        raise ValueError("oracle_psds needs at least one clean spectrum")
    p_s = np.mean(np.abs(arr) ** 2, axis=0) / params.bin_width
    p_j = compound_psd(jam_config, params.wideband_grid())
    return PsdPair(p_s=p_s, p_j=p_j)


def estimated_psds(jammed_training_samples, jam_only_samples,
                   bin_width: float) -> PsdPair:
    """PSDs the radar can actually measure.

    p_j comes from the periodogram of jam-only captures; the signal PSD
    is the jammed-average periodogram minus p_j, floored at zero.
    """
    jammed = _spectra_to_array(jammed_training_samples)
    jam_only = _spectra_to_array(jam_only_samples)
    if jammed.shape[0] < 8 or jam_only.shape[0] < 8:
        raise ValueError(
            f"estimated_psds needs >= 8 segments of each kind, got "
            f"{jammed.shape[0]} jammed and {jam_only.shape[0]} jam-only")
    p_j = np.mean(np.abs(jam_only) ** 2, axis=0) / bin_width
    p_x = np.mean(np.abs(jammed) ** 2, axis=0) / bin_width
    p_s = np.maximum(p_x - p_j, 0.0)
    return PsdPair(p_s=p_s, p_j=p_j)


def export_gains_csv(gains: WienerGains, freq_grid: np.ndarray, path) -> None:
    """Write (bin_index, frequency_hz, gain) rows for plotting."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["bin_index", "frequency_hz", "gain"])
        for k, (freq, g) in enumerate(zip(freq_grid, gains.h)):
            writer.writerow([k, f"{freq:.6f}", f"{g:.9g}"])
