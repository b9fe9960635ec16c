"""Deterministic complex-vector math shared by every other module.

Spectra are carried as numpy complex arrays.  The DFT convention used
throughout the toolkit is the plain engineering one: no scaling on the
forward transform, 1/N on the inverse, so ``ifft(fft(x)) == x``.  All
random draws come from a counter-based generator keyed by
(seed, stream_id), which makes dataset generation reproducible and
trivially parallel: each unit of work owns its own substream.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _require_power_of_two(n: int) -> None:
    if not _is_power_of_two(n):
        raise ValueError(f"length must be a power of two, got {n}")


class Prng:
    """Counter-based random source with independent substreams.

    Identical (seed, stream_id) pairs give identical draw sequences;
    distinct stream_ids give statistically independent sequences.  Built
    on Philox, whose 128-bit key holds (seed, stream_id) directly, so
    substreams need no seed arithmetic or jumping.

    Instances are not thread-safe; hand each parallel unit of work its
    own ``substream``.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        self._gen = Generator(Philox(key=self.seed | (self.stream_id << 64)))

    def substream(self, stream_id: int) -> "Prng":
        """Independent generator sharing this one's seed."""
        return Prng(self.seed, stream_id)

    def uniform(self, n: int) -> np.ndarray:
        """n float64 draws in [0, 1)."""
        return self._gen.random(int(n))

    def normal(self, n: int) -> np.ndarray:
        """n standard-normal float64 draws (Box-Muller, cosine branch)."""
        z0, _ = self.normal_pairs(n)
        return z0

    def normal_pairs(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """n pairs of independent standard normals via Box-Muller.

        Uses 1 - uniform for the radial draw so log() never sees zero.
        """
        n = int(n)
        u1 = 1.0 - self._gen.random(n)
        u2 = self._gen.random(n)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        return r * np.cos(theta), r * np.sin(theta)

    def integers(self, low: int, high: int, n: int | None = None):
        """Uniform integers in [low, high)."""
        return self._gen.integers(low, high, size=n)

    def permutation(self, n: int) -> np.ndarray:
        """Uniformly random permutation of range(n) (Fisher-Yates)."""
        return self._gen.permutation(int(n))

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._gen.choice(int(n), size=int(size), replace=replace)


def fft(x: np.ndarray) -> np.ndarray:
    """Forward DFT, unscaled.  Length must be a power of two."""
    x = np.asarray(x)
    _require_power_of_two(x.shape[-1])
    return np.fft.fft(x)


def ifft(x: np.ndarray) -> np.ndarray:
    """Inverse DFT with the 1/N factor.  Length must be a power of two."""
    x = np.asarray(x)
    _require_power_of_two(x.shape[-1])
    return np.fft.ifft(x)


def gaussian_complex(prng: Prng, n: int, variance: float) -> np.ndarray:
    """i.i.d. circular complex Gaussian samples with E[|z|^2] = variance.

    The power is split equally between the real and imaginary parts.
    Zero variance returns an exactly-zero vector (without consuming a
    different number of draws, so downstream streams stay aligned).
    """
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z_re, z_im = prng.normal_pairs(n)
    scale = np.sqrt(variance / 2.0)
    return scale * (z_re + 1j * z_im)


def periodogram_psd(segments: list[np.ndarray] | np.ndarray, bin_width: float) -> np.ndarray:
    """Average periodogram of equal-length complex segments, in power/Hz.

    Normalized so that integrating the PSD over frequency recovers the
    average per-sample power of the segments:
    sum_k PSD[k] * bin_width == mean over segments of mean(|x|^2).
    """
    segs = np.asarray(segments)
    if segs.ndim == 1:
        segs = segs[None, :]
    if segs.size == 0 or segs.shape[0] < 1:
        raise ValueError("periodogram_psd needs at least one segment")
    if bin_width <= 0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    n = segs.shape[-1]
    spectra = fft(segs)
    return np.mean(np.abs(spectra) ** 2, axis=0) / (n * n * bin_width)
