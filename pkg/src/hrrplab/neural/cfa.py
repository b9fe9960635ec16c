"""Complex frequency attention: learned per-band gains on the spectrum.

The 1024-bin complex spectrum is viewed as 16 channels of 64 bins each,
one channel per agile sub-band, so the learned weights read directly as
band gains.  Channel summaries from parallel max and average pooling of
the magnitude spectrum pass through one shared conv block pair and one
shared bottleneck MLP; the summed branch outputs go through a sigmoid
and scale both real and imaginary planes of their channel, which keeps
per-bin phase intact.

The final MLP layer starts at zero so an untrained module applies the
neutral 0.5 gain everywhere instead of a random destructive filter.
"""

from __future__ import annotations

import numpy as np

from ..numerics import Prng
from .layers import AvgPoolLen, Conv1d, Linear, MaxPoolLen, ReLU, Sigmoid
from .tensor import ShapeError, Tensor


class CfaModule:
    """Channel attention over the agile sub-band axis.

    channels * length must equal the wideband bin count; with the default
    16 x 64 layout each channel is one 50 MHz sub-band.
    """

    def __init__(self, channels: int = 16, length: int = 64, reduction: int = 4,
                 conv_kernel: int = 3, conv_hidden: int = 8,
                 prng: Prng | None = None):
        if prng is None:
            prng = Prng(0)
        if channels % reduction != 0:
            raise ValueError(f"reduction {reduction} must divide channels {channels}")
        self.channels = channels
        self.length = length
        pad = (conv_kernel - 1) // 2
        self.conv1 = Conv1d(1, conv_hidden, conv_kernel, padding=pad,
                            prng=prng.substream(1), name="cfa.conv1")
        self.conv2 = Conv1d(conv_hidden, 1, conv_kernel, padding=pad,
                            prng=prng.substream(2), name="cfa.conv2")
        self.fc1 = Linear(channels, channels // reduction,
                          prng=prng.substream(3), name="cfa.fc1")
        self.fc2 = Linear(channels // reduction, channels, zero_init=True,
                          name="cfa.fc2")
        self.relu_c1 = ReLU()
        self.relu_c2 = ReLU()
        self.relu_fc = ReLU()
        self.sigmoid = Sigmoid()
        self.max_pool = MaxPoolLen()
        self.avg_pool = AvgPoolLen()

    def parameters(self) -> list[Tensor]:
        return (self.conv1.parameters() + self.conv2.parameters()
                + self.fc1.parameters() + self.fc2.parameters())

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def _branch_forward(self, pooled: np.ndarray, training: bool) -> np.ndarray:
        t = self.conv1.forward(pooled[:, None, :], training)
        t = self.relu_c1.forward(t, training)
        t = self.conv2.forward(t, training)
        t = self.relu_c2.forward(t, training)[:, 0, :]
        u = self.fc1.forward(t, training)
        u = self.relu_fc.forward(u, training)
        return self.fc2.forward(u, training)

    def _branch_backward(self, grad: np.ndarray) -> np.ndarray:
        g = self.fc2.backward(grad)
        g = self.relu_fc.backward(g)
        g = self.fc1.backward(g)
        g = self.relu_c2.backward(g[:, None, :])
        g = self.conv2.backward(g)
        g = self.relu_c1.backward(g)
        return self.conv1.backward(g)[:, 0, :]

    def forward(self, x: np.ndarray, training: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """(weights [B, C], weighted spectrum [B, 2, N]) from [B, 2, N]."""
        n_bins = self.channels * self.length
        if x.ndim != 3 or x.shape[1] != 2 or x.shape[2] != n_bins:
            raise ShapeError(("B", 2, n_bins), x.shape)
        batch = x.shape[0]
        mag = np.sqrt(x[:, 0] ** 2 + x[:, 1] ** 2)
        mc = mag.reshape(batch, self.channels, self.length)
        p_max = self.max_pool.forward(mc, training)
        p_avg = self.avg_pool.forward(mc, training)
        # Shared layers: max branch first, avg branch second (backward pops
        # the branch contexts in reverse).
        u_max = self._branch_forward(p_max, training)
        u_avg = self._branch_forward(p_avg, training)
        w = self.sigmoid.forward(u_max + u_avg, training)
        xc = x.reshape(batch, 2, self.channels, self.length)
        xw = xc * w[:, None, :, None]
        self._ctx = (x, mag, w)
        return w, xw.reshape(batch, 2, n_bins)

    def backward(self, grad_weighted: np.ndarray,
                 grad_weights: np.ndarray | None = None) -> np.ndarray:
        """Gradient wrt the input spectrum given gradients on the outputs."""
        x, mag, w = self._ctx
        batch = x.shape[0]
        n_bins = self.channels * self.length
        gw4 = grad_weighted.reshape(batch, 2, self.channels, self.length)
        xc = x.reshape(batch, 2, self.channels, self.length)
        # Through the multiplicative application: both factors get a share.
        g_x = (gw4 * w[:, None, :, None]).reshape(batch, 2, n_bins)
        g_w = (gw4 * xc).sum(axis=(1, 3))
        if grad_weights is not None:
            g_w = g_w + grad_weights
        g_s = self.sigmoid.backward(g_w)
        g_avg = self._branch_backward(g_s)
        g_max = self._branch_backward(g_s)
        g_mc = self.avg_pool.backward(g_avg) + self.max_pool.backward(g_max)
        g_mag = g_mc.reshape(batch, n_bins)
        tiny = np.finfo(mag.dtype).tiny
        scale = g_mag / np.maximum(mag, tiny)
        g_x = g_x + np.stack([x[:, 0] * scale, x[:, 1] * scale], axis=1)
        return g_x


def cfa_forward(spectrum: np.ndarray, module: CfaModule) -> tuple[np.ndarray, np.ndarray]:
    """Single-spectrum convenience wrapper: [2, N] -> ([C], [2, N])."""
    spectrum = np.asarray(spectrum)
    if spectrum.ndim != 2:
        raise ShapeError((2, module.channels * module.length), spectrum.shape)
    w, xw = module.forward(spectrum[None], training=False)
    return w[0], xw[0]
