"""Reverse-mode differentiable layers on numpy arrays.

Every layer pushes its forward context onto a stack and pops it on
backward, so a layer object can be applied several times per step (the
attention module shares one conv/MLP pair across two pooling branches);
backward calls must mirror forward calls in LIFO order.  Parameter
gradients accumulate across pops, which is exactly the shared-weight
chain rule.

Convolutions are lowered to matrix multiplies via strided im2col views;
activations and parameters live in the core's default dtype (float32,
or float64 under the gradient-check context).
"""

from __future__ import annotations

import numpy as np

from ..numerics import Prng
from .tensor import ShapeError, Tensor, complex_dtype, get_default_dtype


def _kaiming_uniform(prng: Prng, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    u = prng.uniform(int(np.prod(shape))).reshape(shape)
    return ((2.0 * u - 1.0) * bound).astype(get_default_dtype())


class Layer:
    def __init__(self):
        self._ctx: list = []

    def parameters(self) -> list[Tensor]:
        return []

    def _push(self, ctx) -> None:
        self._ctx.append(ctx)

    def _pop(self):
        if not self._ctx:
            raise RuntimeError(f"{type(self).__name__}.backward called without forward")
        return self._ctx.pop()

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Conv1d(Layer):
    """1-D convolution over [batch, channels, length]."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int, stride: int = 1,
                 padding: int = 0, prng: Prng | None = None, name: str = "conv"):
        super().__init__()
        self.in_ch, self.out_ch = in_ch, out_ch
        self.kernel, self.stride, self.padding = kernel, stride, padding
        if prng is None:
            prng = Prng(0)
        fan_in = in_ch * kernel
        self.w = Tensor(_kaiming_uniform(prng, (out_ch, in_ch, kernel), fan_in),
                        name=f"{name}.w")
        self.b = Tensor(np.zeros(out_ch), name=f"{name}.b")

    def parameters(self) -> list[Tensor]:
        return [self.w, self.b]

    def out_length(self, length: int) -> int:
        return (length + 2 * self.padding - self.kernel) // self.stride + 1

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 3 or x.shape[1] != self.in_ch:
            raise ShapeError(("B", self.in_ch, "L"), x.shape)
        batch, _, length = x.shape
        xp = np.pad(x, ((0, 0), (0, 0), (self.padding, self.padding))) if self.padding else x
        l_out = self.out_length(length)
        s0, s1, s2 = xp.strides
        cols = np.lib.stride_tricks.as_strided(
            xp, (batch, self.in_ch, self.kernel, l_out),
            (s0, s1, s2, s2 * self.stride), writeable=False)
        x2 = np.ascontiguousarray(cols.transpose(0, 3, 1, 2)).reshape(
            batch * l_out, self.in_ch * self.kernel)
        w2 = self.w.data.reshape(self.out_ch, -1)
        y = (x2 @ w2.T + self.b.data).reshape(batch, l_out, self.out_ch)
        self._push((x2, batch, length, l_out))
        return np.ascontiguousarray(y.transpose(0, 2, 1))

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x2, batch, length, l_out = self._pop()
        g2 = np.ascontiguousarray(grad.transpose(0, 2, 1)).reshape(batch * l_out, self.out_ch)
        self.w.grad += (g2.T @ x2).reshape(self.w.data.shape)
        self.b.grad += g2.sum(axis=0)
        gx2 = g2 @ self.w.data.reshape(self.out_ch, -1)
        gcols = gx2.reshape(batch, l_out, self.in_ch, self.kernel)
        lp = length + 2 * self.padding
        gxp = np.zeros((batch, self.in_ch, lp), dtype=grad.dtype)
        for kk in range(self.kernel):
            stop = kk + self.stride * (l_out - 1) + 1
            gxp[:, :, kk:stop:self.stride] += gcols[:, :, :, kk].transpose(0, 2, 1)
        if self.padding:
            return gxp[:, :, self.padding:self.padding + length]
        return gxp


class Linear(Layer):
    def __init__(self, in_features: int, out_features: int, prng: Prng | None = None,
                 zero_init: bool = False, name: str = "linear"):
        super().__init__()
        self.in_features, self.out_features = in_features, out_features
        if zero_init:
            w = np.zeros((out_features, in_features), dtype=get_default_dtype())
        else:
            if prng is None:
                prng = Prng(0)
            w = _kaiming_uniform(prng, (out_features, in_features), in_features)
        self.w = Tensor(w, name=f"{name}.w")
        self.b = Tensor(np.zeros(out_features), name=f"{name}.b")

    def parameters(self) -> list[Tensor]:
        return [self.w, self.b]

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(("B", self.in_features), x.shape)
        self._push(x)
        return x @ self.w.data.T + self.b.data

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x = self._pop()
        self.w.grad += grad.T @ x
        self.b.grad += grad.sum(axis=0)
        return grad @ self.w.data


class ReLU(Layer):
    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        mask = x > 0
        self._push(mask)
        return x * mask

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad * self._pop()


class Sigmoid(Layer):
    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        y = 1.0 / (1.0 + np.exp(-x))
        self._push(y)
        return y

    def backward(self, grad: np.ndarray) -> np.ndarray:
        y = self._pop()
        return grad * y * (1.0 - y)


class MaxPoolLen(Layer):
    """Max over the length axis: [B, C, L] -> [B, C]."""

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 3:
            raise ShapeError(("B", "C", "L"), x.shape)
        idx = np.argmax(x, axis=2)
        self._push((idx, x.shape))
        return np.take_along_axis(x, idx[:, :, None], axis=2)[:, :, 0]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        idx, shape = self._pop()
        gx = np.zeros(shape, dtype=grad.dtype)
        np.put_along_axis(gx, idx[:, :, None], grad[:, :, None], axis=2)
        return gx


class AvgPoolLen(Layer):
    """Mean over the length axis: [B, C, L] -> [B, C]."""

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 3:
            raise ShapeError(("B", "C", "L"), x.shape)
        self._push(x.shape)
        return x.mean(axis=2)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        shape = self._pop()
        return np.broadcast_to(grad[:, :, None] / shape[2], shape).astype(grad.dtype)


class GlobalAvgPool(AvgPoolLen):
    """Alias of AvgPoolLen for the classifier head."""


class BatchNorm1d(Layer):
    """Per-channel batch normalization over [B, C, L]."""

    def __init__(self, channels: int, momentum: float = 0.1, eps: float = 1e-5,
                 name: str = "bn"):
        super().__init__()
        self.channels = channels
        self.momentum = momentum
        self.eps = eps
        dt = get_default_dtype()
        self.gamma = Tensor(np.ones(channels, dtype=dt), name=f"{name}.gamma")
        self.beta = Tensor(np.zeros(channels, dtype=dt), name=f"{name}.beta")
        self.running_mean = np.zeros(channels, dtype=dt)
        self.running_var = np.ones(channels, dtype=dt)

    def parameters(self) -> list[Tensor]:
        return [self.gamma, self.beta]

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 3 or x.shape[1] != self.channels:
            raise ShapeError(("B", self.channels, "L"), x.shape)
        if training:
            mean = x.mean(axis=(0, 2))
            var = x.var(axis=(0, 2))
            self.running_mean = ((1 - self.momentum) * self.running_mean
                                 + self.momentum * mean).astype(x.dtype)
            self.running_var = ((1 - self.momentum) * self.running_var
                                + self.momentum * var).astype(x.dtype)
        else:
            mean, var = self.running_mean, self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[:, None]) * inv_std[:, None]
        self._push((xhat, inv_std, training))
        return self.gamma.data[:, None] * xhat + self.beta.data[:, None]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        xhat, inv_std, training = self._pop()
        self.gamma.grad += (grad * xhat).sum(axis=(0, 2))
        self.beta.grad += grad.sum(axis=(0, 2))
        gxhat = grad * self.gamma.data[:, None]
        if not training:
            return gxhat * inv_std[:, None]
        mean_g = gxhat.mean(axis=(0, 2))
        mean_gx = (gxhat * xhat).mean(axis=(0, 2))
        return inv_std[:, None] * (gxhat - mean_g[:, None] - xhat * mean_gx[:, None])


class SoftmaxCrossEntropy(Layer):
    """Fused softmax + mean cross-entropy over a batch of logits."""

    def forward(self, logits: np.ndarray, labels: np.ndarray,
                training: bool = True) -> float:
        if logits.ndim != 2 or logits.shape[0] != labels.shape[0]:
            raise ShapeError((labels.shape[0], "K"), logits.shape, what="logits")
        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        probs = exp / exp.sum(axis=1, keepdims=True)
        batch = logits.shape[0]
        nll = -(shifted[np.arange(batch), labels]
                - np.log(exp.sum(axis=1)))
        self._push((probs, labels))
        return float(nll.mean())

    def probabilities(self, logits: np.ndarray) -> np.ndarray:
        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        return exp / exp.sum(axis=1, keepdims=True)

    def backward(self, grad: float = 1.0) -> np.ndarray:
        probs, labels = self._pop()
        batch = probs.shape[0]
        g = probs.copy()
        g[np.arange(batch), labels] -= 1.0
        return (grad * g / batch).astype(probs.dtype)


class IfftLayer(Layer):
    """Fixed inverse-DFT map on stacked real/imag planes: [B, 2, N] -> [B, 2, N].

    Forward applies the 1/N inverse DFT along the last axis; backward is
    the adjoint of that real-linear map, fft(grad)/N.  Parameterless and
    exactly linear, so the network stays differentiable through the
    frequency-to-time transition.
    """

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 3 or x.shape[1] != 2:
            raise ShapeError(("B", 2, "N"), x.shape)
        self._push(x.shape[-1])
        z = (x[:, 0] + 1j * x[:, 1]).astype(complex_dtype())
        y = np.fft.ifft(z, axis=-1)
        return np.stack([y.real, y.imag], axis=1).astype(x.dtype)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        n = self._pop()
        gz = (grad[:, 0] + 1j * grad[:, 1]).astype(complex_dtype())
        gx = np.fft.fft(gz, axis=-1) / n
        return np.stack([gx.real, gx.imag], axis=1).astype(grad.dtype)


class Magnitude(Layer):
    """Per-bin magnitude of stacked real/imag planes: [B, 2, N] -> [B, N]."""

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        if x.ndim != 3 or x.shape[1] != 2:
            raise ShapeError(("B", 2, "N"), x.shape)
        m = np.sqrt(x[:, 0] ** 2 + x[:, 1] ** 2)
        self._push((x, m))
        return m

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x, m = self._pop()
        tiny = np.finfo(m.dtype).tiny
        scale = grad / np.maximum(m, tiny)
        return np.stack([x[:, 0] * scale, x[:, 1] * scale], axis=1)


class Sequential(Layer):
    def __init__(self, *layers: Layer):
        super().__init__()
        self.layers = list(layers)

    def parameters(self) -> list[Tensor]:
        return [p for layer in self.layers for p in layer.parameters()]

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad
