"""Tensor container and precision control for the neural core.

Training runs in 32-bit; gradient verification can switch the whole core
to 64-bit via the ``default_dtype`` context manager, which every layer
consults when allocating parameters and activations.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np

_DTYPE = np.float32


def get_default_dtype():
    return _DTYPE


def set_default_dtype(dtype) -> None:
    global _DTYPE
    dt = np.dtype(dtype)
    if dt not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"neural core supports float32/float64, got {dt}")
    _DTYPE = dt.type


@contextmanager
def default_dtype(dtype):
    """Temporarily switch the core's working precision."""
    prev = _DTYPE
    set_default_dtype(dtype)
    try:
        yield
    finally:
        set_default_dtype(prev)


def complex_dtype():
    return np.complex64 if _DTYPE == np.float32 else np.complex128


class ShapeError(ValueError):
    """Raised on incompatible layer shapes; reports both sides."""

    def __init__(self, expected, got, what: str = "input"):
        super().__init__(f"{what} shape mismatch: expected {tuple(expected)}, got {tuple(got)}")


class Tensor:
    """Shaped real array with an accumulated-gradient buffer.

    Gradients accumulate across backward passes (shared weights sum
    their contributions) and are zeroed between optimizer steps.
    """

    __slots__ = ("data", "grad", "name")

    def __init__(self, data, name: str = ""):
        self.data = np.ascontiguousarray(data, dtype=get_default_dtype())
        self.grad = np.zeros_like(self.data)
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def zero_grad(self) -> None:
        self.grad[...] = 0.0

    def astype_(self, dtype) -> "Tensor":
        """In-place dtype change, preserving values; grad is reset."""
        self.data = np.ascontiguousarray(self.data, dtype=dtype)
        self.grad = np.zeros_like(self.data)
        return self

    def __repr__(self) -> str:
        return f"Tensor(name={self.name!r}, shape={self.shape}, dtype={self.data.dtype})"
