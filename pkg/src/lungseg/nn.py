"""Deterministic tensor primitives for the decoder forward pass.

Activations are plain numpy arrays of shape (channels, height, width),
float64, row-major. Every operation is a pure function: inputs are never
mutated and identical inputs give bit-identical outputs, so tensors and
parameter banks can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolation, NumericError

# Activation tensor: (channels, height, width) float64.
Tensor = np.ndarray

# Per-pixel integer labels: (height, width) int32.
LabelImage = np.ndarray


def tensor(data) -> Tensor:
    """Coerce array-like data to a valid activation tensor.

    Accepts anything numpy can turn into a rank-3 array; validates shape
    positivity and finiteness.
    """
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 3:
        raise ContractViolation(f"tensor must be rank 3 (channels, height, width), got rank {arr.ndim}")
    if min(arr.shape) < 1:
        raise ContractViolation(f"tensor dimensions must be positive, got {arr.shape}")
    return _finite(arr, "tensor")


def _check_tensor(x: Tensor, op: str) -> None:
    if not isinstance(x, np.ndarray) or x.ndim != 3:
        raise ContractViolation(f"{op}: expected a (channels, height, width) array")


def _finite(arr: np.ndarray, op: str) -> np.ndarray:
    if not np.isfinite(arr).all():
        raise NumericError(f"{op} produced non-finite values")
    return arr


@dataclass(frozen=True)
class KernelBank:
    """Convolution weights (out_channels, in_channels, k_h, k_w) plus per-output bias.

    Kernel dims must be odd so zero same-padding is symmetric.
    """

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        b = np.ascontiguousarray(self.bias, dtype=np.float64)
        if w.ndim != 4:
            raise ContractViolation(f"kernel weights must be rank 4, got rank {w.ndim}")
        if min(w.shape) < 1:
            raise ContractViolation(f"kernel dimensions must be positive, got {w.shape}")
        if b.shape != (w.shape[0],):
            raise ContractViolation(
                f"bias length {b.shape} does not match {w.shape[0]} output channels"
            )
        if w.shape[2] % 2 == 0 or w.shape[3] % 2 == 0:
            raise ConfigError(f"kernel dims must be odd for same-padding, got {w.shape[2]}x{w.shape[3]}")
        _finite(w, "KernelBank.weights")
        _finite(b, "KernelBank.bias")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def k_h(self) -> int:
        return self.weights.shape[2]

    @property
    def k_w(self) -> int:
        return self.weights.shape[3]


@dataclass(frozen=True)
class BnParams:
    """Inference-mode batch-norm parameters, one entry per channel."""

    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    epsilon: float = 1e-3

    def __post_init__(self):
        vecs = {}
        for name in ("gamma", "beta", "running_mean", "running_var"):
            v = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if v.ndim != 1:
                raise ContractViolation(f"BnParams.{name} must be a vector, got rank {v.ndim}")
            _finite(v, f"BnParams.{name}")
            vecs[name] = v
        lengths = {v.shape[0] for v in vecs.values()}
        if len(lengths) != 1:
            raise ContractViolation(f"BnParams vectors must share one length, got {sorted(lengths)}")
        if (vecs["running_var"] < 0).any():
            raise ConfigError("BnParams.running_var entries must be >= 0")
        if not self.epsilon > 0:
            raise ConfigError(f"BnParams.epsilon must be > 0, got {self.epsilon}")
        for name, v in vecs.items():
            object.__setattr__(self, name, v)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def channels(self) -> int:
        return self.gamma.shape[0]


def conv2d(x: Tensor, k: KernelBank) -> Tensor:
    """2-D convolution, stride 1, zero same-padding.

    out[o, i, j] = bias[o] + sum over in-channels and the kernel window,
    with out-of-bounds input treated as zero. Output keeps the input
    height/width and has k.out_channels channels.
    """
    _check_tensor(x, "conv2d")
    if x.shape[0] != k.in_channels:
        raise ContractViolation(
            f"conv2d: input has {x.shape[0]} channels but kernel expects {k.in_channels}"
        )
    _, h, w = x.shape
    ph, pw = k.k_h // 2, k.k_w // 2
    padded = np.zeros((k.in_channels, h + 2 * ph, w + 2 * pw), dtype=np.float64)
    padded[:, ph:ph + h, pw:pw + w] = x

    out = np.empty((k.out_channels, h, w), dtype=np.float64)
    out[:] = k.bias[:, None, None]
    # Fixed accumulation order over kernel offsets keeps results bit-reproducible.
    for di in range(k.k_h):
        for dj in range(k.k_w):
            window = padded[:, di:di + h, dj:dj + w]
            out += np.tensordot(k.weights[:, :, di, dj], window, axes=1)
    return _finite(out, "conv2d")


def relu(x: Tensor) -> Tensor:
    """Elementwise max(value, 0)."""
    _check_tensor(x, "relu")
    return np.maximum(x, 0.0)


def batch_norm(x: Tensor, p: BnParams) -> Tensor:
    """Per-channel inference normalization: gamma*(v - mean)/sqrt(var + eps) + beta."""
    _check_tensor(x, "batch_norm")
    if p.channels != x.shape[0]:
        raise ContractViolation(
            f"batch_norm: params cover {p.channels} channels but input has {x.shape[0]}"
        )
    scale = p.gamma[:, None, None]
    denom = np.sqrt(p.running_var + p.epsilon)[:, None, None]
    out = scale * (x - p.running_mean[:, None, None]) / denom + p.beta[:, None, None]
    return _finite(out, "batch_norm")


def upsample_nearest(x: Tensor, factor: int) -> Tensor:
    """Replicate each pixel into a factor x factor block; channels unchanged."""
    _check_tensor(x, "upsample_nearest")
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ConfigError(f"upsample factor must be a positive integer, got {factor!r}")
    if factor == 1:
        return x.copy()
    return np.repeat(np.repeat(x, factor, axis=1), factor, axis=2)


def softmax_channels(x: Tensor) -> Tensor:
    """Per-pixel exp-normalization across channels, max-subtracted for stability."""
    _check_tensor(x, "softmax_channels")
    if x.shape[0] < 2:
        raise ConfigError(f"softmax needs at least 2 channels, got {x.shape[0]}")
    shifted = x - x.max(axis=0, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=0, keepdims=True)
    return _finite(out, "softmax_channels")


def argmax_channels(x: Tensor) -> LabelImage:
    """Per-pixel index of the maximal channel; ties go to the lowest index."""
    _check_tensor(x, "argmax_channels")
    return np.argmax(x, axis=0).astype(np.int32)
