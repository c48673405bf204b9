"""Forward pass: encoder stub, four-block decoder, softmax pixel classifier.

The decoder repeats one unit num_blocks times: nearest upsampling, then
convolution + ReLU, then batch normalization, in exactly that order. A
small strided-convolution encoder stands in for a large pretrained
backbone so the decoder can run end to end at desk scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DecoderConfig
from .errors import ConfigError, ContractViolation, InputShapeError
from .nn import (
    BnParams,
    KernelBank,
    Tensor,
    argmax_channels,
    batch_norm,
    conv2d,
    relu,
    softmax_channels,
    upsample_nearest,
)

# Binary segmentation mask: (height, width) bool, True = foreground.
BinaryMask = np.ndarray

ENCODER_KERNEL = 3


def encoder_stage_channels(config: DecoderConfig) -> list[int]:
    """Output channels of each encoder stage, halving back from encoder_channels."""
    n = config.num_blocks
    return [max(config.encoder_channels >> (n - 1 - i), 1) for i in range(n)]


@dataclass(frozen=True)
class BlockWeights:
    """Parameters of one decoder block: its convolution and batch norm."""

    conv: KernelBank
    bn: BnParams

    def __post_init__(self):
        if self.bn.channels != self.conv.out_channels:
            raise ContractViolation(
                f"block bn covers {self.bn.channels} channels "
                f"but conv produces {self.conv.out_channels}"
            )


@dataclass(frozen=True)
class WeightStore:
    """All learned parameters: encoder-stub convs, decoder blocks, classifier.

    Immutable after construction; one store can serve any number of
    concurrent forward passes.
    """

    encoder: tuple[KernelBank, ...]
    blocks: tuple[BlockWeights, ...]
    classifier: KernelBank

    def __post_init__(self):
        object.__setattr__(self, "encoder", tuple(self.encoder))
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def validate(self, config: DecoderConfig) -> None:
        """Check every layer against the config; raise ConfigError naming the first mismatch."""
        if len(self.encoder) != config.num_blocks:
            raise ConfigError(
                f"encoder stub has {len(self.encoder)} stages, config expects {config.num_blocks}"
            )
        prev = self.encoder[0].in_channels
        if prev not in (1, 3):
            raise ConfigError(
                f"encoder stage 0: input channels must be 1 or 3, got {prev}"
            )
        for i, kb in enumerate(self.encoder):
            if kb.in_channels != prev:
                raise ConfigError(
                    f"encoder stage {i}: expects {prev} input channels, kernel has {kb.in_channels}"
                )
            if (kb.k_h, kb.k_w) != (ENCODER_KERNEL, ENCODER_KERNEL):
                raise ConfigError(
                    f"encoder stage {i}: kernel must be "
                    f"{ENCODER_KERNEL}x{ENCODER_KERNEL}, got {kb.k_h}x{kb.k_w}"
                )
            prev = kb.out_channels
        if prev != config.encoder_channels:
            raise ConfigError(
                f"encoder stage {len(self.encoder) - 1}: produces {prev} channels, "
                f"config expects {config.encoder_channels}"
            )

        if len(self.blocks) != config.num_blocks:
            raise ConfigError(
                f"decoder has {len(self.blocks)} blocks, config expects {config.num_blocks}"
            )
        for i, bw in enumerate(self.blocks):
            if bw.conv.in_channels != prev:
                raise ConfigError(
                    f"block {i}: expects {prev} input channels, conv has {bw.conv.in_channels}"
                )
            if bw.conv.out_channels != config.block_channels[i]:
                raise ConfigError(
                    f"block {i}: config expects {config.block_channels[i]} output channels, "
                    f"conv has {bw.conv.out_channels}"
                )
            if (bw.conv.k_h, bw.conv.k_w) != (config.kernel_size, config.kernel_size):
                raise ConfigError(
                    f"block {i}: kernel must be {config.kernel_size}x{config.kernel_size}, "
                    f"got {bw.conv.k_h}x{bw.conv.k_w}"
                )
            prev = bw.conv.out_channels

        if self.classifier.in_channels != prev:
            raise ConfigError(
                f"classifier: expects {prev} input channels, kernel has "
                f"{self.classifier.in_channels}"
            )
        if self.classifier.out_channels != config.num_classes:
            raise ConfigError(
                f"classifier: must produce {config.num_classes} class channels, "
                f"kernel has {self.classifier.out_channels}"
            )
        if (self.classifier.k_h, self.classifier.k_w) != (1, 1):
            raise ConfigError(
                f"classifier: kernel must be 1x1, got "
                f"{self.classifier.k_h}x{self.classifier.k_w}"
            )


def encoder_stub(image: Tensor, w: WeightStore, c: DecoderConfig) -> Tensor:
    """Strided-conv feature extractor: each stage is a 3x3 conv + ReLU at stride upsample_factor.

    After num_blocks stages the spatial size is divided by encoder_downsample
    (stride-2 stages for the default config) and the channel count is
    encoder_channels.
    """
    if image.ndim != 3:
        raise ContractViolation(f"encoder input must be rank 3, got rank {image.ndim}")
    _, h, wd = image.shape
    d = c.encoder_downsample
    if h % d or wd % d:
        raise InputShapeError(
            f"input is {h}x{wd}; height and width must be multiples of {d}"
        )
    stride = c.upsample_factor
    x = image
    for kb in w.encoder:
        # Stride-s same-padding conv == full stride-1 conv sampled every s pixels.
        x = relu(conv2d(x, kb)[:, ::stride, ::stride])
    return np.ascontiguousarray(x)


def decoder_block(x: Tensor, bw: BlockWeights, c: DecoderConfig) -> Tensor:
    """One decoder unit applied in order: upsample, conv, ReLU, batch norm."""
    y = upsample_nearest(x, c.upsample_factor)
    y = conv2d(y, bw.conv)
    y = relu(y)
    return batch_norm(y, bw.bn)


def forward(image: Tensor, w: WeightStore, c: DecoderConfig) -> Tensor:
    """Full inference: encoder stub -> decoder blocks -> 1x1 classifier -> softmax.

    Returns a (num_classes, H, W) probability field at input resolution.
    """
    w.validate(c)
    x = encoder_stub(image, w, c)
    for bw in w.blocks:
        x = decoder_block(x, bw, c)
    logits = conv2d(x, w.classifier)
    return softmax_channels(logits)


def predict_mask(prob: Tensor, lung_class: int = 1) -> BinaryMask:
    """Foreground wherever the argmax channel equals lung_class (ties go to channel 0)."""
    if prob.ndim != 3:
        raise ContractViolation(f"probability field must be rank 3, got rank {prob.ndim}")
    if not 0 <= lung_class < prob.shape[0]:
        raise ConfigError(
            f"lung_class {lung_class} out of range for {prob.shape[0]} classes"
        )
    return argmax_channels(prob) == lung_class


def random_weights(config: DecoderConfig, seed: int = 0,
                   image_channels: int = 1) -> WeightStore:
    """Deterministic random store matching the config; useful for demos and tests.

    Values are drawn as float32 (the weight-file precision) so a save/load
    round trip reproduces them bit for bit.
    """
    if image_channels not in (1, 3):
        raise ConfigError(f"image_channels must be 1 or 3, got {image_channels}")
    rng = np.random.default_rng(seed)

    def kernel(out_ch, in_ch, k):
        fan_in = in_ch * k * k
        scale = np.float32(1.0 / np.sqrt(fan_in))
        w = rng.standard_normal((out_ch, in_ch, k, k), dtype=np.float32) * scale
        b = rng.standard_normal(out_ch, dtype=np.float32) * np.float32(0.1)
        return KernelBank(w.astype(np.float64), b.astype(np.float64))

    def bn(ch):
        gamma = 1.0 + rng.standard_normal(ch, dtype=np.float32) * np.float32(0.1)
        beta = rng.standard_normal(ch, dtype=np.float32) * np.float32(0.1)
        mean = rng.standard_normal(ch, dtype=np.float32) * np.float32(0.1)
        var = rng.uniform(0.5, 1.5, ch).astype(np.float32)
        return BnParams(gamma.astype(np.float64), beta.astype(np.float64),
                        mean.astype(np.float64), var.astype(np.float64),
                        epsilon=float(np.float32(1e-3)))

    encoder = []
    prev = image_channels
    for ch in encoder_stage_channels(config):
        encoder.append(kernel(ch, prev, ENCODER_KERNEL))
        prev = ch

    blocks = []
    for ch in config.block_channels:
        blocks.append(BlockWeights(kernel(ch, prev, config.kernel_size), bn(ch)))
        prev = ch

    classifier = kernel(config.num_classes, prev, 1)
    return WeightStore(tuple(encoder), tuple(blocks), classifier)
