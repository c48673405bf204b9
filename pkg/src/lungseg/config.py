"""Decoder architecture hyperparameters and their flat text file format."""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

_LIST_KEYS = {"block_channels"}


@dataclass(frozen=True)
class DecoderConfig:
    """Hyperparameters of the encoder stub + four-block decoder.

    The defaults give a toy model whose decoder exactly undoes the encoder
    stride: upsample_factor ** num_blocks must equal encoder_downsample so
    the prediction comes back at input resolution.
    """

    num_blocks: int = 4
    block_channels: tuple[int, ...] = (256, 128, 64, 32)
    kernel_size: int = 3
    upsample_factor: int = 2
    num_classes: int = 2
    encoder_channels: int = 512
    encoder_downsample: int = 16

    def __post_init__(self):
        object.__setattr__(self, "block_channels", tuple(int(c) for c in self.block_channels))
        for name in ("num_blocks", "kernel_size", "upsample_factor",
                     "num_classes", "encoder_channels", "encoder_downsample"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if any(c < 1 for c in self.block_channels):
            raise ConfigError(f"block_channels must be positive, got {self.block_channels}")
        if len(self.block_channels) != self.num_blocks:
            raise ConfigError(
                f"block_channels has {len(self.block_channels)} entries "
                f"but num_blocks is {self.num_blocks}"
            )
        if self.kernel_size % 2 == 0:
            raise ConfigError(f"kernel_size must be odd, got {self.kernel_size}")
        if self.upsample_factor ** self.num_blocks != self.encoder_downsample:
            raise ConfigError(
                f"upsample_factor**num_blocks = {self.upsample_factor ** self.num_blocks} "
                f"must equal encoder_downsample = {self.encoder_downsample}"
            )
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")


def save_config(config: DecoderConfig, path) -> None:
    """Write a config as `key = value` lines (lists comma-separated)."""
    lines = []
    for f in fields(config):
        v = getattr(config, f.name)
        if f.name in _LIST_KEYS:
            v = ",".join(str(c) for c in v)
        lines.append(f"{f.name} = {v}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_config(path) -> DecoderConfig:
    """Parse a flat key-value config file; unknown keys are an error.

    Blank lines and lines starting with '#' are ignored. Keys not present
    keep their defaults.
    """
    known = {f.name for f in fields(DecoderConfig)}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate config key {key!r}")
        try:
            if key in _LIST_KEYS:
                values[key] = tuple(int(p.strip()) for p in val.split(",") if p.strip())
            else:
                values[key] = int(val)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: cannot parse value {val!r} for {key!r}") from None
    return DecoderConfig(**values)
