"""Mask and grayscale image files, plus overlay rendering."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ChannelMismatchError, ConfigError, ContractViolation, UndecodableImageError

BinaryMask = np.ndarray

# Comparison-overlay palette: missed region, spurious region, agreement.
GT_ONLY_COLOR = (0, 200, 0)
PRED_ONLY_COLOR = (220, 0, 0)
AGREE_COLOR = (235, 200, 0)


def _load_gray(path: str | Path) -> np.ndarray:
    """Decode an image file to a (H, W) uint8 array.

    Color files are accepted only when all color channels agree everywhere
    (i.e. they are grayscale stored as RGB); anything else is an error.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "1":
                arr = np.asarray(im, dtype=np.uint8) * 255
            else:
                arr = np.asarray(im)
    except UnidentifiedImageError as exc:
        raise UndecodableImageError(f"{path}: not a decodable image") from exc
    if arr.ndim == 2:
        if arr.dtype != np.uint8:
            arr = np.clip(arr, 0, 255).astype(np.uint8)
        return arr
    if arr.ndim == 3:
        color = arr[..., :3] if arr.shape[2] >= 3 else arr[..., :1]
        if color.shape[2] == 3 and not (
            np.array_equal(color[..., 0], color[..., 1])
            and np.array_equal(color[..., 0], color[..., 2])
        ):
            raise ChannelMismatchError(
                f"{path}: color channels differ; expected a grayscale image"
            )
        gray = color[..., 0]
        if gray.dtype != np.uint8:
            gray = np.clip(gray, 0, 255).astype(np.uint8)
        return gray
    raise UndecodableImageError(f"{path}: unsupported image layout {arr.shape}")


def read_grayscale(path: str | Path) -> np.ndarray:
    """Read a grayscale image as (H, W) uint8 intensities."""
    return _load_gray(path)


def read_mask(path: str | Path, threshold: int = 128) -> BinaryMask:
    """Read a stored mask: pixels with intensity >= threshold are foreground."""
    if not 0 <= threshold <= 255:
        raise ConfigError(f"mask threshold must be in 0..255, got {threshold}")
    return _load_gray(path) >= threshold


def write_mask(m: BinaryMask, path: str | Path) -> None:
    """Write a mask as an 8-bit image: foreground 255, background 0."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise ContractViolation(f"mask must be rank 2, got rank {m.ndim}")
    img = np.where(m.astype(bool), np.uint8(255), np.uint8(0))
    Image.fromarray(img, mode="L").save(path)


def write_grayscale(arr: np.ndarray, path: str | Path) -> None:
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise ContractViolation(f"image must be rank 2, got rank {arr.ndim}")
    Image.fromarray(arr.astype(np.uint8), mode="L").save(path)


def write_rgb(arr: np.ndarray, path: str | Path) -> None:
    arr = np.asarray(arr)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ContractViolation(f"RGB image must be (H, W, 3), got {arr.shape}")
    Image.fromarray(arr.astype(np.uint8), mode="RGB").save(path)


def _check_blend_args(image: np.ndarray, alpha: float) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim != 2:
        raise ContractViolation(f"base image must be rank 2, got rank {image.ndim}")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    return image.astype(np.float64)


def _blend_into(out: np.ndarray, gray: np.ndarray, region: np.ndarray,
                color: tuple[int, int, int], alpha: float) -> None:
    # Round half up so e.g. 177.5 becomes 178, independent of parity.
    mixed = np.floor((1.0 - alpha) * gray[..., None] + alpha * np.asarray(color, np.float64) + 0.5)
    out[region] = mixed[region]


def render_overlay(image: np.ndarray, m: BinaryMask, color: tuple[int, int, int] = (255, 0, 0),
                   alpha: float = 0.4) -> np.ndarray:
    """Blend a mask over a grayscale image; returns (H, W, 3) uint8.

    Background stays the plain gray value; foreground becomes
    (1-alpha)*gray + alpha*color per channel, rounded to nearest.
    """
    gray = _check_blend_args(image, alpha)
    m = np.asarray(m).astype(bool, copy=False)
    if m.shape != gray.shape:
        raise ContractViolation(f"mask shape {m.shape} differs from image shape {gray.shape}")
    out = np.repeat(gray[..., None], 3, axis=2)
    _blend_into(out, gray, m, color, alpha)
    return out.astype(np.uint8)


def render_comparison(image: np.ndarray, gt: BinaryMask, pred: BinaryMask,
                      alpha: float = 0.4) -> np.ndarray:
    """Overlay ground truth vs prediction with a fixed three-color palette:

    green where only the ground truth is set, red where only the prediction
    is set, yellow where they agree.
    """
    gray = _check_blend_args(image, alpha)
    gt = np.asarray(gt).astype(bool, copy=False)
    pred = np.asarray(pred).astype(bool, copy=False)
    if gt.shape != gray.shape or pred.shape != gray.shape:
        raise ContractViolation(
            f"shapes differ: image {gray.shape}, gt {gt.shape}, pred {pred.shape}"
        )
    out = np.repeat(gray[..., None], 3, axis=2)
    _blend_into(out, gray, gt & ~pred, GT_ONLY_COLOR, alpha)
    _blend_into(out, gray, pred & ~gt, PRED_ONLY_COLOR, alpha)
    _blend_into(out, gray, gt & pred, AGREE_COLOR, alpha)
    return out.astype(np.uint8)
