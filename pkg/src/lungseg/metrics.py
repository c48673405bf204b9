"""Overlap metrics (Dice, IoU) on binary masks and their aggregation.

Counts are exact integers; each metric is a single integer/integer
division, so dice == 2*iou/(1+iou) holds to rounding. Scores compare the
foreground class only — tn never enters either formula.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolation

BinaryMask = np.ndarray


@dataclass(frozen=True)
class OverlapCounts:
    """Confusion cells of one mask pair. tp+fp+fn+tn = pixel count."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __add__(self, other: "OverlapCounts") -> "OverlapCounts":
        return OverlapCounts(self.tp + other.tp, self.fp + other.fp,
                             self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def degenerate(self) -> bool:
        """True when both masks are empty (no foreground on either side)."""
        return self.tp == 0 and self.fp == 0 and self.fn == 0


def _as_mask(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise ContractViolation(f"mask must be rank 2, got rank {m.ndim}")
    return m.astype(bool, copy=False)


def overlap_counts(pred: BinaryMask, gt: BinaryMask) -> OverlapCounts:
    """Exact confusion counts; shapes must match."""
    pred, gt = _as_mask(pred), _as_mask(gt)
    if pred.shape != gt.shape:
        raise ContractViolation(
            f"mask shapes differ: prediction {pred.shape} vs ground truth {gt.shape}"
        )
    tp = int(np.count_nonzero(pred & gt))
    fp = int(np.count_nonzero(pred & ~gt))
    fn = int(np.count_nonzero(~pred & gt))
    return OverlapCounts(tp, fp, fn, pred.size - tp - fp - fn)


def dice_from_counts(c: OverlapCounts) -> float:
    """2*tp / (2*tp + fp + fn); 1.0 when both masks are empty."""
    if c.degenerate:
        return 1.0
    return 2 * c.tp / (2 * c.tp + c.fp + c.fn)


def iou_from_counts(c: OverlapCounts) -> float:
    """tp / (tp + fp + fn); 1.0 when both masks are empty."""
    if c.degenerate:
        return 1.0
    return c.tp / (c.tp + c.fp + c.fn)


def dice(pred: BinaryMask, gt: BinaryMask) -> float:
    return dice_from_counts(overlap_counts(pred, gt))


def iou(pred: BinaryMask, gt: BinaryMask) -> float:
    return iou_from_counts(overlap_counts(pred, gt))


@dataclass(frozen=True)
class PairReport:
    """Scores of one prediction/ground-truth pair."""

    image_id: str
    dice: float
    iou: float
    counts: OverlapCounts
    degenerate: bool
    post_processed: bool = False


def evaluate_pair(image_id: str, pred: BinaryMask, gt: BinaryMask,
                  post_processed: bool = False) -> PairReport:
    c = overlap_counts(pred, gt)
    return PairReport(image_id, dice_from_counts(c), iou_from_counts(c),
                      c, c.degenerate, post_processed)


@dataclass(frozen=True)
class Summary:
    """Macro (per-image mean, the headline) and micro (pixel-pooled) scores."""

    macro_dice: float
    macro_iou: float
    micro_dice: float
    micro_iou: float
    pooled: OverlapCounts
    pairs: int
    degenerate_pairs: int


def aggregate(reports: list[PairReport]) -> Summary:
    """Summarize pair reports; macro is the unweighted mean of per-image scores."""
    if not reports:
        raise ConfigError("cannot aggregate an empty report list")
    pooled = OverlapCounts(0, 0, 0, 0)
    for r in reports:
        pooled = pooled + r.counts
    return Summary(
        macro_dice=sum(r.dice for r in reports) / len(reports),
        macro_iou=sum(r.iou for r in reports) / len(reports),
        micro_dice=dice_from_counts(pooled),
        micro_iou=iou_from_counts(pooled),
        pooled=pooled,
        pairs=len(reports),
        degenerate_pairs=sum(r.degenerate for r in reports),
    )
