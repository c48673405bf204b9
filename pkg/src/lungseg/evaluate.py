"""Batch evaluation of prediction directories against ground truth.

Produces per-image rows plus macro/micro summaries, written as CSV (fixed
6-decimal formatting, deterministic byte-for-byte) and JSON (full float
precision; the timestamp lives only in the metadata block).
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .dataset import pair_dataset
from .errors import ConfigError, ContractViolation, ImageReadError
from .images import read_mask
from .metrics import PairReport, Summary, aggregate, evaluate_pair
from .postprocess import keep_largest_k

CSV_HEADER = ("image_id", "dice", "iou", "dice_post", "iou_post", "degenerate")


@dataclass(frozen=True)
class EvalRow:
    image_id: str
    dice: float
    iou: float
    dice_post: float | None
    iou_post: float | None
    degenerate: bool


@dataclass
class EvalReport:
    rows: list[EvalRow]
    summary: Summary
    summary_post: Summary | None
    metadata: dict
    warnings: list[str]


def _score_pair(image_id: str, pred_path: Path, gt_path: Path, post: bool,
                k: int, connectivity: int, read_threshold: int):
    """Worker for one pair; returns (row, raw report, post report | None)."""
    pred = read_mask(pred_path, read_threshold)
    gt = read_mask(gt_path, read_threshold)
    raw = evaluate_pair(image_id, pred, gt)
    if not post:
        return EvalRow(image_id, raw.dice, raw.iou, None, None, raw.degenerate), raw, None
    filtered = evaluate_pair(image_id, keep_largest_k(pred, k, connectivity), gt,
                             post_processed=True)
    row = EvalRow(image_id, raw.dice, raw.iou, filtered.dice, filtered.iou, raw.degenerate)
    return row, raw, filtered


def evaluate_directories(pred_dir: str | Path, gt_dir: str | Path, *,
                         post: bool = False, k: int = 2, connectivity: int = 8,
                         read_threshold: int = 128, jobs: int = 1) -> EvalReport:
    """Score every stem-matched pair; unreadable pairs are skipped with a warning.

    Row order is by image id regardless of jobs, so reports are identical
    under any degree of parallelism.
    """
    if jobs < 1:
        raise ConfigError(f"jobs must be a positive integer, got {jobs}")
    pairing = pair_dataset(pred_dir, gt_dir)
    warnings = list(pairing.warnings)

    def work(pair):
        image_id, pred_path, gt_path = pair
        try:
            return _score_pair(image_id, pred_path, gt_path, post, k,
                               connectivity, read_threshold)
        except (ImageReadError, ContractViolation, FileNotFoundError, OSError) as exc:
            return f"skipped {image_id}: {exc}"

    if jobs == 1:
        results = [work(p) for p in pairing.pairs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, pairing.pairs))

    rows: list[EvalRow] = []
    raw_reports: list[PairReport] = []
    post_reports: list[PairReport] = []
    for res in results:  # pairing order == id order
        if isinstance(res, str):
            warnings.append(res)
            continue
        row, raw, filtered = res
        rows.append(row)
        raw_reports.append(raw)
        if filtered is not None:
            post_reports.append(filtered)
    if not rows:
        raise ConfigError("no pair could be evaluated; see warnings: " + "; ".join(warnings))

    metadata = {
        "pred_dir": str(pred_dir),
        "gt_dir": str(gt_dir),
        "post": post,
        "k": k,
        "connectivity": connectivity,
        "read_threshold": read_threshold,
        "pairs_requested": len(pairing.pairs),
        "pairs_scored": len(rows),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return EvalReport(
        rows=rows,
        summary=aggregate(raw_reports),
        summary_post=aggregate(post_reports) if post_reports else None,
        metadata=metadata,
        warnings=warnings,
    )


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def write_csv(report: EvalReport, path: str | Path) -> None:
    """One row per image plus macro and micro summary rows, 6-decimal fixed."""
    s, sp = report.summary, report.summary_post
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.rows:
            w.writerow((r.image_id, _fmt(r.dice), _fmt(r.iou),
                        _fmt(r.dice_post), _fmt(r.iou_post),
                        "true" if r.degenerate else "false"))
        w.writerow(("macro", _fmt(s.macro_dice), _fmt(s.macro_iou),
                    _fmt(sp.macro_dice if sp else None), _fmt(sp.macro_iou if sp else None), ""))
        w.writerow(("micro", _fmt(s.micro_dice), _fmt(s.micro_iou),
                    _fmt(sp.micro_dice if sp else None), _fmt(sp.micro_iou if sp else None), ""))


def _summary_dict(s: Summary) -> dict:
    return {
        "macro_dice": s.macro_dice,
        "macro_iou": s.macro_iou,
        "micro_dice": s.micro_dice,
        "micro_iou": s.micro_iou,
        "pooled_counts": {"tp": s.pooled.tp, "fp": s.pooled.fp,
                          "fn": s.pooled.fn, "tn": s.pooled.tn},
        "pairs": s.pairs,
        "degenerate_pairs": s.degenerate_pairs,
    }


def write_json(report: EvalReport, path: str | Path) -> None:
    """Full-precision JSON report; only metadata carries the timestamp."""
    doc = {
        "metadata": report.metadata,
        "warnings": report.warnings,
        "summary": _summary_dict(report.summary),
        "summary_post": _summary_dict(report.summary_post) if report.summary_post else None,
        "rows": [
            {
                "image_id": r.image_id,
                "dice": r.dice,
                "iou": r.iou,
                "dice_post": r.dice_post,
                "iou_post": r.iou_post,
                "degenerate": r.degenerate,
            }
            for r in report.rows
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
