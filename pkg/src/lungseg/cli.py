"""Command-line interface.

Subcommands: eval (batch metrics), post (component filtering), forward
(run the network on one image), overlay (rendered mask blends), synth
(deterministic demo dataset). Exit codes: 0 clean, 1 error, 2 finished
with warnings (some files skipped).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .dataset import IMAGE_SUFFIXES
from .decoder import forward, predict_mask
from .errors import ConfigError, ImageReadError, LungSegError
from .evaluate import evaluate_directories, write_csv, write_json
from .fixtures import generate_fixtures
from .images import (
    read_grayscale,
    read_mask,
    render_comparison,
    render_overlay,
    write_mask,
    write_rgb,
)
from .postprocess import keep_largest_k
from .weights import load_weights

LUNG_CLASS = 1


def _parse_color(text: str) -> tuple[int, int, int]:
    t = text.removeprefix("#")
    if len(t) != 6 or any(c not in "0123456789abcdefABCDEF" for c in t):
        raise ConfigError(f"color must be six hex digits (RRGGBB), got {text!r}")
    return int(t[0:2], 16), int(t[2:4], 16), int(t[4:6], 16)


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _ensure_parent(path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _cmd_eval(args) -> int:
    report = evaluate_directories(
        args.pred, args.gt, post=args.post, k=args.k,
        connectivity=args.connectivity, read_threshold=args.threshold,
        jobs=args.jobs,
    )
    write_csv(report, _ensure_parent(args.out_csv))
    write_json(report, _ensure_parent(args.out_json))
    for w in report.warnings:
        _warn(w)
    s = report.summary
    print(f"{s.pairs} pairs: macro dice {s.macro_dice:.6f}, macro iou {s.macro_iou:.6f}")
    if report.summary_post is not None:
        sp = report.summary_post
        print(f"post-processed: macro dice {sp.macro_dice:.6f}, macro iou {sp.macro_iou:.6f}")
    print(f"wrote {args.out_csv} and {args.out_json}")
    return 2 if report.warnings else 0


def _cmd_post(args) -> int:
    src, dst = Path(args.in_path), Path(args.out)
    if not src.is_dir():
        _ensure_parent(dst)
        write_mask(keep_largest_k(read_mask(src), args.k, args.connectivity), dst)
        print(f"wrote {dst}")
        return 0
    dst.mkdir(parents=True, exist_ok=True)
    warned = False
    names = sorted(p for p in src.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not names:
        raise ConfigError(f"no mask files found in {src}")
    for p in names:
        try:
            m = keep_largest_k(read_mask(p), args.k, args.connectivity)
            write_mask(m, dst / p.name)
        except (ImageReadError, OSError) as exc:
            _warn(f"skipped {p}: {exc}")
            warned = True
    print(f"wrote filtered masks to {dst}")
    return 2 if warned else 0


def _cmd_forward(args) -> int:
    config = load_config(args.config)
    store = load_weights(args.weights, config)
    gray = read_grayscale(args.image)
    x = gray.astype(np.float64)[None, :, :] / 255.0
    prob = forward(x, store, config)
    if args.out_prob:
        with open(_ensure_parent(args.out_prob), "wb") as fh:
            np.save(fh, prob)
        print(f"wrote probabilities to {args.out_prob}")
    mask = predict_mask(prob, LUNG_CLASS)
    out = _ensure_parent(args.out_mask)
    if args.no_post:
        write_mask(mask, out)
        print(f"wrote mask to {out}")
    else:
        raw = out.with_name(out.stem + ".raw" + (out.suffix or ".png"))
        write_mask(mask, raw)
        write_mask(keep_largest_k(mask, args.k, args.connectivity), out)
        print(f"wrote raw mask to {raw} and post-processed mask to {out}")
    return 0


def _cmd_overlay(args) -> int:
    gray = read_grayscale(args.image)
    pred = read_mask(args.mask)
    if args.gt:
        rgb = render_comparison(gray, read_mask(args.gt), pred, alpha=args.alpha)
    else:
        rgb = render_overlay(gray, pred, color=_parse_color(args.color), alpha=args.alpha)
    write_rgb(rgb, _ensure_parent(args.out))
    print(f"wrote {args.out}")
    return 0


def _cmd_synth(args) -> int:
    ids = generate_fixtures(args.out, seed=args.seed, count=args.count)
    print(f"wrote {len(ids)} cases under {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lungseg",
                                 description="Lung segmentation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="score a prediction directory against ground truth")
    p.add_argument("--pred", required=True, help="directory of prediction masks")
    p.add_argument("--gt", required=True, help="directory of ground-truth masks")
    p.add_argument("--post", action="store_true",
                   help="also score after keeping the k largest components")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--threshold", type=int, default=128,
                   help="mask binarization intensity (0..255)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("post", help="keep the k largest components of mask file(s)")
    p.add_argument("--in", dest="in_path", required=True, help="mask file or directory")
    p.add_argument("--out", required=True, help="output file or directory")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.set_defaults(func=_cmd_post)

    p = sub.add_parser("forward", help="run the network on one image")
    p.add_argument("--image", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out-mask", required=True)
    p.add_argument("--out-prob", help="optional .npy path for the probability field")
    p.add_argument("--no-post", action="store_true", help="skip component filtering")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("overlay", help="blend a mask (or gt-vs-pred comparison) over an image")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--gt", help="ground-truth mask; enables comparison colors")
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--color", default="ff0000", help="RRGGBB hex for single-mask mode")
    p.set_defaults(func=_cmd_overlay)

    p = sub.add_parser("synth", help="generate the deterministic demo dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=_cmd_synth)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LungSegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
