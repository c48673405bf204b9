"""Directory pairing: match prediction and ground-truth files by stem."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

IMAGE_SUFFIXES = {".png", ".bmp", ".gif", ".tif", ".tiff", ".jpg", ".jpeg", ".pgm"}


@dataclass(frozen=True)
class DatasetPairing:
    """Sorted (image id, prediction path, ground-truth path) triples.

    warnings lists stems present on only one side.
    """

    pairs: tuple[tuple[str, Path, Path], ...]
    warnings: tuple[str, ...]


def _list_stems(d: Path) -> dict[str, Path]:
    if not d.is_dir():
        raise ConfigError(f"not a directory: {d}")
    out: dict[str, Path] = {}
    for p in sorted(d.iterdir()):
        if not p.is_file() or p.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        if p.stem in out:
            raise ConfigError(f"duplicate stem {p.stem!r} in {d}: {out[p.stem].name} and {p.name}")
        out[p.stem] = p
    return out


def pair_dataset(pred_dir: str | Path, gt_dir: str | Path) -> DatasetPairing:
    """Pair files with identical stems; unmatched stems become warnings.

    An empty intersection is an error (the two directories do not belong to
    the same dataset); the message samples stems from both sides.
    """
    pred = _list_stems(Path(pred_dir))
    gt = _list_stems(Path(gt_dir))
    common = sorted(pred.keys() & gt.keys())
    if not common:
        sample = lambda d: ", ".join(sorted(d)[:3]) or "<none>"
        raise ConfigError(
            "no common stems between directories; "
            f"predictions have [{sample(pred)}], ground truth has [{sample(gt)}]"
        )
    warnings = [f"prediction without ground truth: {s}" for s in sorted(pred.keys() - gt.keys())]
    warnings += [f"ground truth without prediction: {s}" for s in sorted(gt.keys() - pred.keys())]
    return DatasetPairing(
        pairs=tuple((s, pred[s], gt[s]) for s in common),
        warnings=tuple(warnings),
    )
