"""Deterministic synthetic dataset: images, ground truth, corrupted predictions.

Each case is a 96x96 grayscale "radiograph" with two bright elliptical
regions. The ground-truth mask is exactly those two ellipses; the
prediction mask is the ground truth plus a few small fragments placed well
away from them, imitating the false-positive specks a segmentation model
leaves behind. Same seed, same bytes.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .images import write_grayscale, write_mask

SIZE = 96  # divisible by 16, so fixtures feed the forward pass directly

# Fragment anchor points (row, col), all far from the ellipse zone and from
# each other, so fragments stay disjoint from the lungs and one another.
_FRAGMENT_SLOTS = (
    (8, 10), (8, 48), (8, 84),
    (88, 10), (88, 48), (88, 84),
    (48, 5), (48, 90),
)


def _ellipse(cy: float, cx: float, ry: float, rx: float) -> np.ndarray:
    yy, xx = np.mgrid[0:SIZE, 0:SIZE]
    return ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0


def _disc(cy: int, cx: int, radius: int) -> np.ndarray:
    yy, xx = np.mgrid[0:SIZE, 0:SIZE]
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2


def make_case(seed: int, index: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Build (image, gt mask, pred mask) for one case, deterministically."""
    rng = np.random.default_rng([seed, index])

    # Two separated "lungs": the left one never reaches past column 47, the
    # right one never starts before column 49.
    cy1 = rng.uniform(42.0, 54.0)
    cy2 = rng.uniform(42.0, 54.0)
    cx1 = rng.uniform(24.0, 34.0)
    cx2 = rng.uniform(62.0, 72.0)
    ry1, ry2 = rng.uniform(16.0, 24.0, 2)
    rx1, rx2 = rng.uniform(9.0, 13.0, 2)
    gt = _ellipse(cy1, cx1, ry1, rx1) | _ellipse(cy2, cx2, ry2, rx2)

    pred = gt.copy()
    n_fragments = int(rng.integers(2, 5))
    slots = rng.choice(len(_FRAGMENT_SLOTS), size=n_fragments, replace=False)
    for slot in slots:
        r, c = _FRAGMENT_SLOTS[slot]
        pred |= _disc(r, c, int(rng.integers(1, 3)))

    image = rng.normal(70.0, 12.0, (SIZE, SIZE))
    image[gt] += 90.0
    image = np.clip(image, 0.0, 255.0).astype(np.uint8)
    return image, gt, pred


def generate_fixtures(out_dir: str | Path, seed: int = 7, count: int = 20) -> list[str]:
    """Write count cases under out_dir/{images,gt,pred}; returns the case ids."""
    out = Path(out_dir)
    for sub in ("images", "gt", "pred"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    ids = []
    for i in range(count):
        image, gt, pred = make_case(seed, i)
        case = f"case_{i:03d}"
        write_grayscale(image, out / "images" / f"{case}.png")
        write_mask(gt, out / "gt" / f"{case}.png")
        write_mask(pred, out / "pred" / f"{case}.png")
        ids.append(case)
    return ids
