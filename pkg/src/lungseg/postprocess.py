"""Connected-component labeling and largest-k filtering for binary masks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolation
from .nn import LabelImage, Tensor

BinaryMask = np.ndarray


@dataclass(frozen=True)
class ComponentStats:
    """Summary of one connected component.

    bbox is (left, top, width, height); centroid is (x, y) with x along
    columns and y along rows, the mean pixel position.
    """

    label: int
    area: int
    bbox: tuple[int, int, int, int]
    centroid: tuple[float, float]


def _as_mask(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise ContractViolation(f"mask must be rank 2, got rank {m.ndim}")
    return m.astype(bool, copy=False)


def _row_runs(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start (inclusive) and end (exclusive) columns of each foreground run."""
    d = np.diff(row.astype(np.int8), prepend=0, append=0)
    return np.flatnonzero(d == 1), np.flatnonzero(d == -1)


def label_components(m: BinaryMask, connectivity: int = 8) -> tuple[LabelImage, list[ComponentStats]]:
    """Partition foreground into maximal connected regions.

    Background is 0; components get labels 1..N in raster-scan order of
    first encounter. Two-pass union-find over row runs.
    """
    if connectivity not in (4, 8):
        raise ConfigError(f"connectivity must be 4 or 8, got {connectivity}")
    m = _as_mask(m)
    h, w = m.shape
    eight = connectivity == 8

    parent: list[int] = []

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # First pass: create a run per maximal horizontal segment, union runs
    # that touch the previous row.
    runs: list[tuple[int, int, int]] = []  # (row, start, end) indexed by run id
    prev: list[tuple[int, int, int]] = []  # (start, end, run id) of previous row
    for r in range(h):
        starts, ends = _row_runs(m[r])
        cur: list[tuple[int, int, int]] = []
        j = 0
        for s, e in zip(starts.tolist(), ends.tolist()):
            rid = len(parent)
            parent.append(rid)
            runs.append((r, s, e))
            # Skip previous-row runs that end before any possible contact.
            while j < len(prev) and (prev[j][1] < s if eight else prev[j][1] <= s):
                j += 1
            k = j
            while k < len(prev) and (prev[k][0] <= e if eight else prev[k][0] < e):
                ra, rb = find(prev[k][2]), find(rid)
                if ra != rb:
                    if ra > rb:
                        ra, rb = rb, ra
                    parent[rb] = ra
                k += 1
            cur.append((s, e, rid))
        prev = cur

    # Second pass: number roots by first raster appearance, paint labels,
    # and accumulate the statistics.
    labels = np.zeros((h, w), dtype=np.int32)
    order: dict[int, int] = {}
    area: list[int] = []
    left: list[int] = []
    right: list[int] = []
    top: list[int] = []
    bottom: list[int] = []
    sum_x: list[int] = []
    sum_y: list[int] = []
    for rid, (r, s, e) in enumerate(runs):
        root = find(rid)
        lab = order.get(root)
        if lab is None:
            lab = len(order) + 1
            order[root] = lab
            area.append(0)
            left.append(s)
            right.append(e - 1)
            top.append(r)
            bottom.append(r)
            sum_x.append(0)
            sum_y.append(0)
        labels[r, s:e] = lab
        i = lab - 1
        n = e - s
        area[i] += n
        left[i] = min(left[i], s)
        right[i] = max(right[i], e - 1)
        bottom[i] = max(bottom[i], r)
        sum_x[i] += n * (s + e - 1) // 2  # sum of columns s..e-1, always exact
        sum_y[i] += r * n

    stats = [
        ComponentStats(
            label=i + 1,
            area=area[i],
            bbox=(left[i], top[i], right[i] - left[i] + 1, bottom[i] - top[i] + 1),
            centroid=(sum_x[i] / area[i], sum_y[i] / area[i]),
        )
        for i in range(len(area))
    ]
    return labels, stats


def keep_largest_k(m: BinaryMask, k: int = 2, connectivity: int = 8) -> BinaryMask:
    """Keep the k largest-area components; ties go to the earlier raster label.

    With fewer than k components the mask is returned unchanged (as a copy).
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    m = _as_mask(m)
    labels, stats = label_components(m, connectivity)
    if len(stats) <= k:
        return m.copy()
    kept = sorted(stats, key=lambda s: (-s.area, s.label))[:k]
    out = np.zeros(m.shape, dtype=bool)
    for s in kept:
        out |= labels == s.label
    return out


def post_process(prob: Tensor, lung_class: int = 1, threshold: float = 0.5,
                 k: int = 2, connectivity: int = 8) -> BinaryMask:
    """Binarize one class channel of a probability field, then keep_largest_k.

    A pixel is foreground iff prob[lung_class] >= threshold. For two classes
    and threshold 0.5 this matches argmax prediction except at exact ties.
    """
    prob = np.asarray(prob)
    if prob.ndim != 3:
        raise ContractViolation(f"probability field must be rank 3, got rank {prob.ndim}")
    if not 0 <= lung_class < prob.shape[0]:
        raise ConfigError(f"lung_class {lung_class} out of range for {prob.shape[0]} classes")
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie strictly between 0 and 1, got {threshold}")
    return keep_largest_k(prob[lung_class] >= threshold, k, connectivity)
