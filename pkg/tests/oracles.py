"""Independent reference implementations used to check the library.

Deliberately written the slow, obvious way — nested loops and flood fill —
with no code shared with the package.
"""
from __future__ import annotations

import numpy as np


def conv2d_loops(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Same-padded stride-1 convolution by direct quadruple summation."""
    c_in, h, w = x.shape
    c_out, _, kh, kw = weights.shape
    ph, pw = kh // 2, kw // 2
    out = np.zeros((c_out, h, w))
    for o in range(c_out):
        for i in range(h):
            for j in range(w):
                acc = bias[o]
                for c in range(c_in):
                    for di in range(kh):
                        for dj in range(kw):
                            ii, jj = i + di - ph, j + dj - pw
                            if 0 <= ii < h and 0 <= jj < w:
                                acc += weights[o, c, di, dj] * x[c, ii, jj]
                out[o, i, j] = acc
    return out


def flood_fill_label(mask: np.ndarray, connectivity: int) -> np.ndarray:
    """Label components by flood fill, seeding in raster-scan order.

    Seeding order makes the label numbering (1..N by first encounter)
    directly comparable to the library's output.
    """
    h, w = mask.shape
    stride = w + 2  # one-pixel false border removes all bounds checks
    grid = np.zeros((h + 2, stride), dtype=bool)
    grid[1:-1, 1:-1] = mask
    flat = grid.ravel().tolist()
    labels = [0] * ((h + 2) * stride)
    if connectivity == 4:
        offs = (-stride, -1, 1, stride)
    else:
        offs = (-stride - 1, -stride, -stride + 1, -1, 1, stride - 1, stride, stride + 1)
    nxt = 0
    for r in range(1, h + 1):
        base = r * stride
        for c in range(1, w + 1):
            i = base + c
            if flat[i] and labels[i] == 0:
                nxt += 1
                labels[i] = nxt
                frontier = [i]
                while frontier:
                    j = frontier.pop()
                    for o in offs:
                        nj = j + o
                        if flat[nj] and labels[nj] == 0:
                            labels[nj] = nxt
                            frontier.append(nj)
    return np.array(labels, dtype=np.int32).reshape(h + 2, stride)[1:-1, 1:-1]


def metrics_pixel_loop(pred: np.ndarray, gt: np.ndarray):
    """Count confusion cells pixel by pixel, then apply the score formulas.

    Returns (dice, iou, (tp, fp, fn, tn)). Both-empty pairs score 1.0.
    """
    tp = fp = fn = tn = 0
    for p_row, g_row in zip(pred.tolist(), gt.tolist()):
        for p, g in zip(p_row, g_row):
            if p and g:
                tp += 1
            elif p:
                fp += 1
            elif g:
                fn += 1
            else:
                tn += 1
    if tp + fp + fn == 0:
        return 1.0, 1.0, (tp, fp, fn, tn)
    return 2 * tp / (2 * tp + fp + fn), tp / (tp + fp + fn), (tp, fp, fn, tn)
