"""Numpy implementation of the scoring kernels.

Rows are grouped by length so each group sorts as one contiguous 2-d array;
ragged batches from the attack scenarios only contain a handful of distinct
lengths, so this stays vectorized in practice.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def trimmed_means(
    values: np.ndarray,
    offsets: np.ndarray,
    trim_num: int,
    trim_den: int,
    min_count: int,
) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    n_rows = offsets.shape[0] - 1
    out = np.zeros(n_rows, dtype=np.float64)
    if n_rows == 0:
        return out
    starts = offsets[:-1]
    counts = np.diff(offsets)
    if np.any(counts < 0) or offsets[-1] > values.shape[0]:
        raise ValueError("offsets do not describe rows inside values")
    for count in np.unique(counts):
        c = int(count)
        rows = np.nonzero(counts == count)[0]
        if c == 0 or c < min_count:
            continue
        k = (c * trim_num) // trim_den
        block = values[starts[rows, None] + np.arange(c)]
        block.sort(axis=1)
        kept = block[:, k : c - k]
        # cumsum accumulates strictly left to right, matching the compiled
        # kernel bit for bit (plain sum() would pair up and differ by ulps)
        out[rows] = np.cumsum(kept, axis=1)[:, -1] / kept.shape[1]
    return out
