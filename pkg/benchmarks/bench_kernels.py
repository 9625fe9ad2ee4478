#!/usr/bin/env python3
"""Time the compiled trimmed-mean kernel against the numpy fallback.

The batched trimmed mean is the hot loop of every sweep: one row per review,
a reader-score list per row. The two backends produce bit-identical output
but favor different shapes: the compiled kernel walks the ragged rows in
place and wins when rows are short and lengths vary (ledger-style reader
lists), while the fallback groups rows by length and rides numpy's
vectorized sort, which wins on wide uniform rows (600-reader sweeps).

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from pubchain.kernels import fallback

try:
    from pubchain.kernels import _core
except ImportError:
    _core = None

# (label, rows, width) for uniform widths; width None draws ragged lengths
CASES = [
    ("1000 x 10", 1000, 10),
    ("1000 x 100", 1000, 100),
    ("1000 x 600", 1000, 600),
    ("20000 x 40", 20000, 40),
    ("ragged 0..30", 2000, None),
]


def make_batch(rng, rows, width):
    if width is None:
        lengths = rng.integers(0, 31, size=rows)
    else:
        lengths = np.full(rows, width, dtype=np.int64)
    values = rng.uniform(0.0, 100.0, size=int(lengths.sum()))
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return values, offsets


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of repeat count")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'case':>14}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for label, rows, width in CASES:
        values, offsets = make_batch(rng, rows, width)
        py = best_of(args.repeats, fallback.trimmed_means, values, offsets, 1, 10, 1)
        if _core is None:
            print(f"{label:>14}  {py * 1e3:>8.2f}ms  {'n/a':>10}  {'n/a':>8}")
            continue
        cc = best_of(args.repeats, _core.trimmed_means, values, offsets, 1, 10, 1)
        out_py = fallback.trimmed_means(values, offsets, 1, 10, 1)
        out_cc = _core.trimmed_means(values, offsets, 1, 10, 1)
        if not np.array_equal(out_py, out_cc):
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:>14}  {py * 1e3:>8.2f}ms  {cc * 1e3:>8.2f}ms  {py / cc:>7.1f}x")


if __name__ == "__main__":
    main()
