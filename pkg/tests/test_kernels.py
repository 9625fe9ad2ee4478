"""Backend selection and compiled/fallback agreement."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pubchain import kernels
from pubchain.kernels import fallback


def _batch(rows):
    lengths = [len(r) for r in rows]
    values = np.array([x for r in rows for x in r], dtype=np.float64)
    offsets = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return values, offsets


def test_backend_is_exported():
    assert kernels.BACKEND in ("compiled", "python")
    assert callable(kernels.trimmed_means)


rows_st = st.lists(
    st.lists(st.floats(min_value=0, max_value=100, allow_nan=False), max_size=40),
    min_size=1, max_size=30,
)


@settings(max_examples=60)
@given(rows_st, st.integers(min_value=1, max_value=10))
def test_active_backend_matches_fallback(rows, min_count):
    values, offsets = _batch(rows)
    active = kernels.trimmed_means(values, offsets, 1, 10, min_count)
    reference = fallback.trimmed_means(values, offsets, 1, 10, min_count)
    assert np.array_equal(active, reference)


def test_short_rows_score_zero():
    values, offsets = _batch([[50.0, 60.0], [10.0] * 5, []])
    out = kernels.trimmed_means(values, offsets, 1, 10, 3)
    assert out.tolist() == [0.0, 10.0, 0.0]


def test_trim_counts_floor_per_side():
    row = list(map(float, range(1, 11)))  # drops 1 and 10, mean of 2..9
    values, offsets = _batch([row])
    assert kernels.trimmed_means(values, offsets, 1, 10, 1).tolist() == [5.5]
    # 30% trim drops 3 per side
    assert kernels.trimmed_means(values, offsets, 3, 10, 1).tolist() == [5.5]


def test_bad_offsets_raise():
    values = np.zeros(3)
    for bad in ([0, 5], [2, 0]):
        with pytest.raises(ValueError):
            kernels.trimmed_means(values, np.array(bad, dtype=np.int64), 1, 10, 1)
        with pytest.raises(ValueError):
            fallback.trimmed_means(values, np.array(bad, dtype=np.int64), 1, 10, 1)


def test_empty_batch():
    out = kernels.trimmed_means(np.empty(0), np.zeros(1, dtype=np.int64), 1, 10, 1)
    assert out.shape == (0,)


def test_env_override_forces_python_backend():
    code = "from pubchain import kernels; print(kernels.BACKEND)"
    proc = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True, check=True,
        env={**os.environ, "PUBCHAIN_PURE_PYTHON": "1"},
    )
    assert proc.stdout.strip() == "python"
