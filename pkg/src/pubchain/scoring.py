"""Robust aggregation of reader and review scores.

A review's effective score is a trimmed mean of its reader scores: sort,
drop the highest and lowest `trim_fraction` of entries (by count, floored),
average the rest. A review with fewer reader scores than the eligibility
threshold has effective score 0 and therefore no influence. A paper's score
is the weighted mean of its review scores, each review weighted by its own
effective score, so heavily endorsed reviews steer the paper score and
ignored reviews do not.

All functions are pure and accept int, float, or `fractions.Fraction`
values. Exact inputs give exact outputs (the ledger path relies on this for
conservation); float inputs take the ordinary float path. The Monte-Carlo
sweeps use the batched float64 entry points at the bottom, which delegate to
a compiled kernel when one is available (see `pubchain.kernels`).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .errors import EmptyInput
from .units import Numeric, as_fraction

Number = Union[int, float, Fraction]

DEFAULT_TRIM = Fraction(1, 10)


def _trim_counts(n: int, trim: Fraction) -> int:
    """Entries to drop from each end of a sorted n-vector."""
    return (n * trim.numerator) // trim.denominator


def _validate_trim(trim_fraction: Numeric) -> Fraction:
    trim = as_fraction(trim_fraction)
    if not Fraction(0) <= trim < Fraction(1, 2):
        raise ValueError(f"trim_fraction {trim_fraction!r} outside [0, 0.5)")
    return trim


def _mean(values: Sequence[Number]) -> Number:
    """Mean that stays exact for exact inputs."""
    if any(isinstance(v, float) for v in values):
        return float(sum(values)) / len(values)
    return Fraction(sum(values), len(values))


def trimmed_mean(scores: Sequence[Number], trim_fraction: Numeric = DEFAULT_TRIM) -> Number:
    """Mean of `scores` after dropping the top and bottom `trim_fraction`.

    The drop count per side is floor(len(scores) * trim_fraction), so small
    vectors may lose nothing. Raises EmptyInput on an empty sequence and
    ValueError for trim_fraction outside [0, 0.5).
    """
    trim = _validate_trim(trim_fraction)
    values = list(scores)
    if not values:
        raise EmptyInput("trimmed_mean of an empty score vector")
    k = _trim_counts(len(values), trim)
    values.sort()
    kept = values[k : len(values) - k]
    return _mean(kept)


def effective_review_score(
    reader_scores: Sequence[Number],
    min_reader_scores: int,
    trim_fraction: Numeric = DEFAULT_TRIM,
) -> Number:
    """Effective score W of one review given its reader scores.

    Reviews with fewer than `min_reader_scores` reader scores are ineligible
    and score 0; otherwise the trimmed mean of the reader scores.
    """
    if min_reader_scores < 1:
        raise ValueError("min_reader_scores must be >= 1")
    if len(reader_scores) < min_reader_scores:
        return Fraction(0)
    return trimmed_mean(reader_scores, trim_fraction)


def normalize_weights(weights: Sequence[Number]) -> list:
    """Scale nonnegative weights to sum to 1; all-zero input stays all zero."""
    total = sum(weights)
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    if total == 0:
        return [w * 0 for w in weights]
    if isinstance(total, float):
        return [w / total for w in weights]
    total = Fraction(total)
    return [Fraction(w) / total for w in weights]


def paper_score(reviews: Iterable[Tuple[Number, Number]]) -> Number:
    """Weighted paper score from (review score Z, effective score W) pairs.

    Computed as sum(W*Z)/sum(W), which equals the dot product of the
    normalized weights with the review scores but avoids forming small
    intermediate quotients. A paper whose reviews carry no weight (or with
    no reviews at all) scores 0.
    """
    pairs = list(reviews)
    num: Number = Fraction(0)
    den: Number = Fraction(0)
    for z, w in pairs:
        if w < 0:
            raise ValueError("effective scores must be nonnegative")
        num += w * z
        den += w
    if den == 0:
        return Fraction(0)
    if isinstance(num, float) or isinstance(den, float):
        return float(num) / float(den)
    return Fraction(num) / Fraction(den)


# ---------------------------------------------------------------------------
# batched float64 path used by the adversary sweeps


def effective_scores_batch(
    values: np.ndarray,
    offsets: np.ndarray,
    min_reader_scores: int,
    trim_fraction: Numeric = DEFAULT_TRIM,
) -> np.ndarray:
    """Effective scores for many reviews at once.

    `values` holds every reader score flattened; review i owns
    values[offsets[i]:offsets[i+1]]. Returns one float64 W per review.
    """
    trim = _validate_trim(trim_fraction)
    if min_reader_scores < 1:
        raise ValueError("min_reader_scores must be >= 1")
    values = np.ascontiguousarray(values, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if offsets.ndim != 1 or offsets.size == 0:
        raise ValueError("offsets must be a 1-d array with at least one entry")
    return kernels.trimmed_means(
        values, offsets, trim.numerator, trim.denominator, min_reader_scores
    )


def paper_score_arrays(z_scores: np.ndarray, weights: np.ndarray) -> float:
    """Float64 counterpart of paper_score for parallel arrays."""
    total = float(np.sum(weights))
    if total == 0.0:
        return 0.0
    return float(np.dot(weights, z_scores)) / total
