"""Attack scenarios against the review-score aggregation.

A scenario is one paper with a population of reviews, each carrying a review
score Z and a list of reader scores. Honest behavior is noisy but unbiased:
an honest reviewer draws Z around the paper's true merit, and an honest
reader scores a review higher the closer its Z sits to that merit (a review
that nails the merit is scored around `perfect_review_score`).

Two coordinated manipulation strategies are modeled, parameterized by the
number of malicious nodes:

* Strategy 1: every malicious node submits a review claiming `target_score`.
  Malicious reviews replace honest ones; the population size stays fixed.
* Strategy 2: a fraction `fake_reviewer_fraction` of the malicious nodes
  submit reviews claiming `target_score`; the rest act as fake readers. Half
  of the fake readers (rounded down) pump the fake reviews with
  `support_score`; the other half hit honest reviews with `attack_score`.
  Each fake reader stays within the per-paper score cap and never scores the
  same review twice, so a supporter lands at most min(cap, #fake reviews)
  scores and an attacker at most min(cap, #honest reviews); scores spread
  round-robin over the targets.

Generation is deterministic: all randomness flows from `AdversaryConfig.seed`
through one substream per review, so any scenario can be replayed exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from . import scoring
from .errors import ConfigError
from .units import Numeric

Seed = Union[int, tuple]


def _clamp(value: float) -> float:
    return min(100.0, max(0.0, float(value)))


@dataclass(frozen=True)
class AdversaryConfig:
    """Parameters of one attack scenario.

    `readers_per_review` doubles as the eligibility threshold: every review
    receives that many honest reader scores, and reviews with fewer scores
    than it count for nothing. Scores live on [0, 100].
    """

    true_score: float = 40.0  # the paper's merit; honest reviewers' mean
    target_score: float = 80.0  # what the attacker wants the paper to read
    score_variance: float = 10.0  # variance of honest review and reader noise
    perfect_review_score: float = 90.0  # reader mean for a review matching the merit
    support_score: float = 100.0  # fake readers' score for fake reviews
    attack_score: float = 20.0  # fake readers' score for honest reviews
    n_reviews: int = 1000  # total review population
    readers_per_review: int = 10  # honest reader scores per review
    reader_score_cap: int = 4  # max scores one reader may give on one paper
    n_malicious: int = 0  # malicious node count
    fake_reviewer_fraction: float = 0.1  # strategy 2: reviewer share of malicious nodes
    seed: Seed = 0

    def __post_init__(self):
        for name in (
            "true_score",
            "target_score",
            "perfect_review_score",
            "support_score",
            "attack_score",
        ):
            value = getattr(self, name)
            if not (0 <= value <= 100):
                raise ConfigError(f"{name}={value!r} outside [0, 100]")
        if self.score_variance < 0:
            raise ConfigError("score_variance must be >= 0")
        if self.n_reviews < 1:
            raise ConfigError("n_reviews must be >= 1")
        if self.readers_per_review < 1:
            raise ConfigError("readers_per_review must be >= 1")
        if self.reader_score_cap < 1:
            raise ConfigError("reader_score_cap must be >= 1")
        if self.n_malicious < 0:
            raise ConfigError("n_malicious must be >= 0")
        if not (0 <= self.fake_reviewer_fraction <= 1):
            raise ConfigError("fake_reviewer_fraction must be in [0, 1]")

    @property
    def score_std(self) -> float:
        return math.sqrt(self.score_variance)


@dataclass
class Scenario:
    """One generated review population for a single paper."""

    z_scores: np.ndarray  # (n_reviews,) float64 review scores
    malicious: np.ndarray  # (n_reviews,) bool, True for attacker-authored reviews
    score_values: np.ndarray  # all reader scores, flattened float64
    score_offsets: np.ndarray  # (n_reviews + 1,) int64 row boundaries

    @property
    def n_reviews(self) -> int:
        return len(self.z_scores)

    def reader_scores(self, review: int) -> np.ndarray:
        return self.score_values[self.score_offsets[review] : self.score_offsets[review + 1]]

    def to_csv(self, fh: IO[str]) -> None:
        """One row per review: id, source, Z, then that review's reader scores."""
        writer = csv.writer(fh)
        writer.writerow(["review_id", "source", "z"])
        for i in range(self.n_reviews):
            source = "malicious" if self.malicious[i] else "honest"
            row = [i, source, repr(float(self.z_scores[i]))]
            row.extend(repr(float(v)) for v in self.reader_scores(i))
            writer.writerow(row)


@dataclass(frozen=True)
class ScenarioOutcome:
    weighted_score: float  # trimmed-weighted paper score
    benchmark_score: float  # plain average of review scores
    effective_scores: np.ndarray  # W per review


def honest_review_score(cfg: AdversaryConfig, rng: np.random.Generator) -> float:
    """One honest review score: merit plus Gaussian noise, clamped to [0, 100]."""
    return _clamp(rng.normal(cfg.true_score, cfg.score_std))


def honest_reader_score(
    z_score: float, cfg: AdversaryConfig, rng: np.random.Generator
) -> float:
    """One honest reader score for a review that claimed `z_score`.

    Centered at perfect_review_score minus the review's distance from the
    merit, so accurate reviews earn high reader scores.
    """
    mean = cfg.perfect_review_score - abs(z_score - cfg.true_score)
    return _clamp(rng.normal(mean, cfg.score_std))


def _honest_population(cfg: AdversaryConfig, n_fake_reviews: int) -> Scenario:
    """Reviews 0..n_fake-1 claim target_score, the rest are honest; every
    review gets readers_per_review honest reader scores."""
    n = cfg.n_reviews
    n_rs = cfg.readers_per_review
    sd = cfg.score_std
    z_scores = np.empty(n, dtype=np.float64)
    values = np.empty(n * n_rs, dtype=np.float64)
    children = np.random.SeedSequence(cfg.seed).spawn(n)
    for i, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        if i < n_fake_reviews:
            z = _clamp(cfg.target_score)
        else:
            z = _clamp(rng.normal(cfg.true_score, sd))
        z_scores[i] = z
        mean = cfg.perfect_review_score - abs(z - cfg.true_score)
        row = rng.normal(mean, sd, size=n_rs)
        np.clip(row, 0.0, 100.0, out=row)
        values[i * n_rs : (i + 1) * n_rs] = row
    offsets = np.arange(n + 1, dtype=np.int64) * n_rs
    malicious = np.zeros(n, dtype=bool)
    malicious[:n_fake_reviews] = True
    return Scenario(z_scores, malicious, values, offsets)


def run_strategy1(cfg: AdversaryConfig) -> Scenario:
    """All malicious nodes submit reviews claiming target_score."""
    if cfg.n_malicious > cfg.n_reviews:
        raise ConfigError(
            f"n_malicious={cfg.n_malicious} exceeds the review population {cfg.n_reviews}"
        )
    return _honest_population(cfg, cfg.n_malicious)


def _spread(total: int, first: int, width: int, extra: np.ndarray) -> None:
    """Distribute `total` scores round-robin over extra[first:first+width]."""
    if total == 0 or width == 0:
        return
    whole, remainder = divmod(total, width)
    extra[first : first + width] += whole
    extra[first : first + remainder] += 1


def run_strategy2(cfg: AdversaryConfig) -> Scenario:
    """Malicious nodes split into fake reviewers and fake readers."""
    n_fake_reviews = round(cfg.n_malicious * cfg.fake_reviewer_fraction)
    if n_fake_reviews > cfg.n_reviews:
        raise ConfigError(
            f"{n_fake_reviews} fake reviewers exceed the review population {cfg.n_reviews}"
        )
    scenario = _honest_population(cfg, n_fake_reviews)
    n = cfg.n_reviews
    n_honest = n - n_fake_reviews
    n_fake_readers = cfg.n_malicious - n_fake_reviews
    supporters = n_fake_readers // 2
    attackers = n_fake_readers - supporters

    extra = np.zeros(n, dtype=np.int64)
    per_supporter = min(cfg.reader_score_cap, n_fake_reviews)
    per_attacker = min(cfg.reader_score_cap, n_honest)
    _spread(supporters * per_supporter, 0, n_fake_reviews, extra)
    _spread(attackers * per_attacker, n_fake_reviews, n_honest, extra)

    old_offsets = scenario.score_offsets
    counts = np.diff(old_offsets) + extra
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    values = np.empty(offsets[-1], dtype=np.float64)
    for i in range(n):
        honest_row = scenario.score_values[old_offsets[i] : old_offsets[i + 1]]
        start = offsets[i]
        values[start : start + len(honest_row)] = honest_row
        fake = cfg.support_score if i < n_fake_reviews else cfg.attack_score
        values[start + len(honest_row) : offsets[i + 1]] = fake
    return Scenario(scenario.z_scores, scenario.malicious, values, offsets)


def run_strategy(strategy: int, cfg: AdversaryConfig) -> Scenario:
    if strategy == 1:
        return run_strategy1(cfg)
    if strategy == 2:
        return run_strategy2(cfg)
    raise ConfigError(f"unknown strategy {strategy!r}")


def evaluate_scenario(
    scenario: Scenario,
    min_reader_scores: int,
    trim_fraction: Numeric = scoring.DEFAULT_TRIM,
) -> ScenarioOutcome:
    """Score a scenario both ways: trimmed-weighted and naive benchmark."""
    effective = scoring.effective_scores_batch(
        scenario.score_values, scenario.score_offsets, min_reader_scores, trim_fraction
    )
    weighted = scoring.paper_score_arrays(scenario.z_scores, effective)
    benchmark = float(np.mean(scenario.z_scores))
    return ScenarioOutcome(weighted, benchmark, effective)
