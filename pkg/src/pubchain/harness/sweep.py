"""Attack-strength sweeps over the adversary model.

A sweep fixes one manipulation strategy and a base scenario, then walks a
grid of attacker counts (crossed with reader-count and fake-reviewer-share
curves), running `replications` seeded scenarios per grid point. Each point
aggregates the resulting paper score and the unweighted benchmark average
into mean and standard deviation columns, one CSV row per point.

Row order and seeding depend only on the spec, so identical (spec, seed)
pairs produce byte-identical CSV files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import IO, Mapping, Optional, Sequence, Tuple

from ..adversary import AdversaryConfig, evaluate_scenario, run_strategy
from ..errors import ConfigError

CSV_HEADER = "strategy,n_mn,n_rs,delta,seed_count,mean_s,std_s,benchmark_mean_s"

# spec keys that sweep as lists; everything else is a fixed scalar
_SWEPT = ("n_malicious", "readers_per_review", "fake_reviewer_fraction")


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: a strategy, a grid, and the fixed scenario around it.

    `n_malicious` is the swept attacker count (strictly increasing);
    `readers_per_review` and, for strategy 2, `fake_reviewer_fraction` each
    add a curve. The remaining fields are scenario constants.
    """

    strategy: int = 1
    n_malicious: Tuple[int, ...] = (0,)
    readers_per_review: Tuple[int, ...] = (10,)
    fake_reviewer_fraction: Tuple[float, ...] = (0.1,)
    replications: int = 20
    seed: int = 0
    true_score: float = 40.0
    target_score: float = 80.0
    score_variance: float = 10.0
    perfect_review_score: float = 90.0
    support_score: float = 100.0
    attack_score: float = 20.0
    n_reviews: int = 1000
    reader_score_cap: int = 4
    min_reader_scores: int = 10

    def __post_init__(self):
        for name in _SWEPT:
            object.__setattr__(self, name, _as_tuple(getattr(self, name)))
        if self.strategy not in (1, 2):
            raise ConfigError(f"strategy must be 1 or 2, got {self.strategy!r}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.n_malicious:
            raise ConfigError("n_malicious sweep is empty")
        if any(b <= a for a, b in zip(self.n_malicious, self.n_malicious[1:])):
            raise ConfigError("n_malicious must be strictly increasing")
        if not self.readers_per_review or not self.fake_reviewer_fraction:
            raise ConfigError("curve lists must be non-empty")

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "SweepSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown sweep keys: {', '.join(sorted(unknown))}")
        return cls(**dict(mapping))

    def base_config(self) -> AdversaryConfig:
        return AdversaryConfig(
            true_score=self.true_score,
            target_score=self.target_score,
            score_variance=self.score_variance,
            perfect_review_score=self.perfect_review_score,
            support_score=self.support_score,
            attack_score=self.attack_score,
            n_reviews=self.n_reviews,
            reader_score_cap=self.reader_score_cap,
        )

    def grid(self):
        """Yield (grid_index, n_rs, delta, n_mn); delta is None for strategy 1."""
        deltas: Sequence[Optional[float]] = (
            self.fake_reviewer_fraction if self.strategy == 2 else (None,)
        )
        index = 0
        for n_rs in self.readers_per_review:
            for delta in deltas:
                for n_mn in self.n_malicious:
                    yield index, n_rs, delta, n_mn
                    index += 1


@dataclass(frozen=True)
class SweepRow:
    strategy: int
    n_mn: int
    n_rs: int
    delta: Optional[float]  # None when the strategy has no fake-reviewer share
    seed_count: int
    mean_s: float
    std_s: float
    benchmark_mean_s: float


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Run every grid point of a sweep and aggregate across replications."""
    base = spec.base_config()
    rows = []
    for index, n_rs, delta, n_mn in spec.grid():
        scores = []
        benchmarks = []
        for rep in range(spec.replications):
            cfg = replace(
                base,
                readers_per_review=n_rs,
                n_malicious=n_mn,
                fake_reviewer_fraction=delta if delta is not None else 0.0,
                seed=(spec.seed, index, rep),
            )
            outcome = evaluate_scenario(
                run_strategy(spec.strategy, cfg), spec.min_reader_scores
            )
            scores.append(outcome.weighted_score)
            benchmarks.append(outcome.benchmark_score)
        n = len(scores)
        mean = math.fsum(scores) / n
        std = math.sqrt(math.fsum((s - mean) ** 2 for s in scores) / n)
        rows.append(SweepRow(
            strategy=spec.strategy, n_mn=n_mn, n_rs=n_rs, delta=delta,
            seed_count=n, mean_s=mean, std_s=std,
            benchmark_mean_s=math.fsum(benchmarks) / n,
        ))
    return rows


def write_csv(rows: Sequence[SweepRow], fh: IO[str]) -> None:
    """Emit sweep rows with fixed 8-decimal rounding so output is byte-stable."""
    fh.write(CSV_HEADER + "\n")
    for row in rows:
        delta = "" if row.delta is None else f"{row.delta:.8f}"
        fh.write(
            f"{row.strategy},{row.n_mn},{row.n_rs},{delta},{row.seed_count},"
            f"{row.mean_s:.8f},{row.std_s:.8f},{row.benchmark_mean_s:.8f}\n"
        )
