"""Built-in invariant suite, runnable from the CLI without test dependencies.

Each check exercises one claim the package stakes its correctness on:
conservation under random economies in both phases, the pool recurrence
recomputed independently of the settlement code, bit-identical replay from
the transaction log, blob-store round-trips, trimmed-mean agreement with a
brute-force oracle, and compiled-kernel parity with the pure-Python fallback.
"""

from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from random import Random

import numpy as np

from .. import kernels
from ..adversary import AdversaryConfig, evaluate_scenario, run_strategy
from ..errors import LedgerError, PubChainError
from ..kernels import fallback
from ..ledger import Ledger
from ..scoring import trimmed_mean
from ..store import BlobStore, ContentAddress
from ..tokenomics import EconomicParams, Phase
from ..units import floor_mul


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name: str, fn) -> CheckResult:
    try:
        detail = fn() or "ok"
        return CheckResult(name, True, detail)
    except (AssertionError, PubChainError) as exc:
        return CheckResult(name, False, str(exc) or exc.__class__.__name__)


def _random_economy(seed: int, phase: Phase, blocks: int = 30) -> Ledger:
    """Drive a ledger with random-but-valid activity, auditing every seal.

    Validation rejections are expected along the way (duplicate reviews,
    flooding, conflicts); they must leave the state untouched, which the
    per-seal audit cross-checks.
    """
    rng = Random(seed)
    params = EconomicParams(phase=phase, reward_window=4, min_reader_scores=3)
    ledger = Ledger(params)
    people = [ledger.register_account(f"user{i}@test") for i in range(12)]
    if phase is Phase.PUBLIC:
        # no signup grant in this phase; seed posting budgets via early mining
        for person in people:
            ledger.seal_block(person.address)
    for height in range(blocks):
        for _ in range(rng.randrange(6)):
            actor = rng.choice(people).address
            action = rng.randrange(4)
            try:
                if action == 0:
                    ledger.post_paper(
                        actor, title=f"paper-{height}-{rng.randrange(1000)}",
                        keywords="", content=f"{height}:{rng.random()}".encode(),
                        citations=rng.sample(list(ledger.papers), min(2, len(ledger.papers))),
                    )
                elif action == 1 and ledger.papers:
                    ledger.submit_review(
                        actor, rng.choice(list(ledger.papers)), rng.randrange(101)
                    )
                elif action == 2 and ledger.reviews:
                    ledger.submit_reader_score(
                        actor, rng.choice(list(ledger.reviews)), rng.randrange(101)
                    )
            except LedgerError:
                pass  # rejections are part of the workload; state must stay intact
        ledger.seal_block(rng.choice(people).address)  # audits internally
    assert ledger.height >= blocks
    return ledger


def _pool_trajectory(seed: int, phase: Phase, blocks: int = 20) -> str:
    """Re-derive the pool recurrence from observed block inputs.

    After every seal the new pool must equal
    F' - released + N*floor(a1*X) [+ floor(b1*Y)], with the tranche released
    only when some window review clears the threshold. This recomputes that
    from raw params and block contents, independent of the settlement code.
    """
    rng = Random(seed)
    params = EconomicParams(phase=phase, reward_window=3, min_reader_scores=2)
    ledger = Ledger(params)
    people = [ledger.register_account(f"acct{i}") for i in range(8)]
    if phase is Phase.PUBLIC:
        for person in people:
            ledger.seal_block(person.address)
    mismatches = 0
    for height in range(blocks):
        posts = 0
        for _ in range(rng.randrange(4)):
            author = rng.choice(people)
            try:
                paper = ledger.post_paper(
                    author.address, title=f"p{height}-{rng.randrange(100)}",
                    keywords="", content=f"{height}{rng.random()}".encode(),
                )
                posts += 1
            except LedgerError:
                continue
            reviewer = rng.choice([p for p in people if p is not author])
            review = ledger.submit_review(reviewer.address, paper.id, rng.randrange(101))
            for scorer in rng.sample([p for p in people if p not in (author, reviewer)], 3):
                ledger.submit_reader_score(scorer.address, review.id, rng.randrange(101))
        before = ledger.pool.balance
        ledger.seal_block(rng.choice(people).address)
        sealed = ledger.height - 1
        lo = max(0, sealed - params.reward_window)
        qualifying = any(
            r.effective_score > params.quality_threshold
            for r in ledger.reviews.values()
            if r.recorded_at is not None and lo <= r.recorded_at < sealed
        )
        released = floor_mul(before, params.pool_release_ratio) if qualifying else 0
        expected = before - released + posts * floor_mul(params.post_fee, params.fee_pool_frac)
        if phase is Phase.PUBLIC:
            expected += floor_mul(params.block_mint, params.mint_pool_frac)
        if ledger.pool.balance != expected:
            mismatches += 1
    assert mismatches == 0, f"{mismatches} blocks broke the pool recurrence"
    return f"{blocks} blocks matched"


def run_selftest(seed: int = 0) -> list[CheckResult]:
    checks = []

    def store_roundtrip():
        with tempfile.TemporaryDirectory() as root:
            store = BlobStore(root)
            payload = b"selftest payload"
            addr = store.put(payload)
            assert addr == ContentAddress.of(payload)
            assert store.put(payload) == addr, "put is not idempotent"
            assert store.get(addr) == payload
        return f"round-tripped under {addr.digest[:12]}"

    def trimmed_mean_oracle():
        rng = Random(seed)
        for trial in range(200):
            n = rng.randrange(1, 30)
            scores = [Fraction(rng.randrange(0, 10001), 100) for _ in range(n)]
            drop = n // 10
            kept = sorted(scores)[drop:n - drop]
            expect = sum(kept) / len(kept)
            got = trimmed_mean(scores)
            assert got == expect, f"trial {trial}: {got} != {expect}"
        return "200 random vectors matched the sort-and-slice oracle"

    def kernel_parity():
        rng = np.random.default_rng(seed)
        rows = [rng.uniform(0, 100, rng.integers(0, 40)) for _ in range(300)]
        values = np.concatenate(rows) if rows else np.empty(0)
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(r) for r in rows], out=offsets[1:])
        ours = kernels.trimmed_means(values, offsets, 1, 10, 3)
        reference = fallback.trimmed_means(values, offsets, 1, 10, 3)
        assert np.array_equal(ours, reference), "backends disagree"
        return f"active backend {kernels.BACKEND!r} matches the fallback"

    def conservation_consortium():
        _random_economy(seed, Phase.CONSORTIUM)
        return "30 sealed blocks audited"

    def conservation_public():
        _random_economy(seed + 1, Phase.PUBLIC)
        return "30 sealed blocks audited"

    def replay_determinism():
        import io

        ledger = _random_economy(seed + 2, Phase.PUBLIC, blocks=15)
        buf = io.StringIO()
        ledger.export_log(buf)
        twin = Ledger.replay(buf.getvalue().splitlines())
        assert twin.state_digest() == ledger.state_digest(), "replayed state diverged"
        return "log replay reproduced the state digest"

    def adversary_determinism():
        cfg = AdversaryConfig(n_reviews=50, n_malicious=10, readers_per_review=10,
                              fake_reviewer_fraction=0.2, seed=(seed, 7))
        results = [
            evaluate_scenario(run_strategy(2, cfg), min_reader_scores=10).weighted_score
            for _ in range(2)
        ]
        assert results[0] == results[1], "same seed gave different scores"
        assert math.isfinite(results[0])
        return f"strategy-2 score {results[0]:.4f} reproduced"

    checks.append(_check("store round-trip", store_roundtrip))
    checks.append(_check("trimmed-mean oracle", trimmed_mean_oracle))
    checks.append(_check("kernel backend parity", kernel_parity))
    checks.append(_check("conservation, consortium phase", conservation_consortium))
    checks.append(_check("conservation, public phase", conservation_public))
    checks.append(_check("pool recurrence, consortium phase",
                         lambda: _pool_trajectory(seed + 3, Phase.CONSORTIUM)))
    checks.append(_check("pool recurrence, public phase",
                         lambda: _pool_trajectory(seed + 4, Phase.PUBLIC)))
    checks.append(_check("replay determinism", replay_determinism))
    checks.append(_check("adversary determinism", adversary_determinism))
    return checks
