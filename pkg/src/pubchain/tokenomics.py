"""Token flows of the publication economy.

Every posted paper pays a fixed fee that splits three ways: a share into the
reviewer bonus pool, a share to the authors of the cited papers, and the rest
to the miner sealing the block. In the public phase each sealed block also
mints a fixed coinbase: a share into the pool, a share to authors of recently
published papers in proportion to how far their paper scores clear a quality
threshold, and the rest to the miner.

The reviewer bonus pool releases a fixed ratio of its balance every block,
split over recently recorded reviews in proportion to how far their effective
scores clear the same threshold; a small cut of each review's payout goes to
the miner that recorded the review. The pool then refills from the block's
fee shares (and the coinbase share in the public phase):

    F_new = F_old - released + N * floor(a1 * X) [+ floor(b1 * Y)]

with released = floor(alpha * F_old) when at least one review clears the
threshold, else 0 (an unreleasable tranche simply stays pooled).

All amounts are integer subunits (1e-8 tokens). Every fractional split
floors, and each split's remainder goes to the sealing miner, so per-post and
per-block conservation hold exactly: fee splits sum to X, and coinbase
payouts plus pool credit plus burned tranche sum to Y. When no paper clears
the threshold the author tranche has nowhere to go and is recorded as burned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Mapping, Sequence, Tuple

from .errors import ConfigError, InvariantViolation
from .units import (
    SUBUNITS_PER_TOKEN,
    Numeric,
    as_fraction,
    floor_mul,
    floor_share,
    to_subunits,
)

# settlement reasons, in the order entries appear within a block
REASONS = (
    "post_fee",
    "citation",
    "miner_fee",
    "pool",
    "reviewer_reward",
    "miner_beta",
    "author_reward",
    "coinbase",
)


class Phase(enum.Enum):
    """Lifecycle phase of the chain.

    CONSORTIUM (phase I): permissioned bootstrap; registration mints a grant,
    blocks mint nothing. PUBLIC (phase II): open network; no registration
    grant, every block mints a fixed coinbase.
    """

    CONSORTIUM = "I"
    PUBLIC = "II"

    @classmethod
    def parse(cls, value) -> "Phase":
        if isinstance(value, Phase):
            return value
        text = str(value).strip().upper()
        for member in cls:
            if text in (member.value, member.name):
                return member
        raise ConfigError(f"unknown phase {value!r} (expected I or II)")


_FRACTION_FIELDS = (
    "fee_pool_frac",
    "fee_citation_frac",
    "mint_pool_frac",
    "mint_author_frac",
    "quality_threshold",
    "pool_release_ratio",
    "miner_review_share",
)
_AMOUNT_FIELDS = ("post_fee", "block_mint", "registration_grant")
_COUNT_FIELDS = ("reward_window", "min_reader_scores", "reader_score_cap")
# config-file keys denominated in whole tokens rather than subunits
_TOKEN_KEYS = set(_AMOUNT_FIELDS)


@dataclass(frozen=True)
class EconomicParams:
    """Economic constants of one chain. Amounts are integer subunits.

    The defaults are the reference test economy; build from a config mapping
    in token units with `EconomicParams.from_config`.
    """

    post_fee: int = 10 * SUBUNITS_PER_TOKEN  # X, debited from the author per post
    fee_pool_frac: Fraction = Fraction(1, 5)  # a1, fee share into the bonus pool
    fee_citation_frac: Fraction = Fraction(3, 10)  # a2, fee share split over cited papers
    block_mint: int = 100 * SUBUNITS_PER_TOKEN  # Y, coinbase per public-phase block
    mint_pool_frac: Fraction = Fraction(1, 5)  # b1, coinbase share into the pool
    mint_author_frac: Fraction = Fraction(2, 5)  # b2, coinbase share for authors
    quality_threshold: Fraction = Fraction(50)  # scores must clear this to earn
    reward_window: int = 10  # how many recent blocks stay reward-eligible
    pool_release_ratio: Fraction = Fraction(1, 2)  # alpha, pool share released per block
    miner_review_share: Fraction = Fraction(1, 100)  # beta, recorder's cut of a review payout
    min_reader_scores: int = 10  # reader scores needed before a review counts
    reader_score_cap: int = 4  # max scores one reader may give per paper
    phase: Phase = Phase.CONSORTIUM
    registration_grant: int = 50 * SUBUNITS_PER_TOKEN  # minted per consortium signup

    def __post_init__(self):
        for name in _FRACTION_FIELDS:
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        object.__setattr__(self, "phase", Phase.parse(self.phase))
        for name in _AMOUNT_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ConfigError(f"{name} must be a nonnegative subunit integer")
        for name in _COUNT_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer")
        for name in ("fee_pool_frac", "fee_citation_frac", "mint_pool_frac",
                     "mint_author_frac", "pool_release_ratio", "miner_review_share"):
            ratio = getattr(self, name)
            if not 0 <= ratio <= 1:
                raise ConfigError(f"{name}={ratio} outside [0, 1]")
        if self.fee_pool_frac + self.fee_citation_frac > 1:
            raise ConfigError("fee shares exceed the whole fee")
        if self.mint_pool_frac + self.mint_author_frac > 1:
            raise ConfigError("mint shares exceed the coinbase")
        if self.quality_threshold < 0:
            raise ConfigError("quality_threshold must be >= 0")

    @classmethod
    def from_config(cls, mapping: Mapping) -> "EconomicParams":
        """Build params from a flat config mapping in token units."""
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            if key not in known:
                raise ConfigError(f"unknown economic parameter {key!r}")
            if key in _TOKEN_KEYS:
                kwargs[key] = to_subunits(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    def to_record(self) -> dict:
        """Exact, order-stable mapping for transaction-log headers."""
        record: dict = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Fraction):
                record[f.name] = str(value)
            elif isinstance(value, Phase):
                record[f.name] = value.value
            else:
                record[f.name] = value
        return record

    @classmethod
    def from_record(cls, record: Mapping) -> "EconomicParams":
        kwargs = dict(record)
        for name in _FRACTION_FIELDS:
            kwargs[name] = Fraction(kwargs[name])
        return cls(**kwargs)


@dataclass(frozen=True)
class BonusPool:
    """Reviewer bonus pool: current balance and the pre-update balance."""

    balance: int = 0
    previous_balance: int = 0


# ---------------------------------------------------------------------------
# per-post fee split


@dataclass(frozen=True)
class FeeSplit:
    """Exact decomposition of one posting fee."""

    pool_credit: int
    citation_credits: Tuple[Tuple[str, int], ...]  # (cited author address, amount)
    miner_fee: int

    @property
    def total(self) -> int:
        return self.pool_credit + sum(a for _, a in self.citation_credits) + self.miner_fee


def distribute_post_fee(cited_authors: Sequence[str], params: EconomicParams) -> FeeSplit:
    """Split one posting fee between pool, cited authors, and the miner.

    Each of the K cited papers' authors gets floor(a2*X/K); with no
    registered citations the citation share rides along to the miner. The
    miner receives whatever the floored shares leave over, so the split sums
    to the fee exactly.
    """
    fee = params.post_fee
    pool_credit = floor_mul(fee, params.fee_pool_frac)
    k = len(cited_authors)
    credits: list[Tuple[str, int]] = []
    if k:
        per_citation = floor_mul(fee, params.fee_citation_frac / k)
        credits = [(author, per_citation) for author in cited_authors]
    miner_fee = fee - pool_credit - sum(a for _, a in credits)
    split = FeeSplit(pool_credit, tuple(credits), miner_fee)
    if split.total != fee or miner_fee < 0:
        raise InvariantViolation("fee split does not reconstruct the fee")
    return split


# ---------------------------------------------------------------------------
# threshold-weighted reward tranches


def _threshold_weights(scores: Sequence[Fraction], threshold: Fraction) -> list[Fraction]:
    return [max(as_fraction(s) - threshold, Fraction(0)) for s in scores]


@dataclass(frozen=True)
class AuthorRewardOutcome:
    payouts: Tuple[Tuple[str, int], ...]  # (author address, amount) per eligible paper
    dust: int  # floor remainder, owed to the sealing miner
    burned: int  # the whole tranche when nothing clears the threshold


def author_rewards(
    scored_papers: Sequence[Tuple[str, Numeric]],
    params: EconomicParams,
    minted: int,
) -> AuthorRewardOutcome:
    """Split the author tranche of a coinbase over recent papers.

    `scored_papers` holds (author address, paper score) for every paper
    published inside the reward window. Each paper earns in proportion to
    max(score - threshold, 0); if no paper clears the threshold the tranche
    is burned rather than redirected.
    """
    tranche = floor_mul(minted, params.mint_author_frac)
    if tranche == 0:
        return AuthorRewardOutcome((), 0, 0)
    weights = _threshold_weights([s for _, s in scored_papers], params.quality_threshold)
    total = sum(weights)
    if total == 0:
        return AuthorRewardOutcome((), 0, tranche)
    payouts = []
    paid = 0
    for (author, _), weight in zip(scored_papers, weights):
        if weight == 0:
            continue
        amount = floor_share(tranche, weight, total)
        paid += amount
        payouts.append((author, amount))
    return AuthorRewardOutcome(tuple(payouts), tranche - paid, 0)


@dataclass(frozen=True)
class ReviewerRewardOutcome:
    reviewer_payouts: Tuple[Tuple[str, int], ...]  # (reviewer address, amount)
    recorder_payouts: Tuple[Tuple[str, int], ...]  # (recording miner address, amount)
    released: int  # tranche drained from the pool (0 when nothing qualifies)
    dust: int  # floor remainders, owed to the sealing miner


def review_reward_shares(
    effective_scores: Sequence[Numeric],
    pool_balance: Numeric,
    params: EconomicParams,
) -> list[Fraction]:
    """Exact rational reward per review before any flooring.

    share_j = alpha * F * max(W_j - threshold, 0) / sum of those excesses.
    Doubling F exactly doubles every share; the paid integer amounts in
    `reviewer_rewards` track these within flooring dust.
    """
    weights = _threshold_weights(effective_scores, params.quality_threshold)
    total = sum(weights)
    if total == 0:
        return [Fraction(0) for _ in weights]
    tranche = params.pool_release_ratio * as_fraction(pool_balance)
    return [tranche * w / total for w in weights]


def reviewer_rewards(
    staked_reviews: Sequence[Tuple[str, str, Numeric]],
    pool_balance: int,
    params: EconomicParams,
) -> ReviewerRewardOutcome:
    """Split the pool release over recent reviews.

    `staked_reviews` holds (reviewer, recording miner, effective score) for
    every review recorded inside the reward window. Each qualifying review's
    payout g splits into (1 - beta)*g for the reviewer and beta*g for the
    miner that recorded the review. If no review clears the threshold,
    nothing is released and the pool keeps the tranche.
    """
    weights = _threshold_weights([w for _, _, w in staked_reviews], params.quality_threshold)
    total = sum(weights)
    tranche = floor_mul(pool_balance, params.pool_release_ratio)
    if total == 0 or tranche == 0:
        return ReviewerRewardOutcome((), (), 0, 0)
    reviewer_payouts = []
    recorder_payouts = []
    paid = 0
    for (reviewer, recorder, _), weight in zip(staked_reviews, weights):
        if weight == 0:
            continue
        reward = floor_share(tranche, weight, total)
        recorder_cut = floor_mul(reward, params.miner_review_share)
        reviewer_cut = reward - recorder_cut
        paid += reward
        reviewer_payouts.append((reviewer, reviewer_cut))
        recorder_payouts.append((recorder, recorder_cut))
    return ReviewerRewardOutcome(
        tuple(reviewer_payouts), tuple(recorder_payouts), tranche, tranche - paid
    )


def update_pool(
    pool: BonusPool,
    params: EconomicParams,
    n_new_papers: int,
    released: int,
    minted: int,
) -> BonusPool:
    """Advance the pool by one block.

    `released` is the reviewer tranche actually drained this block (0 when no
    review qualified); `minted` is the block's coinbase (0 in the consortium
    phase). Inflows are the per-paper pool credits and the coinbase share.
    """
    if released not in (0, floor_mul(pool.balance, params.pool_release_ratio)):
        raise InvariantViolation("released amount is not this block's tranche")
    inflow = n_new_papers * floor_mul(params.post_fee, params.fee_pool_frac)
    inflow += floor_mul(minted, params.mint_pool_frac)
    return BonusPool(pool.balance - released + inflow, pool.balance)


# ---------------------------------------------------------------------------
# whole-block settlement


@dataclass(frozen=True)
class SettlementEntry:
    """One CSV row of the per-block settlement report.

    `account` is a ledger address, or the literal "pool" for pool movements.
    Amounts are signed subunits: the post_fee row mirrors the debit taken
    when the post was accepted; every other account row is a credit.
    """

    block: int
    account: str
    reason: str
    amount: int


@dataclass(frozen=True)
class BlockActivity:
    """Everything settle_block needs to know about one sealed block."""

    height: int
    miner: str
    posts: Tuple[Tuple[str, FeeSplit], ...]  # (author, fee split) per post in this block
    window_papers: Tuple[Tuple[str, Fraction], ...]  # (author, score), window before this block
    window_reviews: Tuple[Tuple[str, str, Fraction], ...]  # (reviewer, recorder, W)


@dataclass(frozen=True)
class Settlement:
    entries: Tuple[SettlementEntry, ...]
    balance_deltas: Mapping[str, int]  # credits to apply (fee debits happened at post time)
    pool: BonusPool
    minted: int  # coinbase created this block
    burned: int  # author tranche with no eligible paper


def settle_block(
    activity: BlockActivity, pool: BonusPool, params: EconomicParams
) -> Settlement:
    """Compute every payout for one sealed block.

    Order: fee splits, pool fee inflow, reviewer rewards against the
    pre-update pool, author rewards, coinbase residue to the miner, pool
    coinbase inflow. Split remainders go to the sealing miner under the
    reason of the split that produced them. Raises InvariantViolation if the
    block does not conserve value exactly.
    """
    h = activity.height
    miner = activity.miner
    entries: list[SettlementEntry] = []
    deltas: dict[str, int] = {}

    def credit(account: str, reason: str, amount: int) -> None:
        if amount == 0:
            return
        entries.append(SettlementEntry(h, account, reason, amount))
        deltas[account] = deltas.get(account, 0) + amount

    def pool_row(amount: int) -> None:
        if amount:
            entries.append(SettlementEntry(h, "pool", "pool", amount))

    # posting fees: the debit row mirrors the charge taken at post time
    fee_inflow = 0
    for author, split in activity.posts:
        entries.append(SettlementEntry(h, author, "post_fee", -params.post_fee))
        for cited_author, amount in split.citation_credits:
            credit(cited_author, "citation", amount)
        credit(miner, "miner_fee", split.miner_fee)
        fee_inflow += split.pool_credit
    pool_row(fee_inflow)

    # reviewer rewards against the pre-update pool balance
    review_outcome = reviewer_rewards(activity.window_reviews, pool.balance, params)
    pool_row(-review_outcome.released)
    for reviewer, amount in review_outcome.reviewer_payouts:
        credit(reviewer, "reviewer_reward", amount)
    for recorder, amount in review_outcome.recorder_payouts:
        credit(recorder, "miner_beta", amount)
    credit(miner, "reviewer_reward", review_outcome.dust)

    # coinbase: author tranche, pool share, miner residue
    minted = params.block_mint if params.phase is Phase.PUBLIC else 0
    author_outcome = author_rewards(activity.window_papers, params, minted)
    for author, amount in author_outcome.payouts:
        credit(author, "author_reward", amount)
    credit(miner, "author_reward", author_outcome.dust)
    mint_inflow = floor_mul(minted, params.mint_pool_frac)
    author_tranche = floor_mul(minted, params.mint_author_frac)
    credit(miner, "coinbase", minted - mint_inflow - author_tranche)
    pool_row(mint_inflow)

    new_pool = update_pool(pool, params, len(activity.posts), review_outcome.released, minted)

    credited = sum(deltas.values())
    pool_delta = new_pool.balance - pool.balance
    fees_debited = len(activity.posts) * params.post_fee
    if credited + pool_delta + author_outcome.burned != fees_debited + minted:
        raise InvariantViolation(
            f"block {h} does not conserve: credits {credited}, pool {pool_delta:+}, "
            f"burned {author_outcome.burned}, fees {fees_debited}, minted {minted}"
        )
    return Settlement(tuple(entries), deltas, new_pool, minted, author_outcome.burned)
