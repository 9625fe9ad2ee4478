"""Settlement arithmetic: hand-checked splits, conservation, equivariance.

The hand values were worked out on paper from the reference constants
(fee 10 with 0.2/0.3 splits, mint 100 with 0.2/0.4 splits, threshold 50,
release ratio 0.5, recorder share 0.01) before the implementation existed;
they are frozen here and must reproduce exactly in subunits.
"""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pubchain.errors import ConfigError, InvariantViolation
from pubchain.tokenomics import (
    BlockActivity,
    BonusPool,
    EconomicParams,
    Phase,
    author_rewards,
    distribute_post_fee,
    reviewer_rewards,
    review_reward_shares,
    settle_block,
    update_pool,
)
from pubchain.units import SUBUNITS_PER_TOKEN as U


@pytest.fixture
def params():
    return EconomicParams()


@pytest.fixture
def public_params():
    return EconomicParams(phase=Phase.PUBLIC)


# fee splits


def test_fee_split_three_citations(params):
    split = distribute_post_fee(("a", "b", "c"), params)
    assert split.pool_credit == 2 * U
    assert [amt for _, amt in split.citation_credits] == [1 * U] * 3
    assert split.miner_fee == 5 * U
    assert split.total == 10 * U


def test_fee_split_no_citations_rides_to_miner(params):
    split = distribute_post_fee((), params)
    assert split.pool_credit == 2 * U
    assert split.citation_credits == ()
    assert split.miner_fee == 8 * U


def test_fee_split_seven_citations_dust_to_miner(params):
    split = distribute_post_fee(tuple("abcdefg"), params)
    per = (3 * U) // 7
    assert all(amt == per for _, amt in split.citation_credits)
    assert split.miner_fee == 10 * U - 2 * U - 7 * per
    assert split.total == 10 * U


@given(k=st.integers(min_value=0, max_value=40))
def test_fee_split_always_reconstructs_fee(k):
    params = EconomicParams()
    split = distribute_post_fee(tuple(f"author{i}" for i in range(k)), params)
    assert split.total == params.post_fee
    assert split.miner_fee >= 0


# author rewards


def test_author_rewards_hand_values(public_params):
    # tranche b2*minted = 30 tokens; weights 10 and 30 above the threshold
    out = author_rewards(
        [("p1", Fraction(60)), ("p2", Fraction(80))], public_params, minted=75 * U
    )
    assert dict(out.payouts) == {"p1": int(7.5 * U), "p2": int(22.5 * U)}
    assert out.dust == 0 and out.burned == 0


def test_author_rewards_all_below_threshold_burns(public_params):
    out = author_rewards([("p1", Fraction(0)), ("p2", Fraction(50))],
                         public_params, minted=100 * U)
    assert out.payouts == ()
    assert out.burned == 40 * U  # the whole tranche


def test_author_rewards_sole_qualifier_takes_tranche(public_params):
    out = author_rewards([("p1", Fraction(51))], public_params, minted=100 * U)
    assert dict(out.payouts) == {"p1": 40 * U}


def test_author_rewards_nothing_minted(public_params):
    out = author_rewards([("p1", Fraction(90))], public_params, minted=0)
    assert out == author_rewards([], public_params, 0)
    assert out.payouts == () and out.burned == 0


@given(scores=st.lists(st.fractions(min_value=0, max_value=100, max_denominator=8),
                       max_size=12))
def test_author_rewards_conserve_tranche(scores):
    params = EconomicParams(phase=Phase.PUBLIC)
    papers = [(f"p{i}", s) for i, s in enumerate(scores)]
    out = author_rewards(papers, params, minted=params.block_mint)
    tranche = 40 * U
    assert sum(a for _, a in out.payouts) + out.dust + out.burned == tranche
    assert all(a >= 0 for _, a in out.payouts)


# reviewer rewards


def test_reviewer_rewards_hand_values(params):
    # alpha*F = 50; single review above threshold takes it; recorder gets 1%
    out = reviewer_rewards([("rev", "rec", Fraction(70))], 100 * U, params)
    assert out.released == 50 * U
    assert dict(out.reviewer_payouts) == {"rev": int(49.5 * U)}
    assert dict(out.recorder_payouts) == {"rec": int(0.5 * U)}
    assert out.dust == 0


def test_reviewer_rewards_proportional_split(params):
    # excesses 10 and 30 over an 80-token pool: tranche 40 splits 10/30
    out = reviewer_rewards(
        [("r1", "m1", Fraction(60)), ("r2", "m2", Fraction(80))], 80 * U, params
    )
    total_r1 = dict(out.reviewer_payouts)["r1"] + dict(out.recorder_payouts)["m1"]
    total_r2 = dict(out.reviewer_payouts)["r2"] + dict(out.recorder_payouts)["m2"]
    assert total_r1 == 10 * U and total_r2 == 30 * U


def test_reviewer_rewards_below_threshold_release_nothing(params):
    out = reviewer_rewards([("r", "m", Fraction(50))], 100 * U, params)
    assert out.released == 0
    assert out.reviewer_payouts == () and out.recorder_payouts == ()


@given(
    ws=st.lists(st.fractions(min_value=0, max_value=100, max_denominator=8), max_size=10),
    pool=st.integers(min_value=0, max_value=10**13),
)
def test_reviewer_rewards_conserve_release(ws, pool):
    params = EconomicParams()
    staked = [(f"r{i}", f"m{i % 3}", w) for i, w in enumerate(ws)]
    out = reviewer_rewards(staked, pool, params)
    paid = sum(a for _, a in out.reviewer_payouts) + sum(a for _, a in out.recorder_payouts)
    assert paid + out.dust == out.released
    assert out.released in (0, (pool * 1) // 2)


@given(
    ws=st.lists(st.fractions(min_value=0, max_value=100, max_denominator=16),
                min_size=1, max_size=8),
    pool=st.fractions(min_value=0, max_value=10**9, max_denominator=4),
)
def test_review_shares_scale_with_pool(ws, pool):
    """Doubling the pool exactly doubles every rational share."""
    params = EconomicParams()
    once = review_reward_shares(ws, pool, params)
    twice = review_reward_shares(ws, pool * 2, params)
    assert twice == [2 * g for g in once]


def test_review_shares_hand_values(params):
    shares = review_reward_shares([Fraction(60), Fraction(80)], 80, params)
    assert shares == [Fraction(10), Fraction(30)]


# pool recurrence


def test_update_pool_consortium_example(params):
    pool = BonusPool(100 * U)
    new = update_pool(pool, params, n_new_papers=5, released=50 * U, minted=0)
    assert new.balance == 60 * U
    assert new.previous_balance == 100 * U


def test_update_pool_public_example(public_params):
    pool = BonusPool(100 * U)
    new = update_pool(pool, public_params, n_new_papers=5, released=50 * U,
                      minted=100 * U)
    assert new.balance == 80 * U


def test_update_pool_retains_unreleased_tranche():
    # full release ratio, but nothing qualified: the pool keeps everything
    params = EconomicParams(pool_release_ratio=1)
    pool = BonusPool(100 * U)
    new = update_pool(pool, params, n_new_papers=0, released=0, minted=0)
    assert new.balance == 100 * U


def test_update_pool_rejects_foreign_release(params):
    with pytest.raises(InvariantViolation):
        update_pool(BonusPool(100 * U), params, 0, released=33, minted=0)


# parameter validation and serialization


def test_params_fractions_exact():
    p = EconomicParams()
    assert p.fee_pool_frac == Fraction(1, 5)
    assert p.mint_author_frac == Fraction(2, 5)
    assert p.phase is Phase.CONSORTIUM


@pytest.mark.parametrize("kwargs", [
    {"fee_pool_frac": 0.8, "fee_citation_frac": 0.3},
    {"mint_pool_frac": 1.2},
    {"pool_release_ratio": -0.1},
    {"post_fee": -1},
    {"reward_window": 0},
    {"min_reader_scores": 0},
    {"phase": "III"},
])
def test_params_validation_rejects(kwargs):
    with pytest.raises(ConfigError):
        EconomicParams(**kwargs)


def test_params_from_config_token_units():
    p = EconomicParams.from_config({
        "post_fee": 2, "block_mint": 50, "phase": "II",
        "pool_release_ratio": 0.25, "quality_threshold": 60,
    })
    assert p.post_fee == 2 * U
    assert p.block_mint == 50 * U
    assert p.pool_release_ratio == Fraction(1, 4)
    assert p.quality_threshold == Fraction(60)
    assert p.phase is Phase.PUBLIC


def test_params_from_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        EconomicParams.from_config({"fee": 10})


def test_params_record_round_trip(public_params):
    assert EconomicParams.from_record(public_params.to_record()) == public_params


# whole-block settlement


def _activity(**kwargs):
    defaults = dict(height=3, miner="miner", posts=(), window_papers=(),
                    window_reviews=())
    defaults.update(kwargs)
    return BlockActivity(**defaults)


def test_settle_empty_public_block(public_params):
    s = settle_block(_activity(), BonusPool(0), public_params)
    assert s.minted == 100 * U
    assert s.burned == 40 * U  # author tranche with no window papers
    assert s.balance_deltas == {"miner": 40 * U}
    assert s.pool.balance == 20 * U


def test_settle_consortium_block_mints_nothing(params):
    s = settle_block(_activity(), BonusPool(7), params)
    assert s.minted == 0 and s.burned == 0
    assert s.entries == ()
    assert s.pool.balance == 7


def test_settle_fee_rows_mirror_post_debit(params):
    split = distribute_post_fee(("cited",), params)
    s = settle_block(_activity(posts=(("author", split),)), BonusPool(0), params)
    reasons = [(e.account, e.reason, e.amount) for e in s.entries]
    assert reasons == [
        ("author", "post_fee", -10 * U),
        ("cited", "citation", 3 * U),
        ("miner", "miner_fee", 5 * U),
        ("pool", "pool", 2 * U),
    ]
    # the debit row reports; only credits land in balance_deltas
    assert s.balance_deltas == {"cited": 3 * U, "miner": 5 * U}


def test_settle_block_conservation_guard(public_params):
    # a qualifying window on a funded pool exercises every tranche at once
    s = settle_block(
        _activity(
            window_papers=(("auth", Fraction(70)),),
            window_reviews=(("rev", "rec", Fraction(90)),),
        ),
        BonusPool(100 * U),
        public_params,
    )
    credits = sum(s.balance_deltas.values())
    pool_delta = s.pool.balance - 100 * U
    assert credits + pool_delta + s.burned == s.minted
    assert s.balance_deltas["rev"] == int(49.5 * U)
    assert s.balance_deltas["rec"] == int(0.5 * U)
    assert s.balance_deltas["auth"] == 40 * U


def test_settlement_reasons_are_documented(public_params):
    from pubchain.tokenomics import REASONS

    split = distribute_post_fee(("cited",), public_params)
    s = settle_block(
        _activity(
            posts=(("author", split),),
            window_papers=(("auth", Fraction(70)),),
            window_reviews=(("rev", "rec", Fraction(90)),),
        ),
        BonusPool(100 * U),
        public_params,
    )
    assert {e.reason for e in s.entries} <= set(REASONS)
