"""Deterministic simulator of a blockchain publication economy.

An append-only ledger records papers, reviews, and reader scores; a
tokenomics layer settles posting fees, citation credits, reviewer bonuses,
and per-block mints in exact fixed-point arithmetic; a robust trimmed-mean
scoring layer turns reader feedback into review and paper scores; and an
adversary harness measures how collusion attacks move those scores compared
to a naive average.

Typical entry points: `Ledger` for the state machine, `EconomicParams` for
the economic constants, `run_strategy`/`evaluate_scenario` for attack
scenarios, and `pubchain.harness` (or the `pubchain` CLI) for sweeps,
scripted economies, and the invariant selftest.
"""

from .adversary import AdversaryConfig, Scenario, ScenarioOutcome, evaluate_scenario, run_strategy
from .errors import (
    ConfigError,
    ConflictOfInterest,
    DuplicateIdentity,
    DuplicatePaper,
    DuplicateReview,
    DuplicateScore,
    EmptyBlob,
    EmptyInput,
    FloodingLimitExceeded,
    InsufficientBalance,
    IntegrityFailure,
    InvariantViolation,
    LedgerError,
    NotFound,
    PubChainError,
    ScenarioParseError,
    SelfReview,
    StoreError,
    UnknownAccount,
    UnknownPaper,
    UnknownReview,
)
from .ledger import Account, Block, Ledger, Paper, Review
from .scoring import effective_review_score, paper_score, trimmed_mean
from .store import BlobStore, ContentAddress
from .tokenomics import BonusPool, EconomicParams, Phase
from .units import SUBUNITS_PER_TOKEN, format_tokens, to_subunits

__version__ = "0.1.0"

__all__ = [
    "Account",
    "AdversaryConfig",
    "Block",
    "BlobStore",
    "BonusPool",
    "ConfigError",
    "ConflictOfInterest",
    "ContentAddress",
    "DuplicateIdentity",
    "DuplicatePaper",
    "DuplicateReview",
    "DuplicateScore",
    "EconomicParams",
    "EmptyBlob",
    "EmptyInput",
    "FloodingLimitExceeded",
    "InsufficientBalance",
    "IntegrityFailure",
    "InvariantViolation",
    "Ledger",
    "LedgerError",
    "NotFound",
    "Paper",
    "Phase",
    "PubChainError",
    "Review",
    "Scenario",
    "ScenarioOutcome",
    "ScenarioParseError",
    "SelfReview",
    "StoreError",
    "SUBUNITS_PER_TOKEN",
    "UnknownAccount",
    "UnknownPaper",
    "UnknownReview",
    "effective_review_score",
    "evaluate_scenario",
    "format_tokens",
    "paper_score",
    "run_strategy",
    "to_subunits",
    "trimmed_mean",
    "__version__",
]
