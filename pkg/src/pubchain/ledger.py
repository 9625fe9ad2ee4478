"""Append-only ledger of publication activity.

The ledger is a single-writer state machine. Four transaction kinds mutate it
(account registration, paper posts, reviews, reader scores); `seal_block`
closes the current batch: it stamps the pending transactions with the new
block height, recomputes the effective score of every review touched since
the last seal and the running score of every affected paper, and settles all
payouts for the block through the tokenomics module in one atomic step.

Validation enforces the publication-economy rules: one address per identity,
one upload per (title, content address), one review per (reviewer, paper), no
reviewing your own paper, no crossing the reviewer/reader line on the same
paper in either order, at most `reader_score_cap` reader scores per (reader,
paper), and one score per (reader, review). Posting debits the fee up front,
so balances never go negative.

Everything the ledger does is deterministic: addresses are digests of
identities, transaction ids are digests of transaction content, and no wall
clock is consulted. `export_log` emits the full transaction history as
line-delimited JSON (a params header followed by one record per transaction
in application order); `replay` consumes such a log and reproduces the state
bit for bit, which `state_digest` makes checkable.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    ConflictOfInterest,
    DuplicateIdentity,
    DuplicatePaper,
    DuplicateReview,
    DuplicateScore,
    FloodingLimitExceeded,
    InsufficientBalance,
    InvariantViolation,
    SelfReview,
    UnknownAccount,
    UnknownPaper,
    UnknownReview,
)
from .scoring import effective_review_score, paper_score
from .store import BlobStore, ContentAddress
from .tokenomics import (
    BlockActivity,
    BonusPool,
    EconomicParams,
    FeeSplit,
    Phase,
    Settlement,
    SettlementEntry,
    distribute_post_fee,
    settle_block,
)
from .units import Numeric, as_score

logger = logging.getLogger(__name__)

Content = Union[bytes, str, ContentAddress]


def _digest(*parts: str) -> str:
    return hashlib.sha256("\x00".join(parts).encode()).hexdigest()


def _resolve_content(content: Content, store: Optional[BlobStore]) -> str:
    """Turn post/review payloads into a content address, storing bytes if we can."""
    if isinstance(content, bytes):
        if store is not None:
            return store.put(content).digest
        return ContentAddress.of(content).digest
    if isinstance(content, ContentAddress):
        return content.digest
    return ContentAddress(content).digest  # validates the hex form


@dataclass
class Account:
    identity: str
    address: str
    balance: int = 0  # subunits; debits are guarded, so this never goes negative


@dataclass
class Paper:
    id: str
    author: str
    title: str
    keywords: str
    content_addr: str
    citations: Tuple[str, ...]  # registered papers only, in submission order
    score: Fraction = Fraction(0)
    published_at: Optional[int] = None  # height of the sealing block


@dataclass
class Review:
    id: str
    paper: str
    reviewer: str
    z_score: Fraction
    comment_addr: str
    reader_scores: list = field(default_factory=list)  # (reader address, value) in arrival order
    effective_score: Fraction = Fraction(0)
    recorded_at: Optional[int] = None
    recording_miner: Optional[str] = None


@dataclass(frozen=True)
class Block:
    height: int
    miner: str
    transactions: Tuple[Tuple[str, str], ...]  # (kind, reference id) in application order


class Ledger:
    """The blockchain state machine; see the module docstring for the rules."""

    def __init__(self, params: Optional[EconomicParams] = None,
                 store: Optional[BlobStore] = None):
        self.params = params if params is not None else EconomicParams()
        self.store = store
        self.accounts: dict[str, Account] = {}
        self.papers: dict[str, Paper] = {}
        self.reviews: dict[str, Review] = {}
        self.blocks: list[Block] = []
        self.pool = BonusPool()
        self.minted = 0  # registration grants + coinbases, subunits
        self.burned = 0  # author tranches nobody qualified for
        self._identities: set[str] = set()
        self._paper_keys: set[Tuple[str, str]] = set()  # (title, content_addr)
        self._reviewed: set[Tuple[str, str]] = set()  # (reviewer, paper id)
        self._scores_given: dict[Tuple[str, str], int] = {}  # (reader, paper id) -> count
        self._scored_reviews: set[Tuple[str, str]] = set()  # (reader, review id)
        self._readers_of_paper: dict[str, set] = {}  # paper id -> reader addresses
        self._pending: list[Tuple[str, str]] = []  # (kind, ref) awaiting the next seal
        self._pending_posts: list[Tuple[str, FeeSplit]] = []  # (author, split)
        self._touched_reviews: set[str] = set()  # reviews needing a W refresh at seal
        self._log: list[dict] = []  # one record per applied transaction
        self._settlements: list[Settlement] = []  # one per sealed block

    # -- transactions -------------------------------------------------------

    def register_account(self, identity: str) -> Account:
        """Create an account for an identity; one address per identity, ever.

        The consortium phase mints a signup grant; the public phase starts
        accounts at zero.
        """
        if identity in self._identities:
            raise DuplicateIdentity(f"identity already registered: {identity!r}")
        address = _digest("account", identity)
        grant = self.params.registration_grant if self.params.phase is Phase.CONSORTIUM else 0
        account = Account(identity=identity, address=address, balance=grant)
        self._identities.add(identity)
        self.accounts[address] = account
        self.minted += grant
        self._pending.append(("register", address))
        self._log.append({"kind": "register", "identity": identity})
        return account

    def post_paper(self, author: str, title: str, keywords: str, content: Content,
                   citations: Sequence[str] = ()) -> Paper:
        """Record a paper post, debiting the posting fee immediately.

        Citations of unknown paper ids are dropped with a warning, and
        duplicates collapse to the first occurrence; only what survives earns
        citation credits. One upload per (title, content address).
        """
        acct = self._account(author)
        content_addr = _resolve_content(content, self.store)
        if (title, content_addr) in self._paper_keys:
            raise DuplicatePaper(f"already posted: {title!r} / {content_addr[:12]}")
        if acct.balance < self.params.post_fee:
            raise InsufficientBalance(
                f"posting costs {self.params.post_fee} subunits, {author[:12]} has {acct.balance}"
            )
        kept: list[str] = []
        for cited in citations:
            if cited not in self.papers:
                logger.warning("dropping citation of unregistered paper %s", cited)
            elif cited not in kept:
                kept.append(cited)
        paper_id = _digest("paper", author, title, content_addr, *kept)
        paper = Paper(id=paper_id, author=author, title=title, keywords=keywords,
                      content_addr=content_addr, citations=tuple(kept))
        acct.balance -= self.params.post_fee
        split = distribute_post_fee(
            tuple(self.papers[c].author for c in kept), self.params
        )
        self.papers[paper_id] = paper
        self._paper_keys.add((title, content_addr))
        self._pending.append(("post", paper_id))
        self._pending_posts.append((author, split))
        self._log.append({
            "kind": "post", "author": author, "title": title, "keywords": keywords,
            "content": content_addr, "citations": list(citations),
        })
        return paper

    def submit_review(self, reviewer: str, paper_id: str, z_score: Numeric,
                      comment: Optional[Content] = None) -> Review:
        """Record a review with its quality score in [0, 100].

        A reviewer gets one review per paper, may not review their own paper,
        and may not review a paper whose reviews they have already scored as
        a reader (the conflict rule cuts both ways).
        """
        self._account(reviewer)
        paper = self._paper(paper_id)
        if reviewer == paper.author:
            raise SelfReview(f"{reviewer[:12]} wrote paper {paper_id[:12]}")
        if (reviewer, paper_id) in self._reviewed:
            raise DuplicateReview(f"{reviewer[:12]} already reviewed {paper_id[:12]}")
        if reviewer in self._readers_of_paper.get(paper_id, ()):
            raise ConflictOfInterest(
                f"{reviewer[:12]} has scored reviews of {paper_id[:12]} as a reader"
            )
        z = as_score(z_score)
        comment_addr = "" if comment is None else _resolve_content(comment, self.store)
        review_id = _digest("review", reviewer, paper_id)
        review = Review(id=review_id, paper=paper_id, reviewer=reviewer,
                        z_score=z, comment_addr=comment_addr)
        self.reviews[review_id] = review
        self._reviewed.add((reviewer, paper_id))
        self._pending.append(("review", review_id))
        self._touched_reviews.add(review_id)
        self._log.append({
            "kind": "review", "reviewer": reviewer, "paper": paper_id,
            "z": str(z), "comment": comment_addr,
        })
        return review

    def submit_reader_score(self, reader: str, review_id: str, value: Numeric) -> Review:
        """Record a reader's score of a review.

        A reader never scores the same review twice, never scores reviews of
        a paper they reviewed themselves, and gets at most `reader_score_cap`
        scores per paper.
        """
        self._account(reader)
        review = self._review(review_id)
        if (reader, review.paper) in self._reviewed:
            raise ConflictOfInterest(
                f"{reader[:12]} reviewed {review.paper[:12]}; cannot score its reviews"
            )
        if (reader, review_id) in self._scored_reviews:
            raise DuplicateScore(f"{reader[:12]} already scored review {review_id[:12]}")
        given = self._scores_given.get((reader, review.paper), 0)
        if given >= self.params.reader_score_cap:
            raise FloodingLimitExceeded(
                f"{reader[:12]} already gave {given} scores on paper {review.paper[:12]}"
            )
        v = as_score(value)
        review.reader_scores.append((reader, v))
        self._scored_reviews.add((reader, review_id))
        self._scores_given[(reader, review.paper)] = given + 1
        self._readers_of_paper.setdefault(review.paper, set()).add(reader)
        self._touched_reviews.add(review_id)
        self._log.append({
            "kind": "score", "reader": reader, "review": review_id, "value": str(v),
        })
        return review

    def seal_block(self, miner: str) -> Block:
        """Close the pending batch into a block and settle its payouts.

        Always succeeds for a registered miner: an empty consortium-phase
        seal yields an empty block, an empty public-phase seal still mints
        the coinbase. Effective scores and paper scores are refreshed before
        settlement, and rewards go to activity recorded in the previous
        `reward_window` blocks, so nothing pays out in its own block.
        """
        self._account(miner)
        height = len(self.blocks)

        for review_id in sorted(self._touched_reviews):
            review = self.reviews[review_id]
            review.effective_score = effective_review_score(
                [v for _, v in review.reader_scores], self.params.min_reader_scores
            )
        touched_papers = {self.reviews[r].paper for r in self._touched_reviews}
        for paper_id in sorted(touched_papers):
            reviews = [r for r in self.reviews.values() if r.paper == paper_id]
            self.papers[paper_id].score = paper_score(
                (r.z_score, r.effective_score) for r in reviews
            )
        self._touched_reviews.clear()

        for kind, ref in self._pending:
            if kind == "post":
                self.papers[ref].published_at = height
            elif kind == "review":
                review = self.reviews[ref]
                review.recorded_at = height
                review.recording_miner = miner

        lo = max(0, height - self.params.reward_window)
        window_papers = tuple(
            (p.author, p.score) for p in self.papers.values()
            if p.published_at is not None and lo <= p.published_at < height
        )
        window_reviews = tuple(
            (r.reviewer, r.recording_miner, r.effective_score)
            for r in self.reviews.values()
            if r.recorded_at is not None and lo <= r.recorded_at < height
        )

        activity = BlockActivity(
            height=height, miner=miner, posts=tuple(self._pending_posts),
            window_papers=window_papers, window_reviews=window_reviews,
        )
        settlement = settle_block(activity, self.pool, self.params)
        for address, delta in settlement.balance_deltas.items():
            self.accounts[address].balance += delta
        self.pool = settlement.pool
        self.minted += settlement.minted
        self.burned += settlement.burned
        self._settlements.append(settlement)

        transactions = tuple(self._pending)
        if settlement.minted:
            transactions += (("coinbase", miner),)
        block = Block(height=height, miner=miner, transactions=transactions)
        self.blocks.append(block)
        self._pending = []
        self._pending_posts = []
        self._log.append({"kind": "seal", "miner": miner})
        self.audit()
        return block

    # -- queries and invariants ---------------------------------------------

    def audit(self) -> None:
        """Check global conservation; raises InvariantViolation on any leak.

        Fees debited since the last seal are still in flight (they settle at
        the next seal), so they count alongside balances and the pool.
        """
        in_flight = len(self._pending_posts) * self.params.post_fee
        held = sum(a.balance for a in self.accounts.values())
        if held + self.pool.balance + self.burned + in_flight != self.minted:
            raise InvariantViolation(
                f"conservation broken: balances {held} + pool {self.pool.balance} "
                f"+ burned {self.burned} + in-flight {in_flight} != minted {self.minted}"
            )
        if any(a.balance < 0 for a in self.accounts.values()):
            raise InvariantViolation("negative balance")
        if self.pool.balance < 0:
            raise InvariantViolation("negative pool")

    @property
    def height(self) -> int:
        return len(self.blocks)

    def settlement_entries(self) -> Iterator[SettlementEntry]:
        """All settlement rows so far, in block order."""
        for settlement in self._settlements:
            yield from settlement.entries

    def account_by_identity(self, identity: str) -> Account:
        for account in self.accounts.values():
            if account.identity == identity:
                return account
        raise UnknownAccount(f"no account for identity {identity!r}")

    def _account(self, address: str) -> Account:
        try:
            return self.accounts[address]
        except KeyError:
            raise UnknownAccount(f"unknown account {address[:12]}") from None

    def _paper(self, paper_id: str) -> Paper:
        try:
            return self.papers[paper_id]
        except KeyError:
            raise UnknownPaper(f"unknown paper {paper_id[:12]}") from None

    def _review(self, review_id: str) -> Review:
        try:
            return self.reviews[review_id]
        except KeyError:
            raise UnknownReview(f"unknown review {review_id[:12]}") from None

    # -- replay and digests ---------------------------------------------------

    def export_log(self, fh: IO[str]) -> None:
        """Write the transaction history as line-delimited JSON.

        The first record holds the economic parameters; every following
        record is one transaction in application order. Field order within a
        record is fixed, so equal histories serialize to equal bytes.
        """
        header = {"kind": "params", **self.params.to_record()}
        fh.write(json.dumps(header) + "\n")
        for record in self._log:
            fh.write(json.dumps(record) + "\n")

    @classmethod
    def replay(cls, lines: Iterable[str], store: Optional[BlobStore] = None) -> "Ledger":
        """Rebuild a ledger from an exported log; inverse of `export_log`."""
        records = (json.loads(line) for line in lines if line.strip())
        header = next(records, None)
        if header is None or header.get("kind") != "params":
            raise ValueError("log does not start with a params record")
        header.pop("kind")
        ledger = cls(EconomicParams.from_record(header), store=store)
        for record in records:
            ledger._apply(record)
        return ledger

    def _apply(self, record: Mapping) -> None:
        kind = record["kind"]
        if kind == "register":
            self.register_account(record["identity"])
        elif kind == "post":
            self.post_paper(record["author"], record["title"], record["keywords"],
                            record["content"], record["citations"])
        elif kind == "review":
            comment = record["comment"] or None
            self.submit_review(record["reviewer"], record["paper"],
                               Fraction(record["z"]), comment)
        elif kind == "score":
            self.submit_reader_score(record["reader"], record["review"],
                                     Fraction(record["value"]))
        elif kind == "seal":
            self.seal_block(record["miner"])
        else:
            raise ValueError(f"unknown log record kind {kind!r}")

    def state_digest(self) -> str:
        """Digest of the full economic state; equal digests mean equal states."""
        state = {
            "params": self.params.to_record(),
            "accounts": {
                a.address: [a.identity, a.balance] for a in self.accounts.values()
            },
            "papers": {
                p.id: [p.author, p.title, p.keywords, p.content_addr,
                       list(p.citations), str(p.score), p.published_at]
                for p in self.papers.values()
            },
            "reviews": {
                r.id: [r.paper, r.reviewer, str(r.z_score), r.comment_addr,
                       [[reader, str(v)] for reader, v in r.reader_scores],
                       str(r.effective_score), r.recorded_at, r.recording_miner]
                for r in self.reviews.values()
            },
            "blocks": [[b.height, b.miner, list(map(list, b.transactions))]
                       for b in self.blocks],
            "pool": [self.pool.balance, self.pool.previous_balance],
            "minted": self.minted,
            "burned": self.burned,
        }
        blob = json.dumps(state, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()
