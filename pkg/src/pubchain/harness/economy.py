"""Scripted end-to-end economy runs.

A scenario file drives a fresh ledger through registrations, posts, reviews,
reader scores, and seals, one action per line:

    register <name> [<name> ...]
    post <author> <paper> [cites <paper> ...]
    review <reviewer> <paper> <z>
    score <reader> <paper> <reviewer> <value>
    seal <miner>

Names are account identities; paper labels map to posted papers; a review is
addressed by (paper, reviewer). Blank lines and `#` comments are skipped.
Malformed lines and rule violations raise ScenarioParseError carrying the
line number; conservation failures surface as InvariantViolation untouched.

The run yields the per-block settlement report and the final balances, both
as CSV with account columns carrying the scenario's human-readable names.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass
from typing import IO, Iterable, Optional

from ..errors import InvariantViolation, LedgerError, ScenarioParseError
from ..ledger import Ledger
from ..store import BlobStore
from ..tokenomics import EconomicParams
from ..units import format_tokens


@dataclass
class ScenarioResult:
    ledger: Ledger
    addresses: dict  # scenario name -> ledger address
    papers: dict  # paper label -> paper id

    def label(self, address: str) -> str:
        for name, addr in self.addresses.items():
            if addr == address:
                return name
        return address  # pool rows and anything unnamed pass through


def _fail(line_no: int, message: str) -> ScenarioParseError:
    return ScenarioParseError(message, line_no)


def run_scenario(lines: Iterable[str], params: Optional[EconomicParams] = None,
                 store: Optional[BlobStore] = None) -> ScenarioResult:
    """Execute a scenario; see the module docstring for the line grammar."""
    ledger = Ledger(params, store=store)
    addresses: dict[str, str] = {}
    papers: dict[str, str] = {}
    reviews: dict[tuple, str] = {}  # (paper label, reviewer name) -> review id

    def address(line_no: int, name: str) -> str:
        try:
            return addresses[name]
        except KeyError:
            raise _fail(line_no, f"unknown account {name!r}") from None

    def paper_id(line_no: int, label: str) -> str:
        try:
            return papers[label]
        except KeyError:
            raise _fail(line_no, f"unknown paper {label!r}") from None

    for line_no, raw in enumerate(lines, start=1):
        try:
            words = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise _fail(line_no, str(exc)) from None
        if not words:
            continue
        command, args = words[0], words[1:]
        try:
            if command == "register":
                if not args:
                    raise _fail(line_no, "register needs at least one name")
                for name in args:
                    addresses[name] = ledger.register_account(name).address
            elif command == "post":
                if len(args) < 2 or (len(args) > 2 and args[2] != "cites"):
                    raise _fail(line_no, "expected: post <author> <paper> [cites <paper> ...]")
                author, label = args[0], args[1]
                cited = [paper_id(line_no, c) for c in args[3:]]
                if label in papers:
                    raise _fail(line_no, f"paper label {label!r} reused")
                paper = ledger.post_paper(
                    address(line_no, author), title=label, keywords="",
                    content=f"manuscript {label}".encode(), citations=cited,
                )
                papers[label] = paper.id
            elif command == "review":
                if len(args) != 3:
                    raise _fail(line_no, "expected: review <reviewer> <paper> <z>")
                reviewer, label, z = args
                review = ledger.submit_review(
                    address(line_no, reviewer), paper_id(line_no, label), _number(line_no, z)
                )
                reviews[(label, reviewer)] = review.id
            elif command == "score":
                if len(args) != 4:
                    raise _fail(line_no, "expected: score <reader> <paper> <reviewer> <value>")
                reader, label, reviewer, value = args
                try:
                    review_id = reviews[(label, reviewer)]
                except KeyError:
                    raise _fail(line_no, f"no review of {label!r} by {reviewer!r}") from None
                ledger.submit_reader_score(
                    address(line_no, reader), review_id, _number(line_no, value)
                )
            elif command == "seal":
                if len(args) != 1:
                    raise _fail(line_no, "expected: seal <miner>")
                ledger.seal_block(address(line_no, args[0]))
            else:
                raise _fail(line_no, f"unknown command {command!r}")
        except (LedgerError, ValueError) as exc:
            raise _fail(line_no, str(exc)) from exc
        except InvariantViolation:
            raise
    return ScenarioResult(ledger=ledger, addresses=addresses, papers=papers)


def _number(line_no: int, text: str) -> str:
    try:
        float(text)
    except ValueError:
        raise _fail(line_no, f"not a number: {text!r}") from None
    return text  # the ledger parses it exactly; float() only vets the syntax


def write_settlement_csv(result: ScenarioResult, fh: IO[str]) -> None:
    """Per-block settlement rows, amounts in signed fixed 8-decimal tokens."""
    fh.write("block,account,reason,amount\n")
    for entry in result.ledger.settlement_entries():
        sign = "-" if entry.amount < 0 else ""
        fh.write(
            f"{entry.block},{result.label(entry.account)},{entry.reason},"
            f"{sign}{format_tokens(abs(entry.amount))}\n"
        )


def write_balances_csv(result: ScenarioResult, fh: IO[str]) -> None:
    """Final balances in registration order, plus pool and burned lines."""
    fh.write("account,balance\n")
    ledger = result.ledger
    for name, addr in result.addresses.items():
        fh.write(f"{name},{format_tokens(ledger.accounts[addr].balance)}\n")
    fh.write(f"pool,{format_tokens(ledger.pool.balance)}\n")
    fh.write(f"burned,{format_tokens(ledger.burned)}\n")
