"""Exception taxonomy shared across the package.

Every domain failure raises a named exception so callers can distinguish
validation outcomes without string matching. Exceptions are grouped by the
module that raises them; all inherit from PubChainError.
"""


class PubChainError(Exception):
    """Base class for all package-specific failures."""


# ---------------------------------------------------------------------------
# ledger


class LedgerError(PubChainError):
    """Base class for ledger validation failures."""


class UnknownAccount(LedgerError):
    """An operation referenced an address that was never registered."""


class DuplicateIdentity(LedgerError):
    """register_account was called twice with the same identity string."""


class InsufficientBalance(LedgerError):
    """The author cannot cover the posting fee."""


class DuplicatePaper(LedgerError):
    """A paper with the same (title, content address) already exists."""


class UnknownPaper(LedgerError):
    """The referenced paper id is not on the ledger."""


class DuplicateReview(LedgerError):
    """The reviewer already reviewed this paper."""


class SelfReview(LedgerError):
    """The paper's author tried to review their own paper."""


class ConflictOfInterest(LedgerError):
    """A reviewer of the paper tried to score a review of the same paper."""


class FloodingLimitExceeded(LedgerError):
    """The reader hit the per-paper cap on scored reviews."""


class DuplicateScore(LedgerError):
    """The reader already scored this review."""


class UnknownReview(LedgerError):
    """The referenced review id is not on the ledger."""


class InvariantViolation(PubChainError):
    """An internal accounting invariant failed; state is suspect."""


# ---------------------------------------------------------------------------
# store


class StoreError(PubChainError):
    """Base class for blob-store failures."""


class EmptyBlob(StoreError):
    """put() was called with zero bytes."""


class NotFound(StoreError):
    """No blob exists for the given content address."""


class IntegrityFailure(StoreError):
    """Stored bytes no longer hash to their content address."""


# ---------------------------------------------------------------------------
# scoring


class EmptyInput(PubChainError):
    """A scoring aggregate was asked for on an empty sequence."""


# ---------------------------------------------------------------------------
# adversary / harness


class ConfigError(PubChainError):
    """An adversary or sweep configuration is inconsistent."""


class ScenarioParseError(PubChainError):
    """A scripted economy scenario file failed to parse.

    Carries the offending line number for error messages.
    """

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
