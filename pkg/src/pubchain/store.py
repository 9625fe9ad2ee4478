"""Content-addressed blob store backing paper and review payloads.

The ledger records only content addresses; the bytes themselves (manuscripts,
review comments) live here. An address is the SHA-256 digest of the blob in
lowercase hex, so storage is deduplicating and every read can be verified
against the address it was requested under.

On-disk layout fans blobs out by the first two hex characters of the digest:

    <root>/ab/ab12...ef

Writes go through a temporary file in the same directory followed by an
atomic rename, so concurrent writers of the same blob are benign: both end up
installing identical bytes under the same name.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyBlob, IntegrityFailure, NotFound

_HEX_DIGITS = set("0123456789abcdef")
_DIGEST_LEN = 64  # 256-bit digest in hex


@dataclass(frozen=True)
class ContentAddress:
    """A 256-bit content digest, rendered as 64 lowercase hex characters."""

    digest: str

    def __post_init__(self):
        if len(self.digest) != _DIGEST_LEN or not set(self.digest) <= _HEX_DIGITS:
            raise ValueError(f"not a lowercase 256-bit hex digest: {self.digest!r}")

    @classmethod
    def of(cls, data: bytes) -> "ContentAddress":
        return cls(hashlib.sha256(data).hexdigest())

    def __str__(self) -> str:
        return self.digest


class BlobStore:
    """Directory-of-files blob store keyed by content address."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, addr: ContentAddress) -> Path:
        return self.root / addr.digest[:2] / addr.digest

    def put(self, data: bytes) -> ContentAddress:
        """Store a blob and return its address. Idempotent for equal bytes."""
        if not data:
            raise EmptyBlob("refusing to store an empty blob")
        addr = ContentAddress.of(data)
        path = self._path(addr)
        if path.exists():
            return addr
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except FileNotFoundError:
                pass
            raise
        return addr

    def get(self, addr: ContentAddress) -> bytes:
        """Fetch a blob, verifying its bytes still match the address."""
        path = self._path(addr)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise NotFound(f"no blob for {addr.digest}") from None
        actual = hashlib.sha256(data).hexdigest()
        if actual != addr.digest:
            raise IntegrityFailure(
                f"blob {addr.digest} hashes to {actual}; stored bytes are corrupt"
            )
        return data

    def exists(self, addr: ContentAddress) -> bool:
        return self._path(addr).exists()
