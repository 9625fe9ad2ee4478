"""Hot-loop kernels with a compiled core and a numpy fallback.

The only operation hot enough to matter is the batched trimmed mean over
ragged reader-score arrays (one sort per review, hundreds of thousands of
values per sweep point). `_core` is a Cython extension built at install
time; when it is missing (pure-Python install) or PUBCHAIN_PURE_PYTHON is
set, the numpy implementation in `fallback` is used instead. Both expose
the same functions and the test suite checks them against each other.
"""

import os

if os.environ.get("PUBCHAIN_PURE_PYTHON"):
    from . import fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import fallback as _impl

BACKEND = _impl.BACKEND
trimmed_means = _impl.trimmed_means

__all__ = ["BACKEND", "trimmed_means"]
