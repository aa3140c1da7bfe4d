"""Selects the compiled BPE kernels when built, else the pure-Python ones.

Set ``SEQMTL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _bpe_fallback as fallback

try:
    if os.environ.get("SEQMTL_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from .. import _bpe_kernels as _impl
    COMPILED = True
except ImportError:
    _impl = fallback
    COMPILED = False

count_pairs = _impl.count_pairs
merge_pair = _impl.merge_pair

__all__ = ["COMPILED", "count_pairs", "fallback", "merge_pair"]
