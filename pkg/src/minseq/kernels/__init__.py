"""Scan kernels with a compiled fast path.

The Cython extension ``_scan_core`` is preferred when it was built; the
NumPy module ``fallback`` implements the same contract and is selected
automatically otherwise.  Set ``MINSEQ_FORCE_FALLBACK=1`` to skip the
extension (used by the benchmark and the cross-checking tests).
"""

import os

import numpy as np

from . import fallback

if os.environ.get("MINSEQ_FORCE_FALLBACK") == "1":
    _impl = fallback
    BACKEND = "python"
else:
    try:
        from . import _scan_core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = fallback
        BACKEND = "python"


def _as_rows(a: np.ndarray, name: str) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array of letter rows")
    return a


def hits_scan(prefix: np.ndarray, target: np.ndarray, eps: float) -> np.ndarray:
    """0-based hit positions of ``target`` in ``prefix`` (see fallback docs)."""
    prefix = _as_rows(prefix, "prefix")
    target = _as_rows(target, "target")
    if prefix.shape[1] != target.shape[1]:
        raise ValueError("prefix and target letter widths differ")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return np.asarray(_impl.hits_scan(prefix, target, float(eps)), dtype=np.int64)


def min_scan(prefix: np.ndarray, target: np.ndarray, skip: int = -1):
    """(min block distance, first 0-based argmin), optionally skipping one position."""
    prefix = _as_rows(prefix, "prefix")
    target = _as_rows(target, "target")
    if prefix.shape[1] != target.shape[1]:
        raise ValueError("prefix and target letter widths differ")
    val, pos = _impl.min_scan(prefix, target, int(skip))
    return float(val), int(pos)
