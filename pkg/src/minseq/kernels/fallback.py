"""NumPy implementations of the scan kernels.

These are the reference semantics; the compiled module in
``_scan_core.pyx`` must stay result-identical:

* per-letter distance is Euclidean over the row (plain ``abs`` when the
  row has a single column),
* a block distance is ``sum_t dist(t) / 2**(t+1)`` accumulated with t
  ascending,
* a position is a hit when that sum is strictly below ``eps``; ``eps == 0``
  selects exact letter equality instead (a strict comparison against zero
  would never fire).

Positions returned by the kernels are 0-based offsets into ``prefix``.
"""

import numpy as np


def _block_sums(prefix: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Weighted block distance from every start position to the target."""
    n, dim = prefix.shape
    length = target.shape[0]
    m = n - length + 1
    acc = np.zeros(m, dtype=np.float64)
    w = 0.5
    for t in range(length):
        rows = prefix[t : t + m]
        if dim == 1:
            dist = np.abs(rows[:, 0] - target[t, 0])
        else:
            d = rows[:, 0] - target[t, 0]
            sq = d * d
            for c in range(1, dim):
                d = rows[:, c] - target[t, c]
                sq = sq + d * d
            dist = np.sqrt(sq)
        acc += w * dist
        w *= 0.5
    return acc


def hits_scan(prefix: np.ndarray, target: np.ndarray, eps: float) -> np.ndarray:
    """0-based start positions whose block matches the target.

    ``eps > 0``: block distance strictly below eps.
    ``eps == 0``: exact equality of every float component.
    """
    n, dim = prefix.shape
    length = target.shape[0]
    m = n - length + 1
    if m <= 0:
        return np.empty(0, dtype=np.int64)
    if eps == 0.0:
        cand = np.arange(m, dtype=np.int64)
        for t in range(length):
            rows = prefix[cand + t]
            keep = np.all(rows == target[t], axis=1)
            cand = cand[keep]
            if cand.size == 0:
                break
        return cand
    return np.nonzero(_block_sums(prefix, target) < eps)[0].astype(np.int64)


def min_scan(prefix: np.ndarray, target: np.ndarray, skip: int = -1):
    """Minimum block distance to the target over all start positions.

    ``skip`` excludes one 0-based start position (useful to drop a trivial
    self match).  Returns ``(min_value, argmin_position)``; the argmin is
    the first position attaining the minimum.  Returns ``(inf, -1)`` when
    no position remains.
    """
    n = prefix.shape[0]
    length = target.shape[0]
    m = n - length + 1
    if m <= 0 or (m == 1 and skip == 0):
        return float("inf"), -1
    acc = _block_sums(prefix, target)
    if 0 <= skip < m:
        acc[skip] = np.inf
    pos = int(np.argmin(acc))
    return float(acc[pos]), pos
