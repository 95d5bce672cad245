"""Lazy infinite sequences, the shift map, and finite-prefix recurrence scans.

A sequence is a deterministic rule from 1-based index to letter.  Indices
are plain Python integers, so terms astronomically deep into a sequence
(far beyond anything a scan could materialize) can still be evaluated one
at a time.  Bulk scans materialize float letter rows chunk by chunk; a
sequence may carry an optional vectorized rule to make that fast.

A finite prefix can certify non-minimality (a window avoiding a target
block) or accumulate evidence toward minimality (bounded gaps so far);
it can never prove minimality.  The report verdicts keep that asymmetry
explicit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from . import kernels
from .metric import BOUND_SLACK, Block, SpaceMismatch, space

#: Letters materialized per scan chunk.  Prefixes at most this long are
#: handled in one piece; longer prefixes are streamed.
CHUNK = 1 << 20

GAP_BOUND_HOLDS = "gap-bound-holds"
WITNESS_FOUND = "witness-found"
INCONCLUSIVE = "inconclusive"

UNBOUNDED_EVIDENCE = "unbounded-evidence"


def max_prefix_cap() -> int:
    """Memory cap on scanned prefixes, letters (env TOEPLITZ_MAX_PREFIX)."""
    raw = os.environ.get("TOEPLITZ_MAX_PREFIX")
    if raw is None:
        return 1 << 24
    cap = int(raw)
    if cap < 1:
        raise ValueError("TOEPLITZ_MAX_PREFIX must be positive")
    return cap


@dataclass(frozen=True)
class LazySequence:
    """An infinite sequence given by an index -> letter rule.

    ``term_rule`` must be total and deterministic on indices >= 1.
    ``vector_rule(start, count)``, when present, returns the float rows of
    terms start..start+count-1 as a ``(count, dim)`` array and must agree
    with ``term_rule`` letter for letter.
    """

    term_rule: Callable[[int], object]
    space_tag: str
    description: str = ""
    vector_rule: Optional[Callable[[int, int], np.ndarray]] = None

    def term(self, j: int):
        if j < 1:
            raise ValueError(f"index must be >= 1, got {j}")
        return self.term_rule(j)


def shift(s: LazySequence, n: int) -> LazySequence:
    """Drop the first n terms: term j of the result is term j+n of s."""
    if n < 0:
        raise ValueError("shift amount must be >= 0")
    if n == 0:
        return s
    vec = None
    if s.vector_rule is not None:
        base_vec = s.vector_rule
        vec = lambda start, count: base_vec(start + n, count)
    # huge offsets (power-of-two shifts can be astronomically deep) would
    # make a decimal label unwieldy
    label = str(n) if n.bit_length() <= 64 else f"~2^{n.bit_length() - 1}"
    return LazySequence(
        term_rule=lambda j, _base=s.term_rule: _base(j + n),
        space_tag=s.space_tag,
        description=f"shift({s.description or 'seq'}, {label})",
        vector_rule=vec,
    )


def block_at(s: LazySequence, start: int, length: int) -> Block:
    """The block (s_start, ..., s_{start+length-1})."""
    if start < 1:
        raise ValueError("start must be >= 1")
    if length < 1:
        raise ValueError("length must be >= 1")
    return Block(tuple(s.term(start + i) for i in range(length)), s.space_tag)


def materialize_rows(s: LazySequence, start: int, count: int) -> np.ndarray:
    """Float letter rows for terms start..start+count-1."""
    if s.vector_rule is not None:
        rows = np.ascontiguousarray(s.vector_rule(start, count), dtype=np.float64)
        if rows.shape[0] != count:
            raise RuntimeError("vector rule returned the wrong number of rows")
        return rows
    dim = space(s.space_tag).dim
    rows = np.empty((count, dim), dtype=np.float64)
    for i in range(count):
        rows[i] = s.term(start + i).to_floats()
    return rows


@dataclass(frozen=True)
class RecurrenceReport:
    """Outcome of a gap scan or a witness check.

    ``max_gap_found`` counts boundary gaps: a virtual hit sits just before
    the first scanned position and just after the last one, so a long empty
    stretch at either edge of the prefix still shows up.
    """

    target: Block
    epsilon: float
    prefix_len: int
    verdict: str
    n_hits: int
    max_gap_found: Union[int, str]
    first_hit: Optional[int] = None
    last_hit: Optional[int] = None
    first_violation_window: Optional[Tuple[int, int]] = None
    min_distance: Optional[float] = None
    argmin: Optional[int] = None


def _check_scan_args(s: LazySequence, target: Block, prefix_len: int):
    if target.space_tag != s.space_tag:
        raise SpaceMismatch(
            f"target lives in {target.space_tag!r}, sequence in {s.space_tag!r}"
        )
    if prefix_len < len(target):
        raise ValueError("prefix is shorter than the target block")
    cap = max_prefix_cap()
    if prefix_len > cap:
        raise ValueError(
            f"prefix of {prefix_len} letters exceeds TOEPLITZ_MAX_PREFIX ({cap})"
        )


def scan_hit_positions(
    s: LazySequence, target: Block, epsilon: float, prefix_len: int
) -> np.ndarray:
    """1-based start positions in [1, prefix_len-len(target)+1] that hit.

    A position hits when the block of len(target) letters starting there is
    at block distance < epsilon from the target; epsilon = 0 means exact
    letter equality.  The prefix is streamed in chunks of CHUNK letters.
    """
    _check_scan_args(s, target, prefix_len)
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    length = len(target)
    tgt = target.to_float_rows()
    last_start = prefix_len - length + 1
    found = []
    start = 1
    while start <= last_start:
        n_starts = min(CHUNK, last_start - start + 1)
        rows = materialize_rows(s, start, n_starts + length - 1)
        pos = kernels.hits_scan(rows, tgt, epsilon)
        if pos.size:
            found.append(pos + start)
        start += n_starts
    if not found:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(found)


def gaps_from_hits(hits: np.ndarray, last_start: int):
    """(max_gap, widest hitless run of start positions) with boundary gaps.

    Virtual hits at position 0 and last_start+1 bound the run; the widest
    run is returned as (first_missing_start, n_missing_starts) or None.
    """
    if hits.size == 0:
        return None, (1, last_start)
    padded = np.concatenate(([0], hits, [last_start + 1]))
    diffs = np.diff(padded)
    max_gap = int(diffs.max())
    widest = int(np.argmax(diffs))
    run_start = int(padded[widest]) + 1
    run_len = int(diffs[widest]) - 1
    window = (run_start, run_len) if run_len > 0 else None
    return max_gap, window


def recurrence_gap_scan(
    s: LazySequence, target: Block, epsilon: float, prefix_len: int
) -> RecurrenceReport:
    """Scan a prefix for near-occurrences of a block and measure gaps.

    Verdict is ``gap-bound-holds`` when at least two hits exist (the scan
    always covers every start position, so the gap data is complete over
    the prefix); otherwise ``inconclusive``, with the widest hitless
    stretch reported as a violation window in terms (start, length).
    """
    hits = scan_hit_positions(s, target, epsilon, prefix_len)
    length = len(target)
    last_start = prefix_len - length + 1
    max_gap, window = gaps_from_hits(hits, last_start)
    if hits.size >= 2:
        return RecurrenceReport(
            target=target,
            epsilon=epsilon,
            prefix_len=prefix_len,
            verdict=GAP_BOUND_HOLDS,
            n_hits=int(hits.size),
            max_gap_found=max_gap,
            first_hit=int(hits[0]),
            last_hit=int(hits[-1]),
        )
    term_window = None
    if window is not None:
        term_window = (window[0], window[1] + length - 1)
    return RecurrenceReport(
        target=target,
        epsilon=epsilon,
        prefix_len=prefix_len,
        verdict=INCONCLUSIVE,
        n_hits=int(hits.size),
        max_gap_found=UNBOUNDED_EVIDENCE if hits.size == 0 else max_gap,
        first_hit=int(hits[0]) if hits.size else None,
        last_hit=int(hits[-1]) if hits.size else None,
        first_violation_window=term_window,
    )


def window_min_distance(
    s: LazySequence, target: Block, window_start: int, window_len: int
):
    """Min block distance to the target over all starts inside the window.

    Returns (min_distance, 1-based argmin position); streams in chunks.
    """
    if window_start < 1:
        raise ValueError("window start must be >= 1")
    length = len(target)
    if window_len < length:
        raise ValueError("window is shorter than the target block")
    cap = max_prefix_cap()
    if window_len > cap:
        raise ValueError(
            f"window of {window_len} letters exceeds TOEPLITZ_MAX_PREFIX ({cap})"
        )
    tgt = target.to_float_rows()
    last_start = window_start + window_len - length
    best = float("inf")
    best_pos = -1
    start = window_start
    while start <= last_start:
        n_starts = min(CHUNK, last_start - start + 1)
        rows = materialize_rows(s, start, n_starts + length - 1)
        val, pos = kernels.min_scan(rows, tgt)
        if val < best:
            best = val
            best_pos = start + pos
        start += n_starts
    return best, best_pos


def witness_check(
    s: LazySequence,
    target: Block,
    epsilon: float,
    window_start: int,
    window_len: int,
) -> RecurrenceReport:
    """Check that a window contains no near-copy of the target block.

    Verdict ``witness-found`` means every sub-block of the window keeps
    block distance >= epsilon - BOUND_SLACK from the target; such windows
    at arbitrarily large lengths are the certificate of non-minimality.
    """
    if target.space_tag != s.space_tag:
        raise SpaceMismatch(
            f"target lives in {target.space_tag!r}, sequence in {s.space_tag!r}"
        )
    if epsilon <= 0:
        raise ValueError("witness checks need epsilon > 0")
    best, best_pos = window_min_distance(s, target, window_start, window_len)
    found = best >= epsilon - BOUND_SLACK
    return RecurrenceReport(
        target=target,
        epsilon=epsilon,
        prefix_len=window_start + window_len - 1,
        verdict=WITNESS_FOUND if found else INCONCLUSIVE,
        n_hits=0 if found else 1,
        max_gap_found=window_len if found else 0,
        first_violation_window=(window_start, window_len) if found else None,
        min_distance=best,
        argmin=best_pos,
    )
