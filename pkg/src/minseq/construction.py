"""The counterexample sequence over the square and the toy interval model.

The counterexample starts with the three triangle corners and continues
with the 2-Toeplitz sequence over the corner triples, each triple spelled
out as three square letters.  Its head block never recurs (the later
3-blocks keep a fixed distance from it), yet every continuous image in
[0, 1] of the sequence is minimal.

The toy model prepends an arbitrary value of [0, 1] to the 2-Toeplitz
sequence of the rationals; recurrence of the head is certified by explicit
shifts whose distance interval is evaluated lazily, so the certifying
shift may be astronomically large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .metric import Block, Point2, SpaceMismatch, TailInterval, UnitValue, dbar_truncated
from .symbolic import LazySequence, RecurrenceReport, shift, witness_check
from .toeplitz import (
    edge_triple,
    enumerate_rationals,
    rational_floats,
    rational_sequence,
    triple_sequence,
    two_adic_level,
    two_adic_levels,
)


class SearchExhausted(RuntimeError):
    """A density-backed search ran out of budget (raise the budget)."""


HEAD_LETTERS = (Point2(0, 0), Point2(1, 0), Point2(0, 1))
HEAD_BLOCK = Block(HEAD_LETTERS, "point2")

#: Distance every later 3-block keeps from the head block.
HEAD_SEPARATION_BOUND = 0.125


def concat(head: Block, tail: LazySequence) -> LazySequence:
    """Prepend a finite block to a sequence."""
    if head.space_tag != tail.space_tag:
        raise SpaceMismatch(
            f"head lives in {head.space_tag!r}, tail in {tail.space_tag!r}"
        )
    t = len(head)
    letters = head.letters

    def term_rule(j):
        return letters[j - 1] if j <= t else tail.term(j - t)

    vec = None
    if tail.vector_rule is not None:
        head_rows = head.to_float_rows()
        tail_vec = tail.vector_rule

        def vec(start, count):
            if start > t:
                return tail_vec(start - t, count)
            n_head = min(count, t - start + 1)
            parts = [head_rows[start - 1 : start - 1 + n_head]]
            if count > n_head:
                parts.append(tail_vec(1, count - n_head))
            return np.concatenate(parts, axis=0)

    return LazySequence(
        term_rule=term_rule,
        space_tag=tail.space_tag,
        description=f"{head!r} * {tail.description or 'seq'}"[:120],
        vector_rule=vec,
    )


def expand_triples(s: LazySequence) -> LazySequence:
    """Spell a sequence of corner triples out as square letters, 3 per triple."""
    if s.space_tag != "triple":
        raise SpaceMismatch("expand_triples needs a triple sequence")

    def term_rule(j):
        triple = s.term((j + 2) // 3)
        return triple.points()[(j - 1) % 3]

    vec = None
    if s.vector_rule is not None:
        base_vec = s.vector_rule

        def vec(start, count):
            k0 = (start + 2) // 3
            k1 = (start + count + 1) // 3
            rows = base_vec(k0, k1 - k0 + 1).reshape(-1, 2)
            offset = start - (3 * (k0 - 1) + 1)
            return rows[offset : offset + count]

    return LazySequence(
        term_rule=term_rule,
        space_tag="point2",
        description=f"expand({s.description or 'triples'})",
        vector_rule=vec,
    )


def build_counterexample() -> LazySequence:
    """Corner head plus the expanded triple sequence (the generic pipeline)."""
    return concat(HEAD_BLOCK, expand_triples(triple_sequence()))


def build_counterexample_direct() -> LazySequence:
    """Same sequence by direct index arithmetic, for cross-checking.

    Term j for j > 3 is component ((j-4) mod 3) of the triple at level
    two_adic_level(ceil((j-3)/3)).
    """

    def term_rule(j):
        if j <= 3:
            return HEAD_LETTERS[j - 1]
        k = (j - 1) // 3
        return edge_triple(two_adic_level(k)).points()[(j - 4) % 3]

    def vector_rule(start, count):
        from .toeplitz import _triple_float_table

        js = np.arange(start, start + count, dtype=np.int64)
        out = np.empty((count, 2), dtype=np.float64)
        head_mask = js <= 3
        if head_mask.any():
            head_rows = HEAD_BLOCK.to_float_rows()
            out[head_mask] = head_rows[js[head_mask] - 1]
        tail_mask = ~head_mask
        if tail_mask.any():
            jt = js[tail_mask]
            levels = two_adic_levels((jt - 1) // 3)
            comps = (jt - 4) % 3
            table = _triple_float_table(int(levels.max())).reshape(-1, 3, 2)
            out[tail_mask] = table[levels, comps]
        return out

    return LazySequence(
        term_rule=term_rule,
        space_tag="point2",
        description="corner head * expanded triple sequence (direct indexing)",
        vector_rule=vector_rule,
    )


def head_separation_scan(prefix_len: int) -> RecurrenceReport:
    """Distance of every later 3-block from the head block.

    Scans starts 2..prefix_len-2 and reports the minimum and its argmin;
    verdict is ``witness-found`` iff the minimum stays above 1/8 (minus
    the usual slack), which certifies the head block never recurs within
    the prefix.
    """
    if prefix_len < 6:
        raise ValueError("need a prefix of at least 6 letters")
    seq = build_counterexample()
    return witness_check(seq, HEAD_BLOCK, HEAD_SEPARATION_BOUND, 2, prefix_len - 1)


def build_toy(c: Union[int, float, Fraction]) -> LazySequence:
    """The toy sequence: c followed by the rational 2-Toeplitz sequence."""
    return concat(Block((UnitValue(c),), "unit"), rational_sequence())


@dataclass(frozen=True)
class ToyCheckResult:
    """Certificate that the toy sequence's head block recurs.

    ``shift_used`` realigns the sequence so its first letter is within
    epsilon of the head and the next ``matched_run`` letters agree exactly;
    ``dbar_bound`` rigorously encloses the distance between the shifted
    and the original sequence.
    """

    head_value: Fraction
    level: int
    shift_used: int
    matched_run: int
    dbar_bound: TailInterval
    epsilon: float
    passed: bool


def toy_minimality_check(
    c: Union[int, float, Fraction], epsilon: float, search_len: int
) -> ToyCheckResult:
    """Search for a shift bringing the toy sequence within 2*epsilon of itself.

    Candidate shifts are parametrized by 2-adic level: shifting by
    2**(level-1) puts the enumeration value of that level at the front,
    followed by 2**(level-1) - 1 exactly matching letters.  The first
    ``search_len`` levels are examined; the first value within epsilon of c
    whose certified upper bound beats 2*epsilon wins (when none does, the
    qualifying value with the smallest bound is reported as evidence).
    The winning bound is re-verified against the actual sequences.
    """
    if not 0 <= c <= 1:
        raise ValueError("c must lie in [0, 1]")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if search_len < 1:
        raise ValueError("search_len must be >= 1")
    values = rational_floats(search_len)
    diffs = np.abs(values - float(c))
    # truncation depth for level l is min(64, 2**(l-1)); constant from level 7 on
    tails = np.full(search_len, math.ldexp(1.0, -64))
    for idx in range(min(7, search_len)):
        tails[idx] = math.ldexp(1.0, -min(64, 1 << idx))
    upper = 0.5 * diffs + tails
    qualifying = np.nonzero(diffs < epsilon)[0]
    if qualifying.size == 0:
        raise SearchExhausted(
            f"no enumeration value within {epsilon} of {c} in the first "
            f"{search_len} levels; raise search_len"
        )
    certifying = qualifying[upper[qualifying] < 2 * epsilon]
    if certifying.size:
        level = int(certifying[0]) + 1
    else:
        level = int(qualifying[np.argmin(upper[qualifying])]) + 1
    shift_used = 1 << (level - 1)
    depth = min(64, shift_used)
    toy = build_toy(c)
    bound = dbar_truncated(shift(toy, shift_used), toy, depth)
    return ToyCheckResult(
        head_value=enumerate_rationals(level),
        level=level,
        shift_used=shift_used,
        matched_run=shift_used - 1,
        dbar_bound=bound,
        epsilon=float(epsilon),
        passed=bound.hi < 2 * epsilon,
    )
