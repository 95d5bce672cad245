"""The 2-Toeplitz construction and the deterministic enumerations feeding it.

Index j of a 2-Toeplitz sequence carries the p-th item of the underlying
enumeration, where p is the 2-adic level of j (trailing zero bits plus
one, i.e. j = 2**(p-1) mod 2**p).  Every item therefore recurs with a gap
of exactly 2**(p-1) starts, which is what makes these sequences minimal
regardless of the enumeration.

Enumerations are 1-based and fixed once and for all:

* rationals of [0, 1]: 0, 1, then reduced p/q by denominator then
  numerator (1/2, 1/3, 2/3, 1/4, 3/4, ...),
* interior edge points: the same enumeration with the endpoints skipped,
* corner triples: the three edge families interleaved round robin, so the
  enumeration index of any triple is available in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import kernels
from .metric import Point2, UnitValue
from .symbolic import LazySequence

#: Levels above this would overflow the 64-bit window arithmetic used by
#: the scan bookkeeping.
MAX_LEVEL = 62


def two_adic_level(j: int) -> int:
    """The unique p with j = 2**(p-1) mod 2**p (trailing zeros + 1)."""
    if j < 1:
        raise ValueError(f"index must be >= 1, got {j}")
    return (j & -j).bit_length()


def two_adic_levels(js: np.ndarray) -> np.ndarray:
    """Vectorized two_adic_level for int64 indices."""
    low = js & -js
    # trailing zeros as a popcount keeps everything in integer arithmetic
    return np.bitwise_count(low - 1).astype(np.int64) + 1


@dataclass(frozen=True)
class Enumeration:
    """A deterministic total rule from 1-based index to letter."""

    item_rule: Callable[[int], object]
    space_tag: str
    description: str = ""

    def item(self, n: int):
        if n < 1:
            raise ValueError(f"enumeration index must be >= 1, got {n}")
        return self.item_rule(n)


def toeplitz_term(enum_: Enumeration, j: int):
    """Term j of the 2-Toeplitz sequence of the enumeration."""
    return enum_.item(two_adic_level(j))


def toeplitz_gap_bound(max_level: int) -> int:
    """Window length guaranteeing a full occurrence of any block whose
    letters all have 2-adic level <= max_level."""
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    if max_level > MAX_LEVEL:
        raise OverflowError(f"2**{max_level + 1} exceeds the supported range")
    return 1 << (max_level + 1)


# ---------------------------------------------------------------------------
# rationals of [0, 1]

_rationals: List[Fraction] = [Fraction(0), Fraction(1)]
_next_denominator = 2


def enumerate_rationals(n: int) -> Fraction:
    """The n-th rational of [0, 1]: 0, 1, then reduced fractions by
    denominator then numerator."""
    if n < 1:
        raise ValueError(f"enumeration index must be >= 1, got {n}")
    global _next_denominator
    while len(_rationals) < n:
        q = _next_denominator
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                _rationals.append(Fraction(p, q))
        _next_denominator += 1
    return _rationals[n - 1]


def rational_floats(count: int) -> np.ndarray:
    """Float values of the first ``count`` rationals."""
    enumerate_rationals(count)
    return np.array([float(f) for f in _rationals[:count]], dtype=np.float64)


def interior_rational(n: int) -> Fraction:
    """The n-th rational of the open interval (0, 1)."""
    return enumerate_rationals(n + 2)


# ---------------------------------------------------------------------------
# triangle edges and corner triples

class Edge(enum.Enum):
    """The three edges of the corner triangle (0,0), (1,0), (0,1)."""

    DIAGONAL = "diagonal"  # (1,0) -- (0,1)
    LEFT = "left"          # (0,0) -- (0,1)
    BOTTOM = "bottom"      # (0,0) -- (1,0)


CORNER_ORIGIN = Point2(0, 0)
CORNER_RIGHT = Point2(1, 0)
CORNER_TOP = Point2(0, 1)

#: Position of each edge family inside the round-robin triple enumeration.
_EDGE_OFFSET = {Edge.DIAGONAL: 1, Edge.LEFT: 2, Edge.BOTTOM: 3}


def edge_point(edge: Edge, n: int) -> Point2:
    """The n-th interior point of an edge (endpoints never returned)."""
    t = interior_rational(n)
    if edge is Edge.DIAGONAL:
        return Point2(1 - t, t)
    if edge is Edge.LEFT:
        return Point2(0, t)
    return Point2(t, 0)


@dataclass(frozen=True)
class EdgeTriple:
    """Three square points: one interior edge point plus the two corners
    that edge misses, in triangle order."""

    p1: Point2
    p2: Point2
    p3: Point2

    space_tag = "triple"

    def __post_init__(self):
        if self.edge() is None:
            raise ValueError(f"not a corner/edge triple: {self}")

    def edge(self) -> Optional[Edge]:
        def interior(p: Point2, e: Edge) -> bool:
            if e is Edge.DIAGONAL:
                return p.x + p.y == 1 and 0 < p.x < 1
            if e is Edge.LEFT:
                return p.x == 0 and 0 < p.y < 1
            return p.y == 0 and 0 < p.x < 1

        if interior(self.p1, Edge.DIAGONAL) and (self.p2, self.p3) == (CORNER_RIGHT, CORNER_TOP):
            return Edge.DIAGONAL
        if interior(self.p2, Edge.LEFT) and (self.p1, self.p3) == (CORNER_ORIGIN, CORNER_TOP):
            return Edge.LEFT
        if interior(self.p3, Edge.BOTTOM) and (self.p1, self.p2) == (CORNER_ORIGIN, CORNER_RIGHT):
            return Edge.BOTTOM
        return None

    def points(self) -> Tuple[Point2, Point2, Point2]:
        return (self.p1, self.p2, self.p3)

    def to_floats(self) -> Tuple[float, ...]:
        return self.p1.to_floats() + self.p2.to_floats() + self.p3.to_floats()


def triple_index(edge: Edge, m: int) -> int:
    """Enumeration index of the triple built from the m-th point of an edge."""
    if m < 1:
        raise ValueError("edge point index must be >= 1")
    return 3 * (m - 1) + _EDGE_OFFSET[edge]


def edge_triple(n: int) -> EdgeTriple:
    """The n-th corner triple (edge families interleaved round robin)."""
    if n < 1:
        raise ValueError(f"enumeration index must be >= 1, got {n}")
    m, off = divmod(n - 1, 3)
    m += 1
    if off == 0:
        return EdgeTriple(edge_point(Edge.DIAGONAL, m), CORNER_RIGHT, CORNER_TOP)
    if off == 1:
        return EdgeTriple(CORNER_ORIGIN, edge_point(Edge.LEFT, m), CORNER_TOP)
    return EdgeTriple(CORNER_ORIGIN, CORNER_RIGHT, edge_point(Edge.BOTTOM, m))


def triple_enumeration() -> Enumeration:
    return Enumeration(edge_triple, "triple", "corner triples, edges interleaved")


def rational_enumeration() -> Enumeration:
    return Enumeration(
        lambda n: UnitValue(enumerate_rationals(n)),
        "unit",
        "rationals of [0,1] by denominator",
    )


# ---------------------------------------------------------------------------
# 2-Toeplitz sequences with fast bulk materialization

def _triple_float_table(max_level: int) -> np.ndarray:
    table = np.empty((max_level + 1, 6), dtype=np.float64)
    for p in range(1, max_level + 1):
        table[p] = edge_triple(p).to_floats()
    return table


def _rational_float_table(max_level: int) -> np.ndarray:
    table = np.zeros(max_level + 1, dtype=np.float64)
    table[1:] = rational_floats(max_level)
    return table


def toeplitz_sequence(enum_: Enumeration) -> LazySequence:
    """The 2-Toeplitz sequence of an enumeration, as a lazy sequence.

    Sequences over the bundled enumerations get a vectorized rule backed
    by a per-level float table (levels stay below 64 for any prefix the
    scans can hold).
    """
    vector_rule = None
    if enum_.space_tag == "triple" and enum_.item_rule is edge_triple:
        def vector_rule(start, count):
            js = np.arange(start, start + count, dtype=np.int64)
            levels = two_adic_levels(js)
            return _triple_float_table(int(levels.max()))[levels]

    elif enum_.space_tag == "unit":
        def vector_rule(start, count):
            js = np.arange(start, start + count, dtype=np.int64)
            levels = two_adic_levels(js)
            table = np.empty(int(levels.max()) + 1, dtype=np.float64)
            for p in range(1, table.shape[0]):
                table[p] = float(enum_.item(p).v)
            return table[levels].reshape(-1, 1)

    return LazySequence(
        term_rule=lambda j: toeplitz_term(enum_, j),
        space_tag=enum_.space_tag,
        description=f"2-Toeplitz of {enum_.description or 'enumeration'}",
        vector_rule=vector_rule,
    )


def triple_sequence() -> LazySequence:
    """The 2-Toeplitz sequence over the corner triples."""
    return toeplitz_sequence(triple_enumeration())


def rational_sequence() -> LazySequence:
    """The 2-Toeplitz sequence over the rationals of [0, 1]."""
    return toeplitz_sequence(rational_enumeration())


# ---------------------------------------------------------------------------
# recurrence-window verification over a triple-sequence prefix

@dataclass(frozen=True)
class WindowViolation:
    block_start: int
    block_len: int
    max_level: int
    window_start: int


@dataclass(frozen=True)
class RecurrenceWindowReport:
    """Exhaustive check that every block recurs within its level window.

    ``blocks_covered`` counts every (start, length) pair examined;
    ``classes_scanned`` counts the distinct letter contents actually
    scanned (two blocks with identical letters trivially share their
    occurrence set, so each content is scanned once).
    """

    prefix_len: int
    max_block_len: int
    max_level: int
    blocks_covered: int
    classes_scanned: int
    violations: Tuple[WindowViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _window_violation(hits: np.ndarray, length: int, window: int, prefix_len: int):
    """First window of ``window`` terms without a full occurrence, or None.

    A window [w, w+window-1] inside the prefix contains a full occurrence
    iff some hit lies in [w, w+window-length].  With hits padded by
    sentinels, a violating w exists between consecutive hits iff their
    spacing exceeds window - length + 1, and at the edges iff the first
    hit starts too late / the last one ends too early.
    """
    room = window - length + 1
    if room < 1:
        return None  # degenerate: window cannot contain the block at all
    if hits.size == 0:
        return 1 if prefix_len >= window else None
    if int(hits[0]) > room and prefix_len >= window:
        return 1
    spacing = np.diff(hits)
    late = np.nonzero(spacing > room)[0]
    for idx in late:
        w = int(hits[idx]) + 1
        if w + window - 1 <= prefix_len:
            return w
    w = int(hits[-1]) + 1
    if w + window - 1 <= prefix_len:
        return w
    return None


def verify_recurrence_windows(
    prefix_len: int = 1 << 16,
    max_block_len: int = 32,
    max_level: int = 10,
) -> RecurrenceWindowReport:
    """Check the recurrence-window guarantee on a triple-sequence prefix.

    For every contiguous block of at most ``max_block_len`` letters whose
    letters all have 2-adic level i <= ``max_level``, every window of
    2**(i+1) consecutive terms of the prefix must contain a full exact
    occurrence of the block.
    """
    if max_block_len < 1 or prefix_len < max_block_len:
        raise ValueError("need prefix_len >= max_block_len >= 1")
    if max_level < 1 or max_level > MAX_LEVEL:
        raise ValueError(f"max_level must be in [1, {MAX_LEVEL}]")
    seq = triple_sequence()
    # letters for scanning, one extra block so trailing starts are complete
    from .symbolic import materialize_rows

    rows = materialize_rows(seq, 1, prefix_len)
    js = np.arange(1, prefix_len + 1, dtype=np.int64)
    levels = two_adic_levels(js).astype(np.uint8)
    level_bytes = levels.tobytes()

    seen: Dict[bytes, None] = {}
    violations: List[WindowViolation] = []
    blocks_covered = 0
    levels_list = levels.tolist()
    last_start = prefix_len  # block starts are 1-based

    for s in range(1, last_start + 1):
        running_max = 0
        max_len = min(max_block_len, prefix_len - s + 1)
        for length in range(1, max_len + 1):
            lvl = levels_list[s + length - 2]
            if lvl > running_max:
                running_max = lvl
            if running_max > max_level:
                break  # the max level only grows with the block
            blocks_covered += 1
            key = level_bytes[s - 1 : s - 1 + length]
            if key in seen:
                continue
            seen[key] = None
            target = rows[s - 1 : s - 1 + length]
            hits = kernels.hits_scan(rows, target, 0.0) + 1
            window = toeplitz_gap_bound(running_max)
            bad = _window_violation(hits, length, window, prefix_len)
            if bad is not None:
                violations.append(
                    WindowViolation(s, length, running_max, bad)
                )
    return RecurrenceWindowReport(
        prefix_len=prefix_len,
        max_block_len=max_block_len,
        max_level=max_level,
        blocks_covered=blocks_covered,
        classes_scanned=len(seen),
        violations=tuple(violations),
    )
