"""Metric primitives: letters, blocks, and the weighted block distance.

Letters live in one of three ambient spaces: the unit interval, the unit
square, or triples of square points (the alphabet of the corner-triple
sequence).  Letter coordinates are exact rationals wherever a sequence is
*constructed*, so equality tests never suffer float drift; derived points
(e.g. detector outputs) may carry float coordinates.  All distances are
double precision.

The distance between equal-length blocks is the weighted sum

    sum_i  d(x_i, y_i) / 2**i       (i = 1..n, ascending)

and the same sum truncated at depth K encloses the distance between two
infinite sequences in a rigorous interval of width diam/2**K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Tuple, Union

Coord = Union[int, Fraction, float]

#: Slack applied on the favorable side when comparing a computed value
#: against a claimed bound (a claimed ">= 1/8" passes iff the computed
#: value is >= 1/8 - BOUND_SLACK).
BOUND_SLACK = 1e-9


class SpaceMismatch(ValueError):
    """Two metric objects live in different ambient spaces."""


@dataclass(frozen=True)
class Space:
    """Descriptor of an ambient letter space."""

    tag: str
    dim: int
    diameter: float


SPACE_UNIT = Space("unit", 1, 1.0)
SPACE_POINT2 = Space("point2", 2, math.sqrt(2.0))
SPACE_TRIPLE = Space("triple", 6, math.sqrt(6.0))

_SPACES = {s.tag: s for s in (SPACE_UNIT, SPACE_POINT2, SPACE_TRIPLE)}


def space(tag: str) -> Space:
    try:
        return _SPACES[tag]
    except KeyError:
        raise SpaceMismatch(f"unknown space tag {tag!r}") from None


def _check_coord(v: Coord, name: str) -> Coord:
    if isinstance(v, bool) or not isinstance(v, (int, Fraction, float, Rational)):
        raise TypeError(f"{name} must be a rational or float, got {type(v).__name__}")
    if not 0 <= v <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
    if isinstance(v, (int, Rational)) and not isinstance(v, Fraction):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class Point2:
    """A point of the unit square.

    Constructed sequences always use exact rational coordinates, for which
    equality is exact rational equality.  Float coordinates are permitted
    for derived points (detector images and the like).
    """

    x: Coord
    y: Coord

    def __post_init__(self):
        object.__setattr__(self, "x", _check_coord(self.x, "x"))
        object.__setattr__(self, "y", _check_coord(self.y, "y"))

    space_tag = "point2"

    def to_floats(self) -> Tuple[float, ...]:
        return (float(self.x), float(self.y))


@dataclass(frozen=True)
class UnitValue:
    """A value of the unit interval (rational when constructed, often float
    when it comes out of a continuous map)."""

    v: Coord

    def __post_init__(self):
        object.__setattr__(self, "v", _check_coord(self.v, "v"))

    space_tag = "unit"

    def to_floats(self) -> Tuple[float, ...]:
        return (float(self.v),)


def letter_space(letter) -> Space:
    try:
        return space(letter.space_tag)
    except AttributeError:
        raise TypeError(f"{letter!r} is not a letter (no space_tag)") from None


def letter_distance(a, b) -> float:
    """Euclidean distance between two letters of the same space."""
    sa, sb = letter_space(a), letter_space(b)
    if sa.tag != sb.tag:
        raise SpaceMismatch(f"cannot compare {sa.tag} with {sb.tag}")
    fa, fb = a.to_floats(), b.to_floats()
    if sa.dim == 1:
        return abs(fa[0] - fb[0])
    acc = 0.0
    for u, v in zip(fa, fb):
        d = u - v
        acc += d * d
    return math.sqrt(acc)


def d_euclid(p: Point2, q: Point2) -> float:
    """Euclidean distance on the unit square."""
    return letter_distance(p, q)


@dataclass(frozen=True)
class Block:
    """A finite tuple of letters sharing one ambient space."""

    letters: Tuple
    space_tag: str

    def __post_init__(self):
        if len(self.letters) < 1:
            raise ValueError("a block needs at least one letter")
        for letter in self.letters:
            if letter_space(letter).tag != self.space_tag:
                raise SpaceMismatch(
                    f"letter {letter!r} does not live in {self.space_tag!r}"
                )

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def space(self) -> Space:
        return space(self.space_tag)

    def to_float_rows(self):
        import numpy as np

        return np.array([l.to_floats() for l in self.letters], dtype=np.float64)


def block(letters: Iterable) -> Block:
    """Build a block, inferring the space from the first letter."""
    letters = tuple(letters)
    if not letters:
        raise ValueError("a block needs at least one letter")
    return Block(letters, letter_space(letters[0]).tag)


def dbar_block(b1: Block, b2: Block) -> float:
    """Weighted distance between two equal-length blocks.

    The i-th letters are compared with weight 1/2**i, summed in ascending
    order so the float result is reproducible.
    """
    if len(b1) != len(b2):
        raise ValueError(f"block lengths differ: {len(b1)} vs {len(b2)}")
    if b1.space_tag != b2.space_tag:
        raise SpaceMismatch(f"block spaces differ: {b1.space_tag} vs {b2.space_tag}")
    total = 0.0
    w = 0.5
    for x, y in zip(b1.letters, b2.letters):
        total += w * letter_distance(x, y)
        w *= 0.5
    return total


@dataclass(frozen=True)
class TailInterval:
    """Rigorous enclosure of the distance between two infinite sequences.

    ``lo`` is the exact (to float rounding) sum of the first ``depth``
    weighted terms; the discarded tail is bounded by diam/2**depth, so the
    true value lies in [lo, hi].
    """

    lo: float
    hi: float
    depth: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


def dbar_truncated(s1, s2, depth: int) -> TailInterval:
    """Enclose the sequence distance by summing the first ``depth`` terms.

    Works for arbitrarily large start offsets because letters are pulled
    one at a time through the sequences' term rules.
    """
    if depth < 1:
        raise ValueError("truncation depth must be >= 1")
    if s1.space_tag != s2.space_tag:
        raise SpaceMismatch(f"sequence spaces differ: {s1.space_tag} vs {s2.space_tag}")
    diam = space(s1.space_tag).diameter
    lo = 0.0
    w = 0.5
    for j in range(1, depth + 1):
        lo += w * letter_distance(s1.term(j), s2.term(j))
        w *= 0.5
    return TailInterval(lo, lo + diam * math.ldexp(1.0, -depth), depth)
