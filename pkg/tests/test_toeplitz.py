import math
from fractions import Fraction

import numpy as np
import pytest

from minseq.metric import Point2
from minseq.toeplitz import (
    Edge,
    EdgeTriple,
    edge_point,
    edge_triple,
    enumerate_rationals,
    interior_rational,
    rational_sequence,
    toeplitz_gap_bound,
    toeplitz_term,
    triple_index,
    triple_sequence,
    two_adic_level,
    two_adic_levels,
    verify_recurrence_windows,
    Enumeration,
)

# the displayed index pattern of the first 16 terms of any 2-Toeplitz sequence
FIRST_16_LEVELS = [1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1, 3, 1, 2, 1, 5]


def test_two_adic_level_examples():
    assert two_adic_level(1) == 1
    assert two_adic_level(8) == 4
    assert two_adic_level(12) == 3
    with pytest.raises(ValueError):
        two_adic_level(0)


def test_two_adic_level_characterization():
    # p is the unique exponent with j = 2**(p-1) mod 2**p
    for j in list(range(1, 2049)) + [3 * 2**40 + 2**17]:
        p = two_adic_level(j)
        assert j % (1 << p) == 1 << (p - 1)


def test_vectorized_levels_agree():
    js = np.arange(1, 1 << 16, dtype=np.int64)
    vec = two_adic_levels(js)
    sample = np.random.default_rng(5).choice(js, 500)
    for j in sample:
        assert two_adic_level(int(j)) == vec[j - 1]


def test_sixteen_term_pattern():
    ints = Enumeration(lambda n: n, "unit", "indices")
    assert [toeplitz_term(ints, j) for j in range(1, 17)] == FIRST_16_LEVELS


def test_power_positions():
    ints = Enumeration(lambda n: n, "unit", "indices")
    for k in range(31):
        assert toeplitz_term(ints, 1 << k) == k + 1


def test_gap_bound():
    assert toeplitz_gap_bound(1) == 4
    assert toeplitz_gap_bound(3) == 16
    with pytest.raises(ValueError):
        toeplitz_gap_bound(0)
    with pytest.raises(OverflowError):
        toeplitz_gap_bound(100)


def test_rational_enumeration_start():
    first = [enumerate_rationals(n) for n in range(1, 8)]
    assert first == [
        Fraction(0),
        Fraction(1),
        Fraction(1, 2),
        Fraction(1, 3),
        Fraction(2, 3),
        Fraction(1, 4),
        Fraction(3, 4),
    ]


def test_rational_enumeration_injective_and_covering():
    seen = set()
    count = 100_000
    for n in range(1, count + 1):
        seen.add(enumerate_rationals(n))
    assert len(seen) == count
    # every reduced fraction with denominator up to 300 appears
    for q in range(2, 301):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                assert Fraction(p, q) in seen
    assert all(0 <= f <= 1 for f in list(seen)[:100])


def test_interior_skips_endpoints():
    assert interior_rational(1) == Fraction(1, 2)
    vals = {interior_rational(n) for n in range(1, 2000)}
    assert Fraction(0) not in vals and Fraction(1) not in vals


def test_edge_points():
    assert edge_point(Edge.LEFT, 1) == Point2(0, Fraction(1, 2))
    assert edge_point(Edge.BOTTOM, 1) == Point2(Fraction(1, 2), 0)
    assert edge_point(Edge.DIAGONAL, 1) == Point2(Fraction(1, 2), Fraction(1, 2))


def test_triple_interleave():
    v1 = edge_triple(1)
    assert v1.points() == (
        Point2(Fraction(1, 2), Fraction(1, 2)),
        Point2(1, 0),
        Point2(0, 1),
    )
    v2 = edge_triple(2)
    assert v2.points() == (Point2(0, 0), Point2(0, Fraction(1, 2)), Point2(0, 1))
    v3 = edge_triple(3)
    assert v3.points() == (Point2(0, 0), Point2(1, 0), Point2(Fraction(1, 2), 0))


def test_triple_index_closed_form():
    for m in (1, 2, 7, 40):
        assert edge_triple(triple_index(Edge.DIAGONAL, m)).edge() is Edge.DIAGONAL
        assert edge_triple(triple_index(Edge.LEFT, m)).edge() is Edge.LEFT
        assert edge_triple(triple_index(Edge.BOTTOM, m)).edge() is Edge.BOTTOM


def test_every_triple_matches_exactly_one_pattern():
    for n in range(1, 10_001):
        assert edge_triple(n).edge() is not None


def test_triple_rejects_garbage():
    with pytest.raises(ValueError):
        EdgeTriple(Point2(0, 0), Point2(0, 0), Point2(0, 1))


def test_position_law_and_density():
    seq = triple_sequence()
    n = 1 << 20
    levels = two_adic_levels(np.arange(1, n + 1, dtype=np.int64))
    # density: any 2**p consecutive indices contain exactly one level-p index
    for p in range(1, 19):
        positions = np.nonzero(levels == p)[0] + 1
        assert positions[0] == 1 << (p - 1)
        assert np.all(np.diff(positions) == 1 << p)
    # the sequence letter really is the enumeration item of the level
    rng = np.random.default_rng(11)
    for j in rng.integers(1, n, 64):
        assert seq.term(int(j)) == edge_triple(int(levels[j - 1]))


def test_rational_sequence_prefix():
    seq = rational_sequence()
    values = [seq.term(j).v for j in range(1, 9)]
    assert values == [
        Fraction(0),
        Fraction(1),
        Fraction(0),
        Fraction(1, 2),
        Fraction(0),
        Fraction(1),
        Fraction(0),
        Fraction(1, 3),
    ]


def test_recurrence_windows_small():
    report = verify_recurrence_windows(1 << 12, 16, 8)
    assert report.ok
    assert report.violations == ()
    assert report.classes_scanned < report.blocks_covered


def test_recurrence_windows_rejects_bad_args():
    with pytest.raises(ValueError):
        verify_recurrence_windows(8, 16, 8)
    with pytest.raises(ValueError):
        verify_recurrence_windows(1 << 12, 16, 0)
