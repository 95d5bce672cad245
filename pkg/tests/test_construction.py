import math
from fractions import Fraction

import pytest

from minseq.construction import (
    HEAD_BLOCK,
    SearchExhausted,
    build_counterexample,
    build_counterexample_direct,
    build_toy,
    concat,
    expand_triples,
    head_separation_scan,
    toy_minimality_check,
)
from minseq.metric import Point2, SpaceMismatch, UnitValue, block
from minseq.symbolic import block_at, materialize_rows
from minseq.toeplitz import edge_triple, rational_sequence, triple_sequence, two_adic_level


def test_counterexample_prefix():
    x = build_counterexample()
    expected = [
        Point2(0, 0),
        Point2(1, 0),
        Point2(0, 1),
        Point2(Fraction(1, 2), Fraction(1, 2)),
        Point2(1, 0),
        Point2(0, 1),
        Point2(0, 0),
        Point2(0, Fraction(1, 2)),
        Point2(0, 1),
    ]
    assert [x.term(j) for j in range(1, 10)] == expected


def test_dual_constructions_agree():
    pipeline = build_counterexample()
    direct = build_counterexample_direct()
    n = 3 * (1 << 14)
    import numpy as np

    assert np.array_equal(
        materialize_rows(pipeline, 1, n), materialize_rows(direct, 1, n)
    )
    # spot-check exact letters, not just float rows
    for j in (1, 2, 3, 4, 100, 1234, 49_152):
        assert pipeline.term(j) == direct.term(j)


def test_triple_alignment():
    x = build_counterexample()
    for k in (1, 2, 3, 17, 256, 1 << 14):
        triple = edge_triple(two_adic_level(k))
        assert block_at(x, 3 * k + 1, 3).letters == triple.points()


def test_concat_basics():
    tail = triple_sequence()
    head = block([edge_triple(5)])
    joined = concat(head, tail)
    assert joined.term(1) == edge_triple(5)
    assert joined.term(2) == tail.term(1)
    with pytest.raises(SpaceMismatch):
        concat(HEAD_BLOCK, tail)


def test_expand_triples_shape():
    # term j sits in triple ceil(j/3) at slot (j-1) % 3
    expanded = expand_triples(triple_sequence())
    assert (expanded.term(1), expanded.term(2), expanded.term(3)) == edge_triple(1).points()
    assert (expanded.term(4), expanded.term(5), expanded.term(6)) == edge_triple(2).points()


def test_head_separation_pinned_small():
    report = head_separation_scan(3 * (1 << 10) + 3)
    assert report.verdict == "witness-found"
    assert report.min_distance == pytest.approx(math.sqrt(10) / 24, rel=1e-12)
    assert report.argmin == 97


def test_head_separation_pinned_full():
    report = head_separation_scan(3 * (1 << 14) + 3)
    assert report.verdict == "witness-found"
    assert report.min_distance == pytest.approx(math.sqrt(17) / 32, rel=1e-12)
    assert report.argmin == 6145
    assert report.min_distance >= 0.125 - 1e-9


def test_head_separation_tiny_and_invalid():
    assert head_separation_scan(6).verdict == "witness-found"
    with pytest.raises(ValueError):
        head_separation_scan(5)


def test_toy_prefix():
    toy = build_toy(0.5)
    assert toy.term(1) == UnitValue(0.5)
    assert toy.term(2) == UnitValue(0)
    assert toy.term(3) == UnitValue(1)
    assert toy.term(4) == rational_sequence().term(3)


def test_toy_validation():
    with pytest.raises(ValueError):
        build_toy(1.5)
    with pytest.raises(ValueError):
        toy_minimality_check(0.5, -0.1, 100)


@pytest.mark.parametrize(
    "c, eps, level, head",
    [
        (0, 0.1, 34, Fraction(1, 11)),
        (Fraction(1, 3), 0.01, 4, Fraction(1, 3)),
        (0.9, 0.1, 11, Fraction(4, 5)),
        (0.9, 0.01, 33, Fraction(9, 10)),
        (0.707106781187, 0.01, 18, Fraction(5, 7)),
    ],
)
def test_toy_check_pinned(c, eps, level, head):
    result = toy_minimality_check(c, eps, 1 << 18)
    assert result.passed
    assert result.level == level
    assert result.head_value == head
    assert result.shift_used == 1 << (level - 1)
    assert result.dbar_bound.hi < 2 * eps


def test_toy_check_verifies_against_sequence():
    # the certified interval comes from the actual sequences, so the low end
    # must equal half the head mismatch exactly
    result = toy_minimality_check(0.9, 0.1, 1 << 18)
    assert result.dbar_bound.lo == abs(float(Fraction(4, 5)) - 0.9) / 2


def test_toy_check_exhausted():
    with pytest.raises(SearchExhausted):
        toy_minimality_check(1 / math.sqrt(2), 1e-12, 16)


def test_toy_trivial_epsilon():
    # epsilon beyond the diameter: anything certifies
    result = toy_minimality_check(0.5, 2.0, 16)
    assert result.passed


def test_toy_eight_block_recurrence():
    # the opening 8 letters of the rational 2-Toeplitz sequence have max
    # level 4: exact occurrences start every 16 positions (pinned from the
    # oracle run), and every 32-term window contains a complete copy
    import numpy as np

    from minseq.symbolic import scan_hit_positions
    from minseq.toeplitz import toeplitz_gap_bound

    seq = rational_sequence()
    target = block_at(seq, 1, 8)
    prefix = 1 << 12
    hits = scan_hit_positions(seq, target, 0.0, prefix)
    assert hits[0] == 1
    assert set(np.diff(hits).tolist()) == {16}
    window = toeplitz_gap_bound(4)
    assert window == 32
    for w in range(1, prefix - window + 2):
        assert np.any((hits >= w) & (hits + 8 - 1 <= w + window - 1))
