"""Acceptance suite: every stated criterion at its stated size and tolerance.

Each test prints one PASS/FAIL line so a plain ``pytest -s`` run doubles
as the acceptance report.  Runtime budgets are asserted with the stated
limits; the heavy scans use the compiled kernels when available and the
NumPy fallback otherwise.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from minseq.construction import (
    build_counterexample,
    build_counterexample_direct,
    head_separation_scan,
    toy_minimality_check,
)
from minseq.detector import (
    build_witness_detector,
    bundled_specs,
    detector_lipschitz_sample,
    detector_verifies_nonminimal,
    image_minimality_check,
)
from minseq.metric import Point2, block, dbar_block
from minseq.symbolic import LazySequence, materialize_rows, shift
from minseq.toeplitz import (
    Enumeration,
    toeplitz_term,
    verify_recurrence_windows,
)

BOUND_SLACK = 1e-9


def _verdict(name: str, ok: bool, detail: str, elapsed: float):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail} ({elapsed:.2f}s)")
    assert ok, f"{name}: {detail}"


def test_criterion_1_toeplitz_prefix_identity():
    t0 = time.perf_counter()
    ints = Enumeration(lambda n: n, "unit", "indices")
    pattern = [toeplitz_term(ints, j) for j in range(1, 17)]
    expected = [1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1, 3, 1, 2, 1, 5]
    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 1 (16-term index pattern)",
        pattern == expected and elapsed < 1.0,
        f"pattern={pattern}",
        elapsed,
    )


def test_criterion_2_recurrence_windows():
    t0 = time.perf_counter()
    report = verify_recurrence_windows(1 << 16, 32, 10)
    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 2 (recurrence windows, 2^16 prefix)",
        report.ok and elapsed < 60.0,
        f"blocks={report.blocks_covered} classes={report.classes_scanned} "
        f"violations={len(report.violations)}",
        elapsed,
    )


def test_criterion_3_head_separation():
    t0 = time.perf_counter()
    length = 3 * (1 << 14) + 3
    report = head_separation_scan(length)
    elapsed = time.perf_counter() - t0
    pinned_min = math.sqrt(17) / 32
    ok = (
        report.verdict == "witness-found"
        and report.min_distance >= 0.125 - BOUND_SLACK
        and abs(report.min_distance - pinned_min) <= 1e-12
        and report.argmin == 6145
        and elapsed < 60.0
    )
    _verdict(
        "criterion 3 (head 3-block separation)",
        ok,
        f"min={report.min_distance!r} argmin={report.argmin}",
        elapsed,
    )


def test_criterion_4_image_minimality_sweep():
    t0 = time.perf_counter()
    failures = []
    for eps in (0.5, 0.25, 0.1):
        for name, spec in bundled_specs().items():
            report = image_minimality_check(spec, eps)
            if not (report.passed and report.passed_tight and report.gap.holds):
                failures.append((name, eps))
    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 4 (image distance bound + gaps, 8 maps x 3 tolerances)",
        not failures and elapsed < 300.0,
        f"failures={failures or 'none'}",
        elapsed,
    )


def test_criterion_5_toy_model():
    t0 = time.perf_counter()
    failures = []
    heads = (0, Fraction(1, 3), 0.707106781187, 0.9)
    for c in heads:
        for eps in (0.1, 0.01):
            result = toy_minimality_check(c, eps, 1 << 18)
            if not (result.passed and result.dbar_bound.hi < 2 * eps):
                failures.append((c, eps))
    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 5 (toy head recurrence, 4 heads x 2 tolerances)",
        not failures and elapsed < 120.0,
        f"failures={failures or 'none'}",
        elapsed,
    )


def test_criterion_6_detector_pipeline():
    t0 = time.perf_counter()
    x = build_counterexample()
    d = build_witness_detector(x, 1, 3)
    positive = detector_verifies_nonminimal(d, x, 1, 3, 3 * (1 << 14))

    const = LazySequence(lambda j: Point2(0.5, 0.5), "point2", "constant")
    dc = build_witness_detector(const, 1, 3)
    negative = detector_verifies_nonminimal(dc, const, 1, 3, 4096)
    elapsed = time.perf_counter() - t0
    ok = (
        positive.nonminimal_certified
        and not negative.nonminimal_certified
        and elapsed < 60.0
    )
    _verdict(
        "criterion 6 (detector certifies the witness, negative control clean)",
        ok,
        f"eps'={positive.eps_prime} image_min={positive.report.min_distance!r} "
        f"negative={negative.report.verdict}",
        elapsed,
    )


def test_criterion_7_property_suites():
    t0 = time.perf_counter()
    problems = []

    # metric axioms on seeded random rational blocks
    rng = random.Random(20240811)
    for _ in range(400):
        n = rng.randint(1, 6)
        letters1 = [
            Point2(Fraction(rng.randint(0, 32), 32), Fraction(rng.randint(0, 32), 32))
            for _ in range(n)
        ]
        letters2 = [
            Point2(Fraction(rng.randint(0, 32), 32), Fraction(rng.randint(0, 32), 32))
            for _ in range(n)
        ]
        letters3 = [
            Point2(Fraction(rng.randint(0, 32), 32), Fraction(rng.randint(0, 32), 32))
            for _ in range(n)
        ]
        b1, b2, b3 = block(letters1), block(letters2), block(letters3)
        d12, d21 = dbar_block(b1, b2), dbar_block(b2, b1)
        if d12 != d21:
            problems.append("symmetry")
        if (d12 == 0.0) != (letters1 == letters2):
            problems.append("identity")
        if dbar_block(b1, b3) > d12 + dbar_block(b2, b3) + 1e-12:
            problems.append("triangle")

    # shift semigroup law on the counterexample prefix
    x = build_counterexample()
    for a, b in ((0, 5), (3, 4), (11, 17)):
        lhs, rhs = shift(shift(x, a), b), shift(x, a + b)
        if any(lhs.term(j) != rhs.term(j) for j in range(1, 128)):
            problems.append(f"semigroup {a}+{b}")

    # dual-construction agreement, letter for letter, on 3 * 2^14 letters
    n = 3 * (1 << 14)
    if not np.array_equal(
        materialize_rows(build_counterexample(), 1, n),
        materialize_rows(build_counterexample_direct(), 1, n),
    ):
        problems.append("dual construction")

    # detector continuity: Lipschitz sample bound
    d = build_witness_detector(x, 1, 3)
    lipschitz_ok, worst = detector_lipschitz_sample(d, 10_000, seed=7)
    if not lipschitz_ok:
        problems.append(f"lipschitz (worst excess {worst})")

    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 7 (metric axioms, semigroup law, dual construction, Lipschitz)",
        not problems,
        f"violations={problems or 'none'}",
        elapsed,
    )
