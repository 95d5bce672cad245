#!/usr/bin/env python3
"""Benchmark the compiled scan kernels against the NumPy fallback.

Run after installing the package:

    python benchmarks/bench_kernels.py [--repeat 5]

Workloads mirror the hot paths of the verification suite: near-match
sweeps of the counterexample prefix, exact-match sweeps of the triple
sequence, and the full head-separation minimum scan.
"""

import argparse
import time

import numpy as np

from minseq.construction import build_counterexample
from minseq.kernels import fallback
from minseq.symbolic import materialize_rows
from minseq.toeplitz import triple_sequence

try:
    from minseq.kernels import _scan_core
except ImportError:
    _scan_core = None


def timeit(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def workloads():
    x = build_counterexample()
    xrows = materialize_rows(x, 1, 1 << 20)
    target3 = np.ascontiguousarray(xrows[:3])
    trows = materialize_rows(triple_sequence(), 1, 1 << 16)
    target8 = np.ascontiguousarray(trows[16:24])
    lemma2_rows = materialize_rows(x, 1, 3 * (1 << 14) + 3)
    return [
        ("hits eps=1/8, 2^20 square letters, block 3",
         lambda impl: impl.hits_scan(xrows, target3, 0.125)),
        ("hits exact, 2^16 triples, block 8",
         lambda impl: impl.hits_scan(trows, target8, 0.0)),
        ("min scan, 49k square letters, block 3",
         lambda impl: impl.min_scan(lemma2_rows[1:], target3, -1)),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _scan_core is None:
        print("compiled kernels not built; benchmarking the fallback only")
    header = f"{'workload':<45} {'numpy':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, make in workloads():
        t_py, r_py = timeit(lambda: make(fallback), args.repeat)
        if _scan_core is not None:
            t_cy, r_cy = timeit(lambda: make(_scan_core), args.repeat)
            if isinstance(r_py, tuple):
                assert r_py == tuple(r_cy), f"{name}: backends disagree"
            else:
                assert np.array_equal(np.asarray(r_cy), r_py), f"{name}: backends disagree"
            print(f"{name:<45} {t_py*1e3:>8.2f}ms {t_cy*1e3:>8.2f}ms {t_py/t_cy:>7.1f}x")
        else:
            print(f"{name:<45} {t_py*1e3:>8.2f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
