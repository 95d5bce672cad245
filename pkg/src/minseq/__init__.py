"""minseq: constructive minimality checks for sequences over the square.

Builds the 2-Toeplitz machinery, the corner-triple counterexample sequence
(not minimal, yet minimal in every continuous image on [0, 1]), the toy
interval model, and the witness detector into the square, together with
finite-prefix verifiers for all the quantitative bounds involved.
"""

__version__ = "0.1.0"

from .construction import (
    SearchExhausted,
    build_counterexample,
    build_counterexample_direct,
    build_toy,
    concat,
    head_separation_scan,
    toy_minimality_check,
)
from .detector import (
    DetectorPair,
    FunctionSpec,
    build_witness_detector,
    bundled_specs,
    detector_verifies_nonminimal,
    eval_detector,
    eval_f,
    find_surrogate,
    image_minimality_check,
    image_seq,
    order_vertices,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .metric import (
    Block,
    Point2,
    SpaceMismatch,
    TailInterval,
    UnitValue,
    block,
    d_euclid,
    dbar_block,
    dbar_truncated,
)
from .symbolic import (
    LazySequence,
    RecurrenceReport,
    block_at,
    recurrence_gap_scan,
    shift,
    witness_check,
)
from .toeplitz import (
    Edge,
    EdgeTriple,
    edge_point,
    edge_triple,
    enumerate_rationals,
    rational_sequence,
    toeplitz_gap_bound,
    toeplitz_term,
    triple_sequence,
    two_adic_level,
    verify_recurrence_windows,
)
