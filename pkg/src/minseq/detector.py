"""Continuous test maps, image-minimality verification, and the witness
detector into the square.

Two directions are covered:

* every continuous map of the square into [0, 1] sends the counterexample
  sequence to a minimal sequence; ``image_minimality_check`` certifies the
  distance bound and the recurrence gaps for a given map and tolerance,
  locating a surrogate edge point by intermediate-value search;

* a sequence of square points that provably avoids one of its own blocks
  can be pushed into the square through an explicit (bump, min-distance)
  pair of maps whose image still avoids the image block;
  ``detector_verifies_nonminimal`` re-checks that on the image.

Map descriptions are declarative (a kind plus parameters) and serialize
to JSON; evaluation is clamped to [0, 1], which keeps every kind total
and continuous.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .construction import SearchExhausted, build_counterexample
from .metric import (
    BOUND_SLACK,
    Point2,
    TailInterval,
    UnitValue,
    dbar_truncated,
    letter_distance,
)
from .symbolic import (
    LazySequence,
    RecurrenceReport,
    block_at,
    max_prefix_cap,
    recurrence_gap_scan,
    shift,
    witness_check,
)
from .toeplitz import Edge, edge_point, triple_index

KINDS = (
    "coordinate-x",
    "coordinate-y",
    "polynomial",
    "grid-bilinear",
    "distance-to-point",
    "composition-clamped",
)


class MapSpecError(ValueError):
    """A declarative map description is malformed."""


@dataclass(frozen=True)
class FunctionSpec:
    """Declarative description of a continuous map square -> [0, 1]."""

    kind: str
    params: Mapping
    description: str = ""

    def __post_init__(self):
        _validate(self.kind, self.params)


def _require(cond: bool, msg: str):
    if not cond:
        raise MapSpecError(msg)


def _validate(kind: str, params: Mapping):
    _require(kind in KINDS, f"unknown map kind {kind!r}")
    if kind in ("coordinate-x", "coordinate-y"):
        return
    if kind == "polynomial":
        coeffs = params.get("coefficients")
        _require(
            isinstance(coeffs, (list, tuple)) and len(coeffs) > 0,
            "polynomial needs a non-empty coefficient matrix",
        )
        width = None
        for row in coeffs:
            _require(
                isinstance(row, (list, tuple)) and len(row) > 0,
                "polynomial coefficient rows must be non-empty lists",
            )
            _require(
                width is None or len(row) == width,
                "polynomial coefficient rows must have equal length",
            )
            width = len(row)
            for v in row:
                _require(
                    isinstance(v, (int, float)) and math.isfinite(v),
                    f"bad polynomial coefficient {v!r}",
                )
        return
    if kind == "grid-bilinear":
        values = params.get("values")
        _require(
            isinstance(values, (list, tuple)) and len(values) >= 2,
            "grid-bilinear needs at least two rows of values",
        )
        width = None
        for row in values:
            _require(
                isinstance(row, (list, tuple)) and len(row) >= 2,
                "grid-bilinear rows need at least two values",
            )
            _require(
                width is None or len(row) == width,
                "grid-bilinear rows must have equal length",
            )
            width = len(row)
            for v in row:
                _require(
                    isinstance(v, (int, float)) and 0 <= v <= 1,
                    f"grid value {v!r} outside [0, 1]",
                )
        return
    if kind == "distance-to-point":
        pt = params.get("point")
        _require(
            isinstance(pt, (list, tuple)) and len(pt) == 2,
            "distance-to-point needs a [x, y] anchor",
        )
        for v in pt:
            _require(
                isinstance(v, (int, float)) and 0 <= v <= 1,
                f"anchor coordinate {v!r} outside [0, 1]",
            )
        return
    # composition-clamped
    inner = params.get("inner")
    _require(isinstance(inner, FunctionSpec), "composition-clamped needs an inner spec")
    for key, default in (("power", 1.0), ("scale", 1.0), ("offset", 0.0)):
        v = params.get(key, default)
        _require(
            isinstance(v, (int, float)) and math.isfinite(v),
            f"bad {key} {v!r}",
        )
    _require(params.get("power", 1.0) > 0, "power must be > 0")


def spec_to_dict(spec: FunctionSpec) -> dict:
    params = dict(spec.params)
    if spec.kind == "composition-clamped":
        params["inner"] = spec_to_dict(params["inner"])
    out = {"kind": spec.kind, **params}
    if spec.description:
        out["description"] = spec.description
    return out


def spec_from_dict(data: Mapping) -> FunctionSpec:
    if not isinstance(data, Mapping) or "kind" not in data:
        raise MapSpecError("a map description needs a 'kind' field")
    params = {k: v for k, v in data.items() if k not in ("kind", "description")}
    if data["kind"] == "composition-clamped" and "inner" in params:
        params["inner"] = spec_from_dict(params["inner"])
    return FunctionSpec(data["kind"], params, data.get("description", ""))


def eval_array(spec: FunctionSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized evaluation; the scalar path goes through here too."""
    if spec.kind == "coordinate-x":
        out = np.asarray(xs, dtype=np.float64).copy()
    elif spec.kind == "coordinate-y":
        out = np.asarray(ys, dtype=np.float64).copy()
    elif spec.kind == "polynomial":
        coeffs = spec.params["coefficients"]
        acc = np.zeros_like(xs)
        for row in reversed(coeffs):
            rowval = np.full_like(ys, float(row[-1]))
            for v in reversed(row[:-1]):
                rowval = rowval * ys + float(v)
            acc = acc * xs + rowval
        out = acc
    elif spec.kind == "grid-bilinear":
        grid = np.asarray(spec.params["values"], dtype=np.float64)
        ny, nx = grid.shape
        u = xs * (nx - 1)
        v = ys * (ny - 1)
        i0 = np.clip(np.floor(u).astype(np.int64), 0, nx - 2)
        j0 = np.clip(np.floor(v).astype(np.int64), 0, ny - 2)
        fu = u - i0
        fv = v - j0
        out = (
            grid[j0, i0] * (1 - fu) * (1 - fv)
            + grid[j0, i0 + 1] * fu * (1 - fv)
            + grid[j0 + 1, i0] * (1 - fu) * fv
            + grid[j0 + 1, i0 + 1] * fu * fv
        )
    elif spec.kind == "distance-to-point":
        ax, ay = spec.params["point"]
        out = np.sqrt((xs - ax) ** 2 + (ys - ay) ** 2)
    else:  # composition-clamped
        inner = eval_array(spec.params["inner"], xs, ys)
        power = float(spec.params.get("power", 1.0))
        scale = float(spec.params.get("scale", 1.0))
        offset = float(spec.params.get("offset", 0.0))
        out = scale * inner**power + offset
    return np.clip(out, 0.0, 1.0)


def eval_value(spec: FunctionSpec, p: Point2) -> float:
    xs = np.array([float(p.x)], dtype=np.float64)
    ys = np.array([float(p.y)], dtype=np.float64)
    return float(eval_array(spec, xs, ys)[0])


def eval_f(spec: FunctionSpec, p: Point2) -> UnitValue:
    """Evaluate the map at a square point."""
    return UnitValue(eval_value(spec, p))


def image_seq(spec: FunctionSpec, s: LazySequence) -> LazySequence:
    """The termwise image of a square sequence under the map."""
    if s.space_tag != "point2":
        raise ValueError("image_seq needs a square sequence")

    vec = None
    if s.vector_rule is not None:
        base_vec = s.vector_rule

        def vec(start, count):
            rows = base_vec(start, count)
            return eval_array(spec, rows[:, 0], rows[:, 1]).reshape(-1, 1)

    return LazySequence(
        term_rule=lambda j: eval_f(spec, s.term(j)),
        space_tag="unit",
        description=f"{spec.kind} image of {s.description or 'seq'}"[:120],
        vector_rule=vec,
    )


# ---------------------------------------------------------------------------
# vertex ordering and surrogate search

_CORNERS = (Point2(0, 0), Point2(1, 0), Point2(0, 1))

_EDGE_BY_EXTREMES = {
    frozenset({0, 1}): Edge.BOTTOM,
    frozenset({0, 2}): Edge.LEFT,
    frozenset({1, 2}): Edge.DIAGONAL,
}

#: Slot (1-based) the surrogate point occupies inside its corner triple.
SURROGATE_SLOT = {Edge.DIAGONAL: 1, Edge.LEFT: 2, Edge.BOTTOM: 3}


@dataclass(frozen=True)
class VertexOrder:
    """The three corners sorted by map value, ties by corner order."""

    lo: Point2
    mid: Point2
    hi: Point2
    surrogate_edge: Edge
    values: Tuple[float, float, float]  # at (0,0), (1,0), (0,1)


def order_vertices(spec: FunctionSpec) -> VertexOrder:
    values = tuple(eval_value(spec, c) for c in _CORNERS)
    order = sorted(range(3), key=lambda i: (values[i], i))
    lo, mid, hi = (order[0], order[1], order[2])
    edge = _EDGE_BY_EXTREMES[frozenset({lo, hi})]
    return VertexOrder(
        lo=_CORNERS[lo],
        mid=_CORNERS[mid],
        hi=_CORNERS[hi],
        surrogate_edge=edge,
        values=values,
    )


@dataclass(frozen=True)
class Surrogate:
    """An edge point whose map value approximates the median corner's."""

    point: Point2
    edge: Edge
    m: int            # index of the point along its edge enumeration
    index: int        # index of the resulting triple in the interleave
    value: float      # map value at the point
    mid_value: float  # map value at the median corner


def find_surrogate(spec: FunctionSpec, epsilon: float, budget: int) -> Surrogate:
    """First edge point (by enumeration) with |f(a) - f(mid)| < epsilon.

    The intermediate value theorem plus density of the edge enumeration
    guarantee one exists; ``budget`` caps how many points are tried.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    order = order_vertices(spec)
    mid_value = eval_value(spec, order.mid)
    edge = order.surrogate_edge
    for m in range(1, budget + 1):
        a = edge_point(edge, m)
        fa = eval_value(spec, a)
        if abs(fa - mid_value) < epsilon:
            return Surrogate(
                point=a,
                edge=edge,
                m=m,
                index=triple_index(edge, m),
                value=fa,
                mid_value=mid_value,
            )
    raise SearchExhausted(
        f"no {edge.value}-edge point within {epsilon} of the median value "
        f"{mid_value} in the first {budget} points; raise the budget"
    )


# ---------------------------------------------------------------------------
# image minimality certification

@dataclass(frozen=True)
class GapEvidence:
    """Recurrence of the image head block on the scanned prefix."""

    window: int
    scan_len: int
    tolerance: float
    n_hits: int
    max_gap_found: int
    holds: bool
    conclusive: bool


@dataclass(frozen=True)
class ImageMinimalityReport:
    spec: FunctionSpec
    epsilon: float
    surrogate: Surrogate
    triple_level: int      # enumeration index of the surrogate triple
    shift_used: int        # 3 * 2**(triple_level - 1)
    depth: int
    lhs: TailInterval
    rhs: float
    rhs_tight: float
    passed: bool
    passed_tight: bool
    gap: Optional[GapEvidence]

    @property
    def ok(self) -> bool:
        good_gap = self.gap is None or self.gap.holds
        return self.passed and self.passed_tight and good_gap


def _safe_inverse_pow2_minus_1(exponent: int) -> float:
    """1 / (2**exponent - 1) as a float; inf at 0, 0.0 on underflow."""
    if exponent <= 0:
        return math.inf
    try:
        return 1.0 / ((1 << exponent) - 1)
    except OverflowError:
        return 0.0


def _safe_pow2_neg(exponent: int) -> float:
    """2**-exponent as a float, 0.0 on underflow."""
    if exponent > 1100:
        return 0.0
    return math.ldexp(1.0, -exponent)


def image_minimality_check(
    spec: FunctionSpec,
    epsilon: float,
    budget: int = 4096,
    gap_scan: bool = True,
) -> ImageMinimalityReport:
    """Certify that the image of the counterexample recurs near its start.

    Finds a surrogate edge point, shifts the image to the first occurrence
    of the matching corner triple, and encloses the distance between the
    shifted and the original image in a rigorous interval, compared against
    epsilon/4 plus the alignment tail (both the conservative and the tight
    tail are checked).  The interval is evaluated lazily, so surrogates
    whose first occurrence lies far beyond any materializable prefix are
    handled exactly like shallow ones.

    When ``gap_scan`` is set, the image prefix is additionally scanned to
    confirm the image head 3-block recurs within every window of
    3 * 2**level terms.  If that window does not fit inside the prefix cap
    the scan still runs on the capped prefix and is flagged inconclusive
    (the bound cannot be violated there).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    order = order_vertices(spec)
    slot = SURROGATE_SLOT[order.surrogate_edge]
    # the surrogate letter sits at weight 1/2**slot inside the image head
    # block; halving the search tolerance in the slot-1 case keeps the
    # certified term below epsilon/4 for every vertex ordering
    search_eps = epsilon / 2 if slot == 1 else epsilon
    sur = find_surrogate(spec, search_eps, budget)
    level = sur.index
    shift_used = 3 * (1 << (level - 1))
    run = 3 * ((1 << (level - 1)) - 1)
    depth = min(64, run + 3)
    seq = build_counterexample()
    img = image_seq(spec, seq)
    lhs = dbar_truncated(shift(img, shift_used), img, depth)
    rhs = epsilon / 4 + _safe_inverse_pow2_minus_1(run)
    rhs_tight = epsilon / 4 + _safe_pow2_neg(3 * (1 << (level - 1)))
    passed = lhs.hi <= rhs + BOUND_SLACK
    passed_tight = lhs.hi <= rhs_tight + BOUND_SLACK

    gap = None
    if gap_scan:
        window = 3 * (1 << level)
        needed = 3 * shift_used + 9  # second aligned occurrence plus a block
        cap = max_prefix_cap()
        scan_len = min(cap, max(needed, 4096))
        conclusive = needed <= cap
        head_img = block_at(img, 1, 3)
        report = recurrence_gap_scan(img, head_img, rhs_tight, scan_len)
        max_gap = report.max_gap_found if isinstance(report.max_gap_found, int) else scan_len
        gap = GapEvidence(
            window=window,
            scan_len=scan_len,
            tolerance=rhs_tight,
            n_hits=report.n_hits,
            max_gap_found=max_gap,
            holds=max_gap <= window,
            conclusive=conclusive,
        )
    return ImageMinimalityReport(
        spec=spec,
        epsilon=float(epsilon),
        surrogate=sur,
        triple_level=level,
        shift_used=shift_used,
        depth=depth,
        lhs=lhs,
        rhs=rhs,
        rhs_tight=rhs_tight,
        passed=passed,
        passed_tight=passed_tight,
        gap=gap,
    )


# ---------------------------------------------------------------------------
# the witness detector into the square

SQUARE_DIAMETER = math.sqrt(2.0)


@dataclass(frozen=True)
class DetectorPair:
    """A bump map (value tags on witness letters) paired with the
    normalized distance to the witness letters.

    The bump equals its tag value on the closed inner ball of each
    distinct witness letter, falls linearly to zero on the outer ball,
    and the outer balls are pairwise disjoint, so the pair is continuous
    with Lipschitz constant max(tag)/(outer - inner).
    """

    centers: Tuple[Point2, ...]           # witness letters, in order
    distinct_centers: Tuple[Point2, ...]  # first-occurrence order
    values: Tuple[float, ...]             # tag value per distinct center
    inner_radius: float
    outer_radius: float
    diameter: float = SQUARE_DIAMETER

    def value_of(self, center_index: int) -> float:
        return self.values[center_index]


def build_witness_detector(
    s: LazySequence, witness_start: int, witness_len: int
) -> DetectorPair:
    """Build the detector pair for a witness block of a square sequence.

    The caller is responsible for having certified (via a witness check)
    that the block is actually avoided; the construction itself only needs
    the letters.  Tag values are spread uniformly in (0, 1) by first
    occurrence, reserving 0 for the off-support region.
    """
    if s.space_tag != "point2":
        raise ValueError("the detector construction needs a square sequence")
    if witness_len < 1:
        raise ValueError("witness length must be >= 1")
    letters = tuple(s.term(witness_start + i) for i in range(witness_len))
    distinct = []
    for letter in letters:
        if letter not in distinct:
            distinct.append(letter)
    if len(distinct) == 1:
        inner = 0.1
        outer = 0.2
        values = (0.5,)
    else:
        min_pair = min(
            letter_distance(a, b)
            for i, a in enumerate(distinct)
            for b in distinct[i + 1 :]
        )
        inner = 0.45 * min_pair
        outer = min(2 * inner, min_pair / 2)
        values = tuple((r + 1) / (witness_len + 1) for r in range(len(distinct)))
    return DetectorPair(
        centers=letters,
        distinct_centers=tuple(distinct),
        values=values,
        inner_radius=inner,
        outer_radius=outer,
    )


def eval_detector(d: DetectorPair, p: Point2) -> Tuple[UnitValue, UnitValue]:
    """(bump value, normalized distance to the witness letters) at a point."""
    best = math.inf
    best_idx = -1
    for idx, c in enumerate(d.distinct_centers):
        dist = letter_distance(p, c)
        if dist < best:
            best = dist
            best_idx = idx
    if best <= d.inner_radius:
        f = d.values[best_idx]
    elif best <= d.outer_radius:
        f = d.values[best_idx] * (d.outer_radius - best) / (
            d.outer_radius - d.inner_radius
        )
    else:
        f = 0.0
    return UnitValue(f), UnitValue(best / d.diameter)


def detector_image_seq(d: DetectorPair, s: LazySequence) -> LazySequence:
    """The sequence of (bump, distance) pairs, as square points."""

    def term_rule(j):
        f, g = eval_detector(d, s.term(j))
        return Point2(f.v, g.v)

    vec = None
    if s.vector_rule is not None:
        base_vec = s.vector_rule
        cxs = np.array([float(c.x) for c in d.distinct_centers])
        cys = np.array([float(c.y) for c in d.distinct_centers])
        vals = np.array(d.values)

        def vec(start, count):
            rows = base_vec(start, count)
            dists = np.sqrt(
                (rows[:, :1] - cxs) ** 2 + (rows[:, 1:2] - cys) ** 2
            )
            nearest = np.argmin(dists, axis=1)
            best = dists[np.arange(count), nearest]
            tag = vals[nearest]
            f = np.where(
                best <= d.inner_radius,
                tag,
                np.where(
                    best <= d.outer_radius,
                    tag * (d.outer_radius - best) / (d.outer_radius - d.inner_radius),
                    0.0,
                ),
            )
            return np.stack([f, best / d.diameter], axis=1)

    return LazySequence(
        term_rule=term_rule,
        space_tag="point2",
        description=f"detector image of {s.description or 'seq'}"[:120],
        vector_rule=vec,
    )


@dataclass(frozen=True)
class DetectorVerification:
    """Outcome of re-checking a witness on the detector image."""

    detector: DetectorPair
    eps_prime: float
    report: RecurrenceReport

    @property
    def nonminimal_certified(self) -> bool:
        return self.report.verdict == "witness-found"


def detector_verifies_nonminimal(
    d: DetectorPair,
    s: LazySequence,
    witness_start: int,
    witness_len: int,
    prefix_len: int,
) -> DetectorVerification:
    """Check that the image of the witness block is avoided on the image.

    The tolerance is a concrete conservative choice: the image can only
    come near the image block if some original letter is either far from
    every witness letter (the distance half notices) or near the wrong one
    (the bump half notices); both effects are at least the witness-letter
    scale divided by the block weight 2**witness_len, halved for safety.
    """
    if prefix_len < witness_start + witness_len:
        raise ValueError("prefix must extend past the witness block")
    img = detector_image_seq(d, s)
    target = block_at(img, witness_start, witness_len)
    distinct_vals = sorted(set(d.values))
    if len(distinct_vals) > 1:
        min_gap = min(b - a for a, b in zip(distinct_vals, distinct_vals[1:]))
    else:
        min_gap = math.inf
    scale = min(d.inner_radius / d.diameter, min_gap)
    eps_prime = math.ldexp(scale / 2, -witness_len)
    report = witness_check(
        img,
        target,
        eps_prime,
        witness_start + 1,
        prefix_len - witness_start,
    )
    return DetectorVerification(detector=d, eps_prime=eps_prime, report=report)


def detector_lipschitz_sample(
    d: DetectorPair, n_pairs: int = 10_000, seed: int = 0
) -> Tuple[bool, float]:
    """Sample test of the bump map's Lipschitz bound.

    Draws random point pairs and checks |f(p) - f(q)| <= L d(p, q) + slack
    with L = max(tag)/(outer - inner).  Returns (all ok, worst excess).
    """
    rng = random.Random(seed)
    lip = max(d.values) / (d.outer_radius - d.inner_radius)
    worst = -math.inf
    ok = True
    for _ in range(n_pairs):
        p = Point2(rng.random(), rng.random())
        q = Point2(rng.random(), rng.random())
        fp, _ = eval_detector(d, p)
        fq, _ = eval_detector(d, q)
        excess = abs(fp.v - fq.v) - lip * letter_distance(p, q)
        worst = max(worst, excess)
        if excess > BOUND_SLACK:
            ok = False
    return ok, worst


# ---------------------------------------------------------------------------
# the bundled map family

def bundled_specs() -> Dict[str, FunctionSpec]:
    """The fixed family of test maps used by the verification sweeps."""
    return {
        "coordinate-x": FunctionSpec("coordinate-x", {}, "first coordinate"),
        "coordinate-y": FunctionSpec("coordinate-y", {}, "second coordinate"),
        "poly-tilted-plane": FunctionSpec(
            "polynomial",
            {"coefficients": [[0.0, 2 / 3], [1 / 3, 0.0]]},
            "(x + 2y)/3",
        ),
        "poly-corner-ramp": FunctionSpec(
            "polynomial",
            {"coefficients": [[0.0, 0.0], [0.25, 1.0]]},
            "x y + x/4",
        ),
        "poly-parabolic": FunctionSpec(
            "polynomial",
            {"coefficients": [[0.0, 0.25], [0.0, 0.0], [0.5, 0.0]]},
            "x^2/2 + y/4",
        ),
        "grid-ascending": FunctionSpec(
            "grid-bilinear",
            {
                "values": [
                    [0.2, 0.3, 0.4, 0.5],
                    [0.4, 0.45, 0.5, 0.55],
                    [0.6, 0.62, 0.64, 0.66],
                    [0.8, 0.85, 0.9, 0.95],
                ]
            },
            "4x4 ascending ramp",
        ),
        "grid-saddle": FunctionSpec(
            "grid-bilinear",
            {
                "values": [
                    [0.9, 0.7, 0.3, 0.1],
                    [0.7, 0.6, 0.5, 0.4],
                    [0.6, 0.55, 0.5, 0.45],
                    [0.5, 0.5, 0.5, 0.5],
                ]
            },
            "4x4 falling saddle",
        ),
        "distance-to-center-third": FunctionSpec(
            "distance-to-point",
            {"point": [1 / 3, 1 / 3]},
            "distance to (1/3, 1/3)",
        ),
    }
