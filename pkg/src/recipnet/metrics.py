"""Per-dyad and per-vertex measures on weighted digraphs.

Covers the reciprocity score of a mutual dyad (absolute log-ratio of the two
directed communication probabilities), its three-class interpretation,
the closed-form score under equidispersed weights, Herfindahl-style weight
concentration per vertex, and degree assortativity across linked dyads.

All functions are pure reads of an immutable graph and can be fanned out
across threads; bulk sweeps aggregate in canonical dyad order so results are
bit-stable regardless of thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, MissingArcError, UndefinedCorrelationError
from .graph import MutualDyad, WeightedDigraph

#: Class boundaries on the natural-log scale. A probability ratio of 1.5
#: separates reciprocal from partially reciprocal dyads; 9.0 separates
#: partially reciprocal from non-reciprocal. Boundary values belong to the
#: lower (more reciprocal) class.
RECIPROCAL_MAX = math.log(1.5)
PARTIAL_MAX = math.log(9.0)

DEFAULT_BIN_WIDTH = 0.1


class DyadClass(Enum):
    RECIPROCAL = "reciprocal"
    PARTIALLY_RECIPROCAL = "partially_reciprocal"
    NON_RECIPROCAL = "non_reciprocal"


@dataclass(frozen=True)
class ReciprocityRecord:
    """Reciprocity score of one mutual dyad plus the inputs that produced it."""

    dyad: MutualDyad
    p_ab: float
    p_ba: float
    r_value: float
    dyad_class: DyadClass


@dataclass(frozen=True)
class ConcentrationScore:
    """Herfindahl concentration of a vertex's outgoing weights.

    ``h`` is the raw sum of squared normalized weights; ``h_star`` rescales it
    so 0 means an equal split across all out-neighbors and 1 means everything
    on a single neighbor, independent of out-degree.
    """

    vertex: int
    h: float
    h_star: float


@dataclass(frozen=True)
class AssortativityResult:
    r: float
    pair_count: int


def reciprocity_value(w_ab: float, w_ba: float, s_a: float, s_b: float) -> float:
    """|ln(w_ab/s_a) - ln(w_ba/s_b)|: imbalance of the two directed probabilities.

    0 means both endpoints are equally likely to direct their next
    communication at each other; the score grows with the probability ratio
    and is symmetric in the two directions.
    """
    if w_ab <= 0 or w_ba <= 0:
        raise DomainError("dyad weights must be strictly positive")
    if s_a < w_ab or s_b < w_ba:
        raise DomainError("vertex strength cannot be smaller than the arc weight")
    return abs(math.log(w_ab / s_a) - math.log(w_ba / s_b))


def reciprocity(g: WeightedDigraph, dyad: MutualDyad | tuple[int, int]) -> ReciprocityRecord:
    """Score one mutual dyad of ``g``.

    Accepts a MutualDyad or a bare (a, b) pair in either order; the pair must
    be mutual (a one-way arc has no two-way relationship to score).
    """
    if isinstance(dyad, MutualDyad):
        a, b = dyad.a, dyad.b
    else:
        a, b = dyad
        if a == b:
            raise DomainError("a dyad needs two distinct vertices")
        if a > b:
            a, b = b, a
    if not (g.has_arc(a, b) and g.has_arc(b, a)):
        raise MissingArcError(f"pair ({a}, {b}) is not mutual; reciprocity is undefined")
    w_ab = g.weight(a, b)
    w_ba = g.weight(b, a)
    p_ab = w_ab / g.out_strength(a)
    p_ba = w_ba / g.out_strength(b)
    r = abs(math.log(p_ab) - math.log(p_ba))
    return ReciprocityRecord(
        dyad=MutualDyad(a, b, w_ab, w_ba),
        p_ab=p_ab,
        p_ba=p_ba,
        r_value=r,
        dyad_class=classify(r),
    )


def reciprocity_records(g: WeightedDigraph, threads: int = 1) -> list[ReciprocityRecord]:
    """Score every mutual dyad, in canonical (a, b) order.

    With ``threads > 1`` the dyad list is chunked across a thread pool and the
    per-chunk results concatenated in chunk order, so output is identical to
    the sequential sweep.
    """
    dyads = list(g.mutual_dyads())
    if threads <= 1 or len(dyads) < 2 * threads:
        return [reciprocity(g, d) for d in dyads]
    chunk = (len(dyads) + threads - 1) // threads
    parts = [dyads[i : i + chunk] for i in range(0, len(dyads), chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = pool.map(lambda part: [reciprocity(g, d) for d in part], parts)
        return [rec for part in results for rec in part]


def classify(r_value: float) -> DyadClass:
    """Map a reciprocity score to its class; boundaries go to the lower class."""
    if not (isinstance(r_value, (int, float)) and math.isfinite(r_value)) or r_value < 0:
        raise DomainError(f"reciprocity score must be finite and >= 0, got {r_value!r}")
    if r_value <= RECIPROCAL_MAX:
        return DyadClass.RECIPROCAL
    if r_value <= PARTIAL_MAX:
        return DyadClass.PARTIALLY_RECIPROCAL
    return DyadClass.NON_RECIPROCAL


def equidispersion_prediction(k_a: int, k_b: int) -> float:
    """Reciprocity score of a dyad when both endpoints split weight equally.

    Under an equal split every outgoing probability is 1/out-degree, so the
    score collapses to |ln k_b - ln k_a|: strength drops out entirely and only
    the out-degree mismatch remains.
    """
    if k_a < 1 or k_b < 1:
        raise DomainError("out-degrees must be >= 1")
    return abs(math.log(k_b) - math.log(k_a))


def concentration(g: WeightedDigraph, v: int) -> ConcentrationScore:
    """Herfindahl weight concentration for a vertex with out-degree >= 2.

    h_star's denominator vanishes at out-degree 1, so degree-1 vertices are
    outside the domain.
    """
    k = g.out_degree(v)
    if k < 2:
        raise DomainError(f"concentration needs out-degree >= 2, vertex {v} has {k}")
    s = g.out_strength(v)
    h = math.fsum((w / s) ** 2 for _, w in g.out_neighbors(v))
    h_star = (h - 1.0 / k) / (1.0 - 1.0 / k)
    return ConcentrationScore(vertex=v, h=h, h_star=h_star)


def concentration_scores(g: WeightedDigraph) -> list[ConcentrationScore]:
    """Scores for every vertex with out-degree >= 2, ascending vertex order."""
    return [concentration(g, v) for v in range(g.vertex_count) if g.out_degree(v) >= 2]


def _mutual_backbone_pairs(g: WeightedDigraph) -> tuple[np.ndarray, np.ndarray, int]:
    degree = np.zeros(g.vertex_count, dtype=np.int64)
    edges: list[tuple[int, int]] = []
    for d in g.mutual_dyads():
        edges.append((d.a, d.b))
        degree[d.a] += 1
        degree[d.b] += 1
    if not edges:
        return np.empty(0, dtype=np.float64), np.empty(0, dtype=np.float64), 0
    e = np.asarray(edges, dtype=np.int64)
    x = (degree[e[:, 0]] - 1).astype(np.float64)
    y = (degree[e[:, 1]] - 1).astype(np.float64)
    # Both orientations per dyad, so the correlation is endpoint-symmetric.
    return np.concatenate([x, y]), np.concatenate([y, x]), 2 * len(edges)


def _full_arc_pairs(g: WeightedDigraph) -> tuple[np.ndarray, np.ndarray, int]:
    neighbor_sets: list[set[int]] = [set() for _ in range(g.vertex_count)]
    arcs: list[tuple[int, int]] = []
    for src, dst, _ in g.arcs():
        arcs.append((src, dst))
        neighbor_sets[src].add(dst)
        neighbor_sets[dst].add(src)
    if not arcs:
        return np.empty(0, dtype=np.float64), np.empty(0, dtype=np.float64), 0
    degree = np.asarray([len(s) for s in neighbor_sets], dtype=np.int64)
    e = np.asarray(arcs, dtype=np.int64)
    x = (degree[e[:, 0]] - 1).astype(np.float64)
    y = (degree[e[:, 1]] - 1).astype(np.float64)
    return x, y, len(arcs)


def degree_assortativity(g: WeightedDigraph, mutual_only: bool = True) -> AssortativityResult:
    """Pearson correlation of excess degrees across linked vertex pairs.

    ``mutual_only`` (default) works on the mutual-dyad backbone, each dyad
    contributing both endpoint orderings; otherwise every directed arc
    contributes one (tail, head) pair with degrees counted over the
    undirected neighbor sets.
    """
    if mutual_only:
        x, y, n = _mutual_backbone_pairs(g)
    else:
        x, y, n = _full_arc_pairs(g)
    if n < 2:
        raise DomainError("assortativity needs at least two endpoint pairs")
    mean_x = float(x.mean())
    mean_y = float(y.mean())
    var_x = float(((x - mean_x) ** 2).mean())
    var_y = float(((y - mean_y) ** 2).mean())
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedCorrelationError(
            "degree correlation undefined: zero variance in the degree sequence"
        )
    cov = float(((x - mean_x) * (y - mean_y)).mean())
    return AssortativityResult(r=cov / math.sqrt(var_x * var_y), pair_count=n)


@dataclass(frozen=True)
class ReciprocityHistogram:
    """Fixed-width histogram of reciprocity scores starting at 0.

    ``counts[i]`` covers the half-open bin [i*bin_width, (i+1)*bin_width);
    trailing empty bins are trimmed. ``class_proportions`` is the
    (reciprocal, partially reciprocal, non-reciprocal) share of all records.
    """

    bin_width: float
    counts: tuple[int, ...]
    total: int
    class_proportions: tuple[float, float, float]

    def bins(self) -> list[tuple[float, float, int]]:
        return [
            (i * self.bin_width, (i + 1) * self.bin_width, c)
            for i, c in enumerate(self.counts)
        ]


def reciprocity_distribution(
    records: Iterable[ReciprocityRecord],
    bin_width: float = DEFAULT_BIN_WIDTH,
) -> ReciprocityHistogram:
    """Bin reciprocity scores and tally the three class shares."""
    if not bin_width > 0:
        raise DomainError(f"bin width must be positive, got {bin_width}")
    counts: list[int] = []
    by_class = {c: 0 for c in DyadClass}
    total = 0
    for rec in records:
        idx = int(rec.r_value // bin_width)
        if idx >= len(counts):
            counts.extend([0] * (idx + 1 - len(counts)))
        counts[idx] += 1
        by_class[rec.dyad_class] += 1
        total += 1
    if total:
        proportions = (
            by_class[DyadClass.RECIPROCAL] / total,
            by_class[DyadClass.PARTIALLY_RECIPROCAL] / total,
            by_class[DyadClass.NON_RECIPROCAL] / total,
        )
    else:
        proportions = (0.0, 0.0, 0.0)
    return ReciprocityHistogram(
        bin_width=bin_width,
        counts=tuple(counts),
        total=total,
        class_proportions=proportions,
    )


def mean_median_r(records: Sequence[ReciprocityRecord]) -> tuple[float | None, float | None]:
    """Mean and median score over a record sweep; (None, None) when empty."""
    if not records:
        return None, None
    values = np.fromiter((rec.r_value for rec in records), dtype=np.float64, count=len(records))
    return float(values.mean()), float(np.median(values))
