"""Weighted directed graph core: construction, dyad enumeration, dyad census.

Vertices are dense integer ids ``0..V-1``. Graphs are immutable once built;
use :class:`GraphBuilder` (aggregates parallel arcs, drops self-loops) or
:meth:`WeightedDigraph.from_dense_arcs` (already-clean dense arc lists) to
construct one. All read operations are safe to call from multiple threads.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator

from .errors import DomainError, IntegrityError, MissingArcError


@dataclass(frozen=True)
class MutualDyad:
    """An unordered vertex pair with arcs in both directions, oriented a < b."""

    a: int
    b: int
    w_ab: float
    w_ba: float

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise DomainError(f"mutual dyad must satisfy a < b, got ({self.a}, {self.b})")
        if self.w_ab <= 0 or self.w_ba <= 0:
            raise DomainError("mutual dyad weights must be strictly positive")


@dataclass(frozen=True)
class DyadCensus:
    """Counts of mutual, asymmetric and null dyads (the UMAN breakdown)."""

    mutual: int
    asymmetric: int
    null_dyads: int
    total_arcs: int

    def arc_identity_holds(self) -> bool:
        """asymmetric + 2*mutual must account for every directed arc."""
        return self.asymmetric + 2 * self.mutual == self.total_arcs

    def pair_identity_holds(self, vertex_count: int) -> bool:
        """The three dyad classes must partition all unordered vertex pairs."""
        return (
            self.mutual + self.asymmetric + self.null_dyads
            == vertex_count * (vertex_count - 1) // 2
        )


class WeightedDigraph:
    """Immutable directed graph with strictly positive arc weights.

    Out-strengths are cached as the correctly rounded sum of each vertex's
    outgoing weights (``math.fsum``), which makes them independent of arc
    insertion order.
    """

    __slots__ = ("_adj", "_out_strength", "_out_degree", "_arc_count", "_external_ids")

    def __init__(
        self,
        adjacency: list[dict[int, float]],
        external_ids: tuple[str, ...] | None = None,
    ) -> None:
        # Internal constructor: adjacency is adopted, not copied. Callers are
        # GraphBuilder / from_dense_arcs, which hand over freshly built dicts
        # with ascending target order.
        self._adj: tuple[dict[int, float], ...] = tuple(adjacency)
        self._out_strength = tuple(
            math.fsum(nbrs.values()) if nbrs else 0.0 for nbrs in self._adj
        )
        self._out_degree = tuple(len(nbrs) for nbrs in self._adj)
        self._arc_count = sum(self._out_degree)
        if external_ids is not None and len(external_ids) != len(self._adj):
            raise IntegrityError("external id table does not match vertex count")
        self._external_ids = external_ids

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dense_arcs(
        cls,
        vertex_count: int,
        arcs: Iterable[tuple[int, int, float]],
        external_ids: tuple[str, ...] | None = None,
    ) -> "WeightedDigraph":
        """Build from arcs already keyed by dense vertex ids.

        Arcs must be unique per ordered pair, self-loop free and positively
        weighted; violations raise rather than being repaired (use
        GraphBuilder for raw data that needs aggregation).
        """
        adj: list[dict[int, float]] = [{} for _ in range(vertex_count)]
        for src, dst, weight in arcs:
            if not (0 <= src < vertex_count and 0 <= dst < vertex_count):
                raise DomainError(f"arc ({src}, {dst}) outside 0..{vertex_count - 1}")
            if src == dst:
                raise DomainError(f"self-loop at vertex {src}")
            if not weight > 0:
                raise DomainError(f"non-positive weight {weight} on arc ({src}, {dst})")
            if dst in adj[src]:
                raise DomainError(f"duplicate arc ({src}, {dst})")
            adj[src][dst] = float(weight)
        adj = [dict(sorted(nbrs.items())) for nbrs in adj]
        return cls(adj, external_ids)

    # -- basic accessors ---------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self._adj)

    @property
    def arc_count(self) -> int:
        return self._arc_count

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < len(self._adj)):
            raise DomainError(f"vertex id {v!r} outside 0..{len(self._adj) - 1}")

    def out_strength(self, v: int) -> float:
        """Sum of weights on arcs leaving v (0.0 for a vertex with none)."""
        self._check_vertex(v)
        return self._out_strength[v]

    def out_degree(self, v: int) -> int:
        self._check_vertex(v)
        return self._out_degree[v]

    def has_arc(self, src: int, dst: int) -> bool:
        self._check_vertex(src)
        self._check_vertex(dst)
        return dst in self._adj[src]

    def weight(self, src: int, dst: int) -> float:
        self._check_vertex(src)
        self._check_vertex(dst)
        try:
            return self._adj[src][dst]
        except KeyError:
            raise MissingArcError(f"no arc {src} -> {dst}") from None

    def out_neighbors(self, v: int) -> Iterator[tuple[int, float]]:
        """(target, weight) pairs in ascending target order."""
        self._check_vertex(v)
        return iter(self._adj[v].items())

    def arcs(self) -> Iterator[tuple[int, int, float]]:
        """All arcs in ascending (src, dst) order."""
        for src, nbrs in enumerate(self._adj):
            for dst, w in nbrs.items():
                yield src, dst, w

    def external_label(self, v: int) -> str:
        """Original input label for a dense id (the id itself if none was given)."""
        self._check_vertex(v)
        if self._external_ids is None:
            return str(v)
        return self._external_ids[v]

    @property
    def external_ids(self) -> tuple[str, ...] | None:
        return self._external_ids

    # -- normalized weights ------------------------------------------------

    def normalized_weight(self, src: int, dst: int) -> float:
        """Share of src's outgoing weight carried by the arc src -> dst.

        This is the probability that src's next communication targets dst;
        over all out-neighbors of src the values sum to 1. Undefined (raises)
        when the arc does not exist.
        """
        w = self.weight(src, dst)
        return w / self._out_strength[src]

    # -- dyad analysis -----------------------------------------------------

    def mutual_dyads(self) -> Iterator[MutualDyad]:
        """Each unordered pair with arcs both ways, exactly once, (a, b)-sorted."""
        adj = self._adj
        for a, nbrs in enumerate(adj):
            for b, w_ab in nbrs.items():
                if b > a:
                    w_ba = adj[b].get(a)
                    if w_ba is not None:
                        yield MutualDyad(a, b, w_ab, w_ba)

    def dyad_census(self) -> DyadCensus:
        """Mutual/asymmetric/null counts over all unordered vertex pairs.

        Null dyads are derived arithmetically from V and the other counts;
        pairs are never enumerated, so the census stays O(arcs).
        """
        adj = self._adj
        mutual = 0
        for a, nbrs in enumerate(adj):
            for b in nbrs:
                if b > a and a in adj[b]:
                    mutual += 1
        asymmetric = self._arc_count - 2 * mutual
        v = len(adj)
        null_dyads = v * (v - 1) // 2 - mutual - asymmetric
        return DyadCensus(mutual, asymmetric, null_dyads, self._arc_count)

    # -- identity ------------------------------------------------------------

    def content_digest(self) -> str:
        """Stable sha256 over vertex labels and the sorted weighted arc list."""
        h = hashlib.sha256()
        h.update(f"V={self.vertex_count}\n".encode())
        for v in range(self.vertex_count):
            h.update(self.external_label(v).encode())
            h.update(b"\n")
        for src, dst, w in self.arcs():
            h.update(f"{src},{dst},{w!r}\n".encode())
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        if self.vertex_count != other.vertex_count or self._adj != other._adj:
            return False
        return all(
            self.external_label(v) == other.external_label(v)
            for v in range(self.vertex_count)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WeightedDigraph(vertices={self.vertex_count}, arcs={self._arc_count})"


class GraphBuilder:
    """Single-writer accumulator that aggregates raw arcs into a graph.

    Accepts arbitrary (homogeneous, sortable) vertex labels; parallel arcs
    aggregate by weight sum, self-loops are dropped and counted. ``build``
    assigns dense ids by sorting the distinct labels, so the resulting graph
    does not depend on insertion order.
    """

    def __init__(self) -> None:
        self._weights: dict[tuple[Hashable, Hashable], float] = {}
        self._vertices: set[Hashable] = set()
        self.self_loops_dropped = 0

    def add_vertex(self, label: Hashable) -> None:
        self._vertices.add(label)

    def add_arc(self, src: Hashable, dst: Hashable, weight: float = 1.0) -> None:
        if not weight > 0:
            raise DomainError(f"non-positive weight {weight} on arc ({src!r}, {dst!r})")
        if src == dst:
            self.self_loops_dropped += 1
            return
        self._vertices.add(src)
        self._vertices.add(dst)
        key = (src, dst)
        prev = self._weights.get(key)
        self._weights[key] = float(weight) if prev is None else prev + weight

    @property
    def distinct_arcs(self) -> int:
        return len(self._weights)

    def build(self) -> WeightedDigraph:
        labels = sorted(self._vertices)
        index = {label: i for i, label in enumerate(labels)}
        adj: list[dict[int, float]] = [{} for _ in labels]
        for (src, dst), w in self._weights.items():
            adj[index[src]][index[dst]] = w
        adj = [dict(sorted(nbrs.items())) for nbrs in adj]
        if not labels or labels == list(range(len(labels))):
            external: tuple[str, ...] | None = None
        else:
            external = tuple(str(label) for label in labels)
        return WeightedDigraph(adj, external)
