"""Graph core: strengths, normalized weights, dyad enumeration, census."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recipnet.errors import DomainError, MissingArcError
from recipnet.graph import DyadCensus, GraphBuilder, MutualDyad, WeightedDigraph

from conftest import random_digraph, small_graphs


def brute_force_census(g: WeightedDigraph) -> DyadCensus:
    """O(V^2) oracle: classify every unordered pair directly."""
    mutual = asymmetric = null = 0
    for a in range(g.vertex_count):
        for b in range(a + 1, g.vertex_count):
            ab = g.has_arc(a, b)
            ba = g.has_arc(b, a)
            if ab and ba:
                mutual += 1
            elif ab or ba:
                asymmetric += 1
            else:
                null += 1
    return DyadCensus(mutual, asymmetric, null, g.arc_count)


class TestOutStrength:
    def test_sums_outgoing_weights(self):
        g = WeightedDigraph.from_dense_arcs(3, [(0, 1, 6.0), (0, 2, 2.0)])
        assert g.out_strength(0) == 8.0

    def test_no_outgoing_arcs_is_zero(self):
        g = WeightedDigraph.from_dense_arcs(2, [(0, 1, 3.0)])
        assert g.out_strength(1) == 0.0

    def test_matches_per_arc_resummation_on_random_graph(self):
        g = random_digraph(random.Random(7), 50, arc_fraction=0.08)
        sums = [0.0] * g.vertex_count
        for src, _, w in g.arcs():
            sums[src] += w
        for v in range(g.vertex_count):
            assert g.out_strength(v) == pytest.approx(sums[v], abs=1e-12)

    def test_invalid_vertex_raises(self):
        g = WeightedDigraph.from_dense_arcs(2, [(0, 1, 1.0)])
        with pytest.raises(DomainError):
            g.out_strength(2)
        with pytest.raises(DomainError):
            g.out_strength(-1)


class TestNormalizedWeight:
    def test_direct_ratio(self):
        g = WeightedDigraph.from_dense_arcs(3, [(0, 1, 6.0), (0, 2, 2.0)])
        assert g.normalized_weight(0, 1) == 0.75

    def test_single_neighbor_is_one(self):
        g = WeightedDigraph.from_dense_arcs(2, [(0, 1, 17.0)])
        assert g.normalized_weight(0, 1) == 1.0

    def test_missing_arc_raises(self):
        g = WeightedDigraph.from_dense_arcs(3, [(0, 1, 1.0)])
        with pytest.raises(MissingArcError):
            g.normalized_weight(1, 0)

    def test_sums_to_one_over_neighbors(self):
        g = random_digraph(random.Random(11), 40)
        for v in range(g.vertex_count):
            if g.out_degree(v) == 0:
                continue
            total = math.fsum(g.normalized_weight(v, u) for u, _ in g.out_neighbors(v))
            assert abs(total - 1.0) <= 1e-12

    @given(small_graphs())
    @settings(max_examples=60)
    def test_sums_to_one_property(self, g):
        for v in range(g.vertex_count):
            if g.out_degree(v) == 0:
                continue
            total = math.fsum(g.normalized_weight(v, u) for u, _ in g.out_neighbors(v))
            assert abs(total - 1.0) <= 1e-12


class TestDyadCensus:
    def test_empty_graph(self):
        g = WeightedDigraph.from_dense_arcs(5, [])
        c = g.dyad_census()
        assert (c.mutual, c.asymmetric, c.null_dyads) == (0, 0, 10)

    def test_hand_enumerable(self):
        g = WeightedDigraph.from_dense_arcs(4, [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0)])
        c = g.dyad_census()
        assert c == DyadCensus(mutual=1, asymmetric=1, null_dyads=4, total_arcs=3)

    def test_reported_large_scale_counts_satisfy_identity(self):
        # Consistency shape at production scale: counts of this magnitude
        # must satisfy the arc identity, whatever the data.
        c = DyadCensus(
            mutual=8_600_000, asymmetric=16_800_000, null_dyads=0, total_arcs=34_000_000
        )
        assert c.arc_identity_holds()

    def test_matches_brute_force_on_random_graphs(self):
        rnd = random.Random(3)
        for _ in range(20):
            g = random_digraph(rnd, rnd.randint(2, 40), arc_fraction=rnd.uniform(0.01, 0.2))
            assert g.dyad_census() == brute_force_census(g)

    @given(small_graphs())
    @settings(max_examples=80)
    def test_identities_hold(self, g):
        c = g.dyad_census()
        assert c.arc_identity_holds()
        assert c.pair_identity_holds(g.vertex_count)


class TestMutualDyads:
    def test_single_mutual_pair(self):
        g = WeightedDigraph.from_dense_arcs(3, [(1, 2, 5.0), (2, 1, 3.0)])
        dyads = list(g.mutual_dyads())
        assert dyads == [MutualDyad(1, 2, 5.0, 3.0)]

    def test_one_way_excluded(self):
        g = WeightedDigraph.from_dense_arcs(3, [(1, 2, 5.0)])
        assert list(g.mutual_dyads()) == []

    def test_matches_quadratic_pair_scan(self):
        g = random_digraph(random.Random(5), 30, arc_fraction=0.1)
        expected = []
        for a in range(g.vertex_count):
            for b in range(a + 1, g.vertex_count):
                if g.has_arc(a, b) and g.has_arc(b, a):
                    expected.append(MutualDyad(a, b, g.weight(a, b), g.weight(b, a)))
        assert list(g.mutual_dyads()) == expected

    def test_sorted_and_unique(self):
        g = random_digraph(random.Random(9), 25, mutual_bias=0.9)
        dyads = list(g.mutual_dyads())
        keys = [(d.a, d.b) for d in dyads]
        assert keys == sorted(set(keys))

    @given(small_graphs())
    @settings(max_examples=60)
    def test_count_equals_census_mutual(self, g):
        assert len(list(g.mutual_dyads())) == g.dyad_census().mutual


class TestConstruction:
    def test_order_independent(self):
        arcs = [(0, 1, 2.5), (1, 0, 4.0), (2, 0, 1.0), (0, 2, 3.0), (2, 1, 7.0)]
        g1 = WeightedDigraph.from_dense_arcs(3, arcs)
        g2 = WeightedDigraph.from_dense_arcs(3, list(reversed(arcs)))
        assert g1 == g2
        assert [g1.out_strength(v) for v in range(3)] == [g2.out_strength(v) for v in range(3)]
        assert g1.dyad_census() == g2.dyad_census()
        assert g1.content_digest() == g2.content_digest()

    def test_builder_order_independent_with_labels(self):
        rows = [("x", "y", 2.0), ("y", "x", 1.0), ("z", "x", 5.0), ("x", "z", 4.0)]
        b1, b2 = GraphBuilder(), GraphBuilder()
        for r in rows:
            b1.add_arc(*r)
        for r in reversed(rows):
            b2.add_arc(*r)
        assert b1.build() == b2.build()

    def test_builder_aggregates_parallel_arcs(self):
        b = GraphBuilder()
        b.add_arc("a", "b", 2.0)
        b.add_arc("a", "b", 3.0)
        g = b.build()
        assert g.weight(0, 1) == 5.0

    def test_builder_drops_and_counts_self_loops(self):
        b = GraphBuilder()
        b.add_arc("a", "a", 1.0)
        b.add_arc("a", "b", 1.0)
        g = b.build()
        assert b.self_loops_dropped == 1
        assert g.arc_count == 1

    def test_rejects_bad_arcs(self):
        with pytest.raises(DomainError):
            WeightedDigraph.from_dense_arcs(2, [(0, 0, 1.0)])
        with pytest.raises(DomainError):
            WeightedDigraph.from_dense_arcs(2, [(0, 1, 0.0)])
        with pytest.raises(DomainError):
            WeightedDigraph.from_dense_arcs(2, [(0, 5, 1.0)])
        with pytest.raises(DomainError):
            WeightedDigraph.from_dense_arcs(2, [(0, 1, 1.0), (0, 1, 2.0)])

    def test_external_labels(self):
        b = GraphBuilder()
        b.add_arc("carol", "bob", 1.0)
        g = b.build()
        assert [g.external_label(v) for v in range(2)] == ["bob", "carol"]

    def test_mutual_dyad_validates_orientation(self):
        with pytest.raises(DomainError):
            MutualDyad(2, 1, 1.0, 1.0)
