"""Equidispersion transform, backbone rewiring, weight reattachment, regimes."""

from __future__ import annotations

import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings

from recipnet.errors import DomainError, IntegrityError
from recipnet.graph import WeightedDigraph
from recipnet.metrics import degree_assortativity, equidispersion_prediction, reciprocity
from recipnet.nullmodels import (
    RegimeConfig,
    apply_regime,
    equidisperse,
    four_regimes,
    maslov_sneppen_rewire,
    reattach_weights,
)
from recipnet.synth import DegreeSpec, SynthConfig, generate

from conftest import mutual_graphs, random_digraph


def backbone_degrees(g: WeightedDigraph) -> list[int]:
    deg = [0] * g.vertex_count
    for d in g.mutual_dyads():
        deg[d.a] += 1
        deg[d.b] += 1
    return deg


def mutual_weight_multisets(g: WeightedDigraph) -> list[Counter]:
    out = [Counter() for _ in range(g.vertex_count)]
    for d in g.mutual_dyads():
        out[d.a][d.w_ab] += 1
        out[d.b][d.w_ba] += 1
    return out


class TestEquidisperse:
    def test_integer_division(self):
        g = WeightedDigraph.from_dense_arcs(5, [(0, v, 3.0) for v in range(1, 5)])
        eq = equidisperse(g)
        assert all(w == 3.0 for _, _, w in eq.arcs())

    def test_fractional_share(self):
        g = WeightedDigraph.from_dense_arcs(3, [(0, 1, 3.0), (0, 2, 4.0)])
        eq = equidisperse(g)
        assert [w for _, _, w in eq.arcs()] == [3.5, 3.5]

    def test_topology_unchanged(self):
        g = random_digraph(random.Random(1), 30)
        eq = equidisperse(g)
        assert [(a, b) for a, b, _ in eq.arcs()] == [(a, b) for a, b, _ in g.arcs()]

    @given(mutual_graphs())
    @settings(max_examples=60)
    def test_strength_preserved(self, g):
        eq = equidisperse(g)
        for v in range(g.vertex_count):
            assert eq.out_strength(v) == pytest.approx(g.out_strength(v), rel=1e-9, abs=1e-9)

    @given(mutual_graphs())
    @settings(max_examples=60)
    def test_idempotent(self, g):
        once = equidisperse(g)
        twice = equidisperse(once)
        w1 = [w for _, _, w in once.arcs()]
        w2 = [w for _, _, w in twice.arcs()]
        assert w1 == pytest.approx(w2, rel=1e-12)
        assert [(a, b) for a, b, _ in once.arcs()] == [(a, b) for a, b, _ in twice.arcs()]

    @given(mutual_graphs())
    @settings(max_examples=60)
    def test_every_dyad_hits_degree_closed_form(self, g):
        eq = equidisperse(g)
        for d in eq.mutual_dyads():
            predicted = equidispersion_prediction(eq.out_degree(d.a), eq.out_degree(d.b))
            assert abs(reciprocity(eq, d).r_value - predicted) <= 1e-9


class _ScriptedRandom(random.Random):
    """Deterministic sequence of randrange/random results for forcing swaps."""

    def __new__(cls, *args):
        return super().__new__(cls, 0)

    def __init__(self, randranges, randoms):
        super().__init__(0)
        self._rr = list(randranges)
        self._rand = list(randoms)

    def randrange(self, *args):  # type: ignore[override]
        return self._rr.pop(0) if self._rr else super().randrange(*args)

    def random(self):  # type: ignore[override]
        return self._rand.pop(0) if self._rand else super().random()


class TestRewire:
    def test_forced_swap_on_two_disjoint_edges(self):
        arcs = [(1, 2, 1.0), (2, 1, 1.0), (3, 4, 1.0), (4, 3, 1.0)]
        g = WeightedDigraph.from_dense_arcs(5, arcs)
        cfg = RegimeConfig(True, False, seed=0, swap_multiplier=1)
        # Two attempts in the budget: the first picks edges 0 and 1 with no
        # orientation flips, turning (1,2),(3,4) into (1,4),(3,2); the second
        # picks the same edge twice and is rejected.
        rng = _ScriptedRandom([0, 1, 0, 0], [0.9, 0.9])
        out = maslov_sneppen_rewire(g, cfg, rng=rng)
        pairs = {(d.a, d.b) for d in out.graph.mutual_dyads()}
        assert pairs == {(1, 4), (2, 3)}
        assert backbone_degrees(out.graph) == backbone_degrees(g)
        assert out.accepted_swaps == 1

    def test_swap_creating_duplicate_is_rejected(self):
        # Mutual triangle: every proposal collides with an existing edge.
        arcs = []
        for a in range(3):
            for b in range(3):
                if a != b:
                    arcs.append((a, b, float(a + b + 1)))
        g = WeightedDigraph.from_dense_arcs(3, arcs)
        cfg = RegimeConfig(True, False, seed=5, swap_multiplier=20)
        out = maslov_sneppen_rewire(g, cfg)
        assert out.accepted_swaps == 0
        assert out.warning is not None
        assert out.graph is g

    def test_too_few_edges_rejected(self):
        g = WeightedDigraph.from_dense_arcs(2, [(0, 1, 1.0), (1, 0, 1.0)])
        with pytest.raises(DomainError):
            maslov_sneppen_rewire(g, RegimeConfig(True, False))

    def test_degree_sequence_preserved(self):
        rnd = random.Random(77)
        for seed in range(5):
            g = random_digraph(rnd, 40, arc_fraction=0.08, mutual_bias=0.8)
            cfg = RegimeConfig(True, False, seed=seed, swap_multiplier=5)
            out = maslov_sneppen_rewire(g, cfg)
            assert sorted(backbone_degrees(out.graph)) == sorted(backbone_degrees(g))
            assert backbone_degrees(out.graph) == backbone_degrees(g)

    def test_same_seed_is_bit_reproducible(self):
        g = random_digraph(random.Random(8), 50, mutual_bias=0.8)
        cfg = RegimeConfig(True, False, seed=123, swap_multiplier=5)
        out1 = maslov_sneppen_rewire(g, cfg)
        out2 = maslov_sneppen_rewire(g, cfg)
        assert out1.graph == out2.graph
        assert (out1.attempted_swaps, out1.accepted_swaps) == (
            out2.attempted_swaps,
            out2.accepted_swaps,
        )

    def test_neutralizes_assortative_graph(self):
        cfg_synth = SynthConfig(
            vertex_count=600,
            degree_distribution=DegreeSpec("poisson", 6.0),
            target_assortativity=0.4,
            dispersion=0.4,
            seed=3,
        )
        g = generate(cfg_synth)
        before = degree_assortativity(g).r
        assert before >= 0.3
        out = maslov_sneppen_rewire(g, RegimeConfig(True, False, seed=9, swap_multiplier=10))
        assert out.residual_assortativity is not None
        assert abs(out.residual_assortativity) < 0.05

    def test_one_way_arcs_carried_through(self):
        arcs = [(0, 1, 2.0), (1, 0, 3.0), (2, 3, 4.0), (3, 2, 5.0), (0, 4, 7.0)]
        g = WeightedDigraph.from_dense_arcs(5, arcs)
        cfg = RegimeConfig(True, False, seed=1, swap_multiplier=3)
        out = maslov_sneppen_rewire(g, cfg)
        if out.accepted_swaps:
            assert out.graph.weight(0, 4) == 7.0
        dropped = maslov_sneppen_rewire(g, cfg, keep_one_way=False)
        if dropped.accepted_swaps:
            assert not dropped.graph.has_arc(0, 4)


class TestReattachWeights:
    def test_two_neighbor_permutation(self):
        orig = WeightedDigraph.from_dense_arcs(
            4, [(0, 1, 5.0), (1, 0, 1.0), (0, 2, 1.0), (2, 0, 2.0), (1, 3, 4.0), (3, 1, 4.0)]
        )
        # New backbone 0-1, 0-3, 1-2 keeps every mutual degree (2,2,1,1).
        skeleton_arcs = []
        for a, b in [(0, 1), (0, 3), (1, 2)]:
            skeleton_arcs += [(a, b, 1.0), (b, a, 1.0)]
        skeleton = WeightedDigraph.from_dense_arcs(4, skeleton_arcs)
        out = reattach_weights(skeleton, orig, random.Random(0))
        assert sorted(w for _, u, w in [(0, u, w) for u, w in out.out_neighbors(0)]) == [1.0, 5.0]
        assert out.out_strength(0) == orig.out_strength(0)

    def test_equal_weights_unaffected_by_permutation(self):
        orig = WeightedDigraph.from_dense_arcs(
            3, [(0, 1, 2.0), (1, 0, 2.0), (0, 2, 2.0), (2, 0, 2.0)]
        )
        out = reattach_weights(orig, orig, random.Random(5))
        assert out == orig

    @given(mutual_graphs())
    @settings(max_examples=60)
    def test_multisets_preserved(self, g):
        out = reattach_weights(g, g, random.Random(11))
        assert mutual_weight_multisets(out) == mutual_weight_multisets(g)
        for v in range(g.vertex_count):
            assert out.out_strength(v) == pytest.approx(g.out_strength(v), abs=1e-12)

    def test_degree_mismatch_raises(self):
        orig = WeightedDigraph.from_dense_arcs(4, [(0, 1, 1.0), (1, 0, 1.0)])
        other = WeightedDigraph.from_dense_arcs(
            4, [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)]
        )
        with pytest.raises(IntegrityError):
            reattach_weights(other, orig, random.Random(0))


class TestRegimes:
    def test_identity_cell_returns_input(self):
        g = random_digraph(random.Random(4), 30, mutual_bias=0.8)
        cfg = RegimeConfig(destroy_assortativity=False, impose_equidispersion=False)
        out, outcome = apply_regime(g, cfg)
        assert out is g
        assert outcome is None
        before = [reciprocity(g, d).r_value for d in g.mutual_dyads()]
        after = [reciprocity(out, d).r_value for d in out.mutual_dyads()]
        assert before == after

    def test_four_regimes_structure(self):
        g = random_digraph(random.Random(14), 60, mutual_bias=0.8)
        regimes = four_regimes(g, seed=2, swap_multiplier=5)
        labels = [label for label, _ in regimes.items()]
        assert labels == [
            "observed",
            "observed_equidispersed",
            "rewired",
            "rewired_equidispersed",
        ]
        assert regimes.observed is g
        # Both rewired cells share one backbone.
        rw_pairs = {(d.a, d.b) for d in regimes.rewired.mutual_dyads()}
        rw_eq_pairs = {(d.a, d.b) for d in regimes.rewired_equidispersed.mutual_dyads()}
        assert rw_pairs == rw_eq_pairs

    def test_rewired_equidispersed_hits_closed_form(self):
        g = random_digraph(random.Random(25), 50, mutual_bias=0.8)
        regimes = four_regimes(g, seed=7, swap_multiplier=5)
        eq = regimes.rewired_equidispersed
        for d in eq.mutual_dyads():
            predicted = equidispersion_prediction(eq.out_degree(d.a), eq.out_degree(d.b))
            assert abs(reciprocity(eq, d).r_value - predicted) <= 1e-9

    def test_equidispersed_cell_strengths_match_observed(self):
        g = random_digraph(random.Random(33), 40, mutual_bias=0.9)
        regimes = four_regimes(g, seed=1, swap_multiplier=5)
        for v in range(g.vertex_count):
            assert regimes.observed_equidispersed.out_strength(v) == pytest.approx(
                g.out_strength(v), rel=1e-9
            )
