"""Synthetic mutual-dyad networks with tunable assortativity and dispersion.

The generator builds an undirected configuration-model backbone, nudges its
degree assortativity toward a target with accept/reject edge swaps, turns
every edge into a mutual dyad, and finally draws each vertex's outgoing
weights from a concentration-controlled random split of a drawn strength.

The ``dispersion`` knob targets the mean normalized concentration score
directly: the split is Dirichlet with per-vertex alpha = (1-d)/(d*k), whose
expected normalized Herfindahl score equals d. dispersion 0 is an exact
equal split; dispersion 1 puts essentially all weight on one neighbor.

Everything is driven by one numpy PCG64 generator, so a seed fully
determines the output graph.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import WeightedDigraph

_TUNING_MULTIPLIER = 30
_TUNING_TOLERANCE = 0.01
_RESAMPLE_TRIES = 100
_MIN_SPLIT = 1e-12


@dataclass(frozen=True)
class DegreeSpec:
    """Degree distribution: powerlaw(exponent), poisson(mean) or regular(degree)."""

    kind: str
    param: float

    _KINDS = ("powerlaw", "poisson", "regular")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise DomainError(f"unknown degree distribution {self.kind!r}")
        if self.param <= 0:
            raise DomainError("degree distribution parameter must be positive")

    @classmethod
    def parse(cls, text: str) -> "DegreeSpec":
        """Parse 'kind:param', e.g. 'powerlaw:2.5' or 'poisson:8'."""
        kind, sep, param = text.partition(":")
        if not sep:
            raise DomainError(f"expected 'kind:param', got {text!r}")
        return cls(kind=kind, param=float(param))


@dataclass(frozen=True)
class SynthConfig:
    vertex_count: int
    degree_distribution: DegreeSpec
    target_assortativity: float = 0.0
    dispersion: float = 0.0
    seed: int = 0
    strength_sigma: float = 0.75

    def __post_init__(self) -> None:
        if self.vertex_count < 2:
            raise DomainError("need at least 2 vertices")
        if not -1.0 < self.target_assortativity < 1.0:
            raise DomainError("target assortativity must be in (-1, 1)")
        if not 0.0 <= self.dispersion <= 1.0:
            raise DomainError("dispersion must be in [0, 1]")


def _draw_degrees(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    v = cfg.vertex_count
    dist = cfg.degree_distribution
    if dist.kind == "regular":
        k = int(dist.param)
        if k < 1 or k >= v:
            raise DomainError(f"regular degree {k} infeasible for {v} vertices")
        if (k * v) % 2 != 0:
            raise DomainError("regular degree sequence has odd stub total")
        return np.full(v, k, dtype=np.int64)
    if dist.kind == "poisson":
        def draw() -> np.ndarray:
            return np.maximum(rng.poisson(dist.param, size=v), 1)
    else:  # powerlaw
        if dist.param <= 1.0:
            raise DomainError("power-law exponent must exceed 1")
        k_min, k_max = 2, max(3, int(round(v ** 0.5)))
        support = np.arange(k_min, k_max + 1, dtype=np.float64)
        probs = support ** (-dist.param)
        probs /= probs.sum()

        def draw() -> np.ndarray:
            return rng.choice(support.astype(np.int64), size=v, p=probs)

    for _ in range(_RESAMPLE_TRIES):
        degrees = draw()
        if int(degrees.sum()) % 2 == 0 and degrees.max() < v:
            return degrees
    raise DomainError("could not draw a feasible degree sequence")


def _stub_match(degrees: np.ndarray, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Configuration-model matching with repair rounds for colliding stubs.

    Self-pairs and duplicate pairs are thrown back and re-shuffled until they
    pair up or no progress is possible, so degrees are exact except in
    pathological leftovers (e.g. several stubs of one hub remaining).
    """
    stubs = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    edges: set[tuple[int, int]] = set()
    for _ in range(_RESAMPLE_TRIES):
        rng.shuffle(stubs)
        leftovers: list[int] = []
        it = iter(stubs.tolist())
        progress = False
        for a, b in zip(it, it):
            if a == b:
                leftovers.append(a)
                leftovers.append(b)
                continue
            key = (a, b) if a < b else (b, a)
            if key in edges:
                leftovers.append(a)
                leftovers.append(b)
                continue
            edges.add(key)
            progress = True
        if not leftovers or not progress:
            if leftovers:
                _place_leftovers(leftovers, edges, rng)
            break
        stubs = np.asarray(leftovers, dtype=np.int64)
    return sorted(edges)


def _place_leftovers(
    leftovers: list[int],
    edges: set[tuple[int, int]],
    rng: np.random.Generator,
) -> None:
    """Absorb stuck stub pairs by splitting an existing edge (u,v) into
    (s1,u) and (s2,v): degrees of u and v are unchanged, s1 and s2 gain one.
    Pairs that cannot be placed are dropped (tiny degree shortfall)."""
    edge_list = list(edges)
    it = iter(leftovers)
    for s1, s2 in zip(it, it):
        for _ in range(500):
            idx = int(rng.integers(0, len(edge_list)))
            u, v = edge_list[idx]
            if rng.random() < 0.5:
                u, v = v, u
            if s1 == u or s2 == v:
                continue
            e1 = (s1, u) if s1 < u else (u, s1)
            e2 = (s2, v) if s2 < v else (v, s2)
            if e1 == e2 or e1 in edges or e2 in edges:
                continue
            old = (u, v) if u < v else (v, u)
            edges.remove(old)
            edges.add(e1)
            edges.add(e2)
            edge_list[idx] = e1
            edge_list.append(e2)
            break


def _tune_assortativity(
    edges: list[tuple[int, int]],
    vertex_count: int,
    target: float,
    rng: np.random.Generator,
) -> tuple[list[tuple[int, int]], float | None]:
    """Greedy degree-preserving swaps driving the backbone's r toward target."""
    adjacency: list[set[int]] = [set() for _ in range(vertex_count)]
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    degree = [len(s) for s in adjacency]
    x = [d - 1 for d in degree]
    m = len(edges)
    if m < 2:
        return edges, None
    n_pairs = 2 * m
    mean = sum(x[a] + x[b] for a, b in edges) / n_pairs
    var = sum(x[a] ** 2 + x[b] ** 2 for a, b in edges) / n_pairs - mean * mean
    if var <= 0.0:
        return edges, None
    sum_xy = sum(x[a] * x[b] for a, b in edges)

    def r_of(s_xy: float) -> float:
        return (2 * s_xy / n_pairs - mean * mean) / var

    budget = _TUNING_MULTIPLIER * m
    # Batch the random draws; per-call Generator overhead dominates otherwise.
    idx = rng.integers(0, m, size=2 * budget)
    flips = rng.random(size=2 * budget)
    pos = 0
    for _ in range(budget):
        current = r_of(sum_xy)
        if abs(current - target) <= _TUNING_TOLERANCE:
            break
        i1 = int(idx[pos])
        i2 = int(idx[pos + 1])
        f1 = flips[pos]
        f2 = flips[pos + 1]
        pos += 2
        if i1 == i2:
            continue
        a, b = edges[i1]
        c, d = edges[i2]
        if f1 < 0.5:
            a, b = b, a
        if f2 < 0.5:
            c, d = d, c
        if a == d or c == b or d in adjacency[a] or b in adjacency[c]:
            continue
        e1 = (a, d) if a < d else (d, a)
        e2 = (c, b) if c < b else (b, c)
        if e1 == e2:
            continue
        new_xy = sum_xy + x[a] * x[d] + x[c] * x[b] - x[a] * x[b] - x[c] * x[d]
        if abs(r_of(new_xy) - target) >= abs(current - target):
            continue
        adjacency[a].discard(b)
        adjacency[b].discard(a)
        adjacency[c].discard(d)
        adjacency[d].discard(c)
        adjacency[a].add(d)
        adjacency[d].add(a)
        adjacency[c].add(b)
        adjacency[b].add(c)
        edges[i1] = e1
        edges[i2] = e2
        sum_xy = new_xy
    achieved = r_of(sum_xy)
    if abs(achieved - target) > _TUNING_TOLERANCE:
        warnings.warn(
            f"assortativity target {target} not reached; achieved {achieved:.4f}",
            stacklevel=3,
        )
    return edges, achieved


def _split_weights(
    strength: float,
    k: int,
    dispersion: float,
    rng: np.random.Generator,
) -> np.ndarray:
    if k == 1:
        return np.array([strength])
    if dispersion == 0.0:
        return np.full(k, strength / k)
    if dispersion >= 1.0:
        shares = np.full(k, _MIN_SPLIT)
        shares[rng.integers(0, k)] = 1.0 - (k - 1) * _MIN_SPLIT
        return strength * shares
    alpha = (1.0 - dispersion) / (dispersion * k)
    shares = rng.dirichlet(np.full(k, alpha))
    shares = np.maximum(shares, _MIN_SPLIT)
    shares /= shares.sum()
    return strength * shares


def generate(cfg: SynthConfig) -> WeightedDigraph:
    """Generate a fully mutual weighted digraph matching the config.

    Deterministic per seed. Measured backbone assortativity lands within
    about +/-0.05 of the target for achievable targets; the realized mean
    concentration score tracks the dispersion parameter.
    """
    rng = np.random.default_rng(cfg.seed)
    degrees = _draw_degrees(cfg, rng)
    edges = _stub_match(degrees, rng)
    if len(edges) < 1:
        raise DomainError("degree sequence produced no edges")
    edges, _ = _tune_assortativity(edges, cfg.vertex_count, cfg.target_assortativity, rng)

    partners: list[list[int]] = [[] for _ in range(cfg.vertex_count)]
    for a, b in edges:
        partners[a].append(b)
        partners[b].append(a)

    arcs: list[tuple[int, int, float]] = []
    for v in range(cfg.vertex_count):
        k = len(partners[v])
        if k == 0:
            continue
        strength = k * float(rng.lognormal(mean=0.0, sigma=cfg.strength_sigma))
        weights = _split_weights(strength, k, cfg.dispersion, rng)
        arcs.extend((v, u, float(w)) for u, w in zip(sorted(partners[v]), weights))
    return WeightedDigraph.from_dense_arcs(cfg.vertex_count, arcs)
