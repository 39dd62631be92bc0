"""Analysis reports and the four-network regime comparison.

Reports are plain dataclasses with stable JSON/CSV serializations: identical
inputs produce byte-identical output (keys sorted, floats via repr, no
timestamps), which the comparison pipeline relies on for reproducibility
checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from . import __version__ as _version
from .errors import DomainError, UndefinedCorrelationError
from .graph import DyadCensus, WeightedDigraph
from .metrics import (
    AssortativityResult,
    ReciprocityHistogram,
    concentration_scores,
    degree_assortativity,
    mean_median_r,
    reciprocity_distribution,
    reciprocity_records,
    DEFAULT_BIN_WIDTH,
)
from .nullmodels import DEFAULT_SWAP_MULTIPLIER, RegimeSet, RewireOutcome, four_regimes

SCHEMA_VERSION = 1

H_STAR_QUANTILES = (0.10, 0.25, 0.50, 0.75, 0.90)


@dataclass(frozen=True)
class Provenance:
    regime: str
    seed: int | None
    input_digest: str
    tool: str


@dataclass(frozen=True)
class AnalysisReport:
    """Census, reciprocity distribution and structural drivers of one network."""

    census: DyadCensus
    vertex_count: int
    class_proportions: tuple[float, float, float]
    mean_r: float | None
    median_r: float | None
    histogram: ReciprocityHistogram
    assortativity: AssortativityResult | None
    h_star_quantiles: tuple[tuple[float, float], ...]
    provenance: Provenance


@dataclass(frozen=True)
class OrderingVerdict:
    """Whether the four regime means fall in the predicted order.

    ``partial_ordering``: equidispersed-observed below both middle cells and
    the rewired non-equidispersed network above them. ``final_ordering``: the
    strict chain observed_equidispersed < rewired_equidispersed < observed <
    rewired. Purely descriptive; nothing is asserted.
    """

    means: dict[str, float | None]
    partial_ordering: bool
    final_ordering: bool
    degenerate: bool
    description: str


@dataclass(frozen=True)
class RegimeComparison:
    reports: dict[str, AnalysisReport]
    verdict: OrderingVerdict
    seed: int
    swap_multiplier: int
    rewire_outcome: RewireOutcome
    regimes: RegimeSet


def analyze(
    g: WeightedDigraph,
    regime: str = "observed",
    seed: int | None = None,
    bin_width: float = DEFAULT_BIN_WIDTH,
    threads: int = 1,
) -> AnalysisReport:
    """Run the full per-network measurement sweep."""
    records = reciprocity_records(g, threads=threads)
    histogram = reciprocity_distribution(records, bin_width=bin_width)
    mean_r, median_r = mean_median_r(records)
    try:
        assort: AssortativityResult | None = degree_assortativity(g, mutual_only=True)
    except (UndefinedCorrelationError, DomainError):
        # Too few pairs or zero degree variance: report the rest without r.
        assort = None
    scores = concentration_scores(g)
    if scores:
        values = np.asarray([s.h_star for s in scores])
        quantiles = tuple(
            (q, float(np.quantile(values, q))) for q in H_STAR_QUANTILES
        )
    else:
        quantiles = ()
    return AnalysisReport(
        census=g.dyad_census(),
        vertex_count=g.vertex_count,
        class_proportions=histogram.class_proportions,
        mean_r=mean_r,
        median_r=median_r,
        histogram=histogram,
        assortativity=assort,
        h_star_quantiles=quantiles,
        provenance=Provenance(
            regime=regime,
            seed=seed,
            input_digest=g.content_digest(),
            tool=f"recipnet/{_version}",
        ),
    )


def _ordering_verdict(means: dict[str, float | None]) -> OrderingVerdict:
    m_obs = means["observed"]
    m_eq = means["observed_equidispersed"]
    m_rw = means["rewired"]
    m_rw_eq = means["rewired_equidispersed"]
    if any(v is None for v in (m_obs, m_eq, m_rw, m_rw_eq)):
        return OrderingVerdict(
            means=means,
            partial_ordering=False,
            final_ordering=False,
            degenerate=True,
            description="degenerate: no mutual dyads",
        )
    if max(means.values()) == min(means.values()):
        return OrderingVerdict(
            means=means,
            partial_ordering=False,
            final_ordering=False,
            degenerate=True,
            description="degenerate: ties",
        )
    partial = m_eq < min(m_rw_eq, m_obs) <= max(m_rw_eq, m_obs) < m_rw
    final = m_eq < m_rw_eq < m_obs < m_rw
    if final:
        description = "final ordering holds"
    elif partial:
        description = "partial ordering holds; final ordering does not"
    else:
        description = "ordering violated"
    return OrderingVerdict(
        means=means,
        partial_ordering=partial,
        final_ordering=final,
        degenerate=False,
        description=description,
    )


def run_regime_comparison(
    g: WeightedDigraph,
    seed: int = 0,
    swap_multiplier: int = DEFAULT_SWAP_MULTIPLIER,
    bin_width: float = DEFAULT_BIN_WIDTH,
    threads: int = 1,
) -> RegimeComparison:
    """Build the four comparison networks, analyze each, judge the ordering."""
    regimes = four_regimes(g, seed=seed, swap_multiplier=swap_multiplier)
    reports = {
        label: analyze(graph, regime=label, seed=seed, bin_width=bin_width, threads=threads)
        for label, graph in regimes.items()
    }
    means = {label: rep.mean_r for label, rep in reports.items()}
    return RegimeComparison(
        reports=reports,
        verdict=_ordering_verdict(means),
        seed=seed,
        swap_multiplier=swap_multiplier,
        rewire_outcome=regimes.rewire_outcome,
        regimes=regimes,
    )


# -- serialization ----------------------------------------------------------


def report_to_dict(report: AnalysisReport) -> dict[str, Any]:
    prop = report.class_proportions
    return {
        "schema": SCHEMA_VERSION,
        "provenance": {
            "regime": report.provenance.regime,
            "seed": report.provenance.seed,
            "input_digest": report.provenance.input_digest,
            "tool": report.provenance.tool,
        },
        "vertex_count": report.vertex_count,
        "census": {
            "mutual": report.census.mutual,
            "asymmetric": report.census.asymmetric,
            "null_dyads": report.census.null_dyads,
            "total_arcs": report.census.total_arcs,
        },
        "reciprocity": {
            "mean": report.mean_r,
            "median": report.median_r,
            "class_proportions": {
                "reciprocal": prop[0],
                "partially_reciprocal": prop[1],
                "non_reciprocal": prop[2],
            },
        },
        "histogram": {
            "bin_width": report.histogram.bin_width,
            "total": report.histogram.total,
            "bins": [[lo, hi, c] for lo, hi, c in report.histogram.bins()],
        },
        "assortativity": (
            None
            if report.assortativity is None
            else {"r": report.assortativity.r, "pair_count": report.assortativity.pair_count}
        ),
        "h_star_quantiles": [[q, v] for q, v in report.h_star_quantiles],
    }


def comparison_to_dict(cmp: RegimeComparison) -> dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "seed": cmp.seed,
        "swap_multiplier": cmp.swap_multiplier,
        "rewire": {
            "attempted_swaps": cmp.rewire_outcome.attempted_swaps,
            "accepted_swaps": cmp.rewire_outcome.accepted_swaps,
            "residual_assortativity": cmp.rewire_outcome.residual_assortativity,
            "warning": cmp.rewire_outcome.warning,
        },
        "reports": {label: report_to_dict(rep) for label, rep in cmp.reports.items()},
        "verdict": {
            "means": cmp.verdict.means,
            "partial_ordering": cmp.verdict.partial_ordering,
            "final_ordering": cmp.verdict.final_ordering,
            "degenerate": cmp.verdict.degenerate,
            "description": cmp.verdict.description,
        },
    }


def json_bytes(payload: dict[str, Any]) -> bytes:
    """Canonical JSON encoding: sorted keys, two-space indent, trailing newline."""
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def write_report_csv(report: AnalysisReport, out: TextIO) -> None:
    """Summary key/value block, blank line, then histogram rows."""
    prop = report.class_proportions
    rows = [
        ("schema", SCHEMA_VERSION),
        ("regime", report.provenance.regime),
        ("seed", "" if report.provenance.seed is None else report.provenance.seed),
        ("input_digest", report.provenance.input_digest),
        ("tool", report.provenance.tool),
        ("vertex_count", report.vertex_count),
        ("mutual", report.census.mutual),
        ("asymmetric", report.census.asymmetric),
        ("null_dyads", report.census.null_dyads),
        ("total_arcs", report.census.total_arcs),
        ("mean_r", "" if report.mean_r is None else repr(report.mean_r)),
        ("median_r", "" if report.median_r is None else repr(report.median_r)),
        ("share_reciprocal", repr(prop[0])),
        ("share_partially_reciprocal", repr(prop[1])),
        ("share_non_reciprocal", repr(prop[2])),
        (
            "assortativity_r",
            "" if report.assortativity is None else repr(report.assortativity.r),
        ),
        (
            "assortativity_pairs",
            "" if report.assortativity is None else report.assortativity.pair_count,
        ),
    ]
    for q, v in report.h_star_quantiles:
        rows.append((f"h_star_q{int(round(q * 100)):02d}", repr(v)))
    out.write("metric,value\n")
    for key, value in rows:
        out.write(f"{key},{value}\n")
    out.write("\n")
    out.write("bin_low,bin_high,count\n")
    for lo, hi, c in report.histogram.bins():
        out.write(f"{lo!r},{hi!r},{c}\n")


def emit_report(report: AnalysisReport, fmt: str, path: str | Path) -> None:
    """Write a report as 'json' or 'csv'; identical reports yield identical bytes."""
    path = Path(path)
    if fmt == "json":
        path.write_bytes(json_bytes(report_to_dict(report)))
    elif fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as f:
            write_report_csv(report, f)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
