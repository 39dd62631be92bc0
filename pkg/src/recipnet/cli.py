"""Command-line interface.

Subcommands cover the whole pipeline: ingest raw event logs, inspect a
graph (census, reciprocity, concentration, assortativity), build null-model
variants (equidisperse, rewire, regimes), generate synthetic networks, and
emit full reports.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 degenerate input
escalated by --strict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import DegenerateInputError, DomainError, FormatError, UndefinedCorrelationError
from .graph import WeightedDigraph
from .ingest import aggregate_event_file, load_edge_list, save_snapshot
from .metrics import (
    DEFAULT_BIN_WIDTH,
    concentration_scores,
    degree_assortativity,
    reciprocity_distribution,
    reciprocity_records,
)
from .nullmodels import DEFAULT_SWAP_MULTIPLIER, RegimeConfig, equidisperse, maslov_sneppen_rewire
from .report import (
    analyze,
    comparison_to_dict,
    emit_report,
    json_bytes,
    report_to_dict,
    run_regime_comparison,
    write_report_csv,
)
from .synth import DegreeSpec, SynthConfig, generate

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4

THREADS_ENV = "RECIPNET_THREADS"


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help=f"worker threads for dyad sweeps (default ${THREADS_ENV} or 1)",
    )
    p.add_argument("--strict", action="store_true", help="escalate warnings to errors")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")


def _emit(payload: dict, out: str | None) -> None:
    data = json_bytes(payload)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def _warn_or_raise(strict: bool, message: str) -> None:
    if strict:
        raise DegenerateInputError(message)
    print(f"warning: {message}", file=sys.stderr)


class _OutputLock:
    """Guards an output directory against concurrent CLI runs."""

    def __init__(self, directory: Path) -> None:
        self._path = directory / ".recipnet.lock"
        self._fd: int | None = None

    def __enter__(self) -> "_OutputLock":
        try:
            self._fd = os.open(self._path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise DomainError(
                f"output directory is locked by another run ({self._path}); "
                "remove the lockfile if that run is dead"
            ) from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc: object) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._path.unlink(missing_ok=True)


def _cmd_ingest(args: argparse.Namespace) -> int:
    g, stats = aggregate_event_file(args.events, strict=args.strict)
    save_snapshot(g, args.output)
    _emit(
        {
            "events_read": stats.events_read,
            "self_calls_dropped": stats.self_calls_dropped,
            "malformed_lines": stats.malformed_lines,
            "vertices": stats.vertices,
            "arcs": stats.arcs,
            "snapshot": str(args.output),
        },
        None,
    )
    return EXIT_OK


def _cmd_census(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    c = g.dyad_census()
    _emit(
        {
            "vertex_count": g.vertex_count,
            "mutual": c.mutual,
            "asymmetric": c.asymmetric,
            "null_dyads": c.null_dyads,
            "total_arcs": c.total_arcs,
        },
        args.output,
    )
    return EXIT_OK


def _cmd_reciprocity(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    records = reciprocity_records(g, threads=args.threads)
    if args.records:
        with open(args.records, "w", encoding="utf-8", newline="") as f:
            f.write("a,b,w_ab,w_ba,p_ab,p_ba,r_value,dyad_class\n")
            for rec in records:
                d = rec.dyad
                f.write(
                    f"{g.external_label(d.a)},{g.external_label(d.b)},"
                    f"{d.w_ab!r},{d.w_ba!r},{rec.p_ab!r},{rec.p_ba!r},"
                    f"{rec.r_value!r},{rec.dyad_class.value}\n"
                )
    hist = reciprocity_distribution(records, bin_width=args.bin_width)
    if not records:
        _warn_or_raise(args.strict, "graph has no mutual dyads")
    _emit(
        {
            "dyads": hist.total,
            "bin_width": hist.bin_width,
            "bins": [[lo, hi, c] for lo, hi, c in hist.bins()],
            "class_proportions": {
                "reciprocal": hist.class_proportions[0],
                "partially_reciprocal": hist.class_proportions[1],
                "non_reciprocal": hist.class_proportions[2],
            },
        },
        args.output,
    )
    return EXIT_OK


def _cmd_concentration(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    scores = concentration_scores(g)
    if args.records:
        with open(args.records, "w", encoding="utf-8", newline="") as f:
            f.write("vertex,out_degree,h,h_star\n")
            for s in scores:
                f.write(f"{g.external_label(s.vertex)},{g.out_degree(s.vertex)},{s.h!r},{s.h_star!r}\n")
    if not scores:
        _warn_or_raise(args.strict, "no vertices with out-degree >= 2")
    _emit(
        {
            "vertices_scored": len(scores),
            "mean_h_star": (sum(s.h_star for s in scores) / len(scores)) if scores else None,
        },
        args.output,
    )
    return EXIT_OK


def _cmd_assortativity(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    try:
        res = degree_assortativity(g, mutual_only=(args.arcs == "mutual"))
    except UndefinedCorrelationError as exc:
        _warn_or_raise(args.strict, str(exc))
        _emit({"r": None, "pair_count": 0, "arcs": args.arcs}, args.output)
        return EXIT_OK
    _emit({"r": res.r, "pair_count": res.pair_count, "arcs": args.arcs}, args.output)
    return EXIT_OK


def _cmd_equidisperse(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    save_snapshot(equidisperse(g), args.output, regime="equidispersed")
    return EXIT_OK


def _cmd_rewire(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    cfg = RegimeConfig(
        destroy_assortativity=True,
        impose_equidispersion=False,
        seed=args.seed,
        swap_multiplier=args.swap_multiplier,
    )
    outcome = maslov_sneppen_rewire(g, cfg)
    if outcome.warning:
        _warn_or_raise(args.strict, outcome.warning)
    save_snapshot(
        outcome.graph,
        args.output,
        regime="rewired",
        seed=args.seed,
        extra_provenance={
            "attempted_swaps": outcome.attempted_swaps,
            "accepted_swaps": outcome.accepted_swaps,
        },
    )
    _emit(
        {
            "attempted_swaps": outcome.attempted_swaps,
            "accepted_swaps": outcome.accepted_swaps,
            "residual_assortativity": outcome.residual_assortativity,
            "warning": outcome.warning,
            "snapshot": str(args.output),
        },
        None,
    )
    return EXIT_OK


def _cmd_regimes(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with _OutputLock(outdir):
        comparisons = []
        for replica in range(args.replicas):
            seed = args.seed + replica
            cmp = run_regime_comparison(
                g,
                seed=seed,
                swap_multiplier=args.swap_multiplier,
                bin_width=args.bin_width,
                threads=args.threads,
            )
            comparisons.append(cmp)
            if replica == 0:
                for label, rep in cmp.reports.items():
                    emit_report(rep, args.format, outdir / f"{label}.{args.format}")
                (outdir / "comparison.json").write_bytes(json_bytes(comparison_to_dict(cmp)))
                if args.save_graphs:
                    for label, graph in cmp.regimes.items():
                        save_snapshot(
                            graph, outdir / f"{label}.graph.csv", regime=label, seed=seed
                        )
            else:
                (outdir / f"comparison.seed{seed}.json").write_bytes(
                    json_bytes(comparison_to_dict(cmp))
                )
        if args.replicas > 1:
            (outdir / "replicas.json").write_bytes(json_bytes(_replica_summary(comparisons)))
        if comparisons[0].verdict.degenerate:
            _warn_or_raise(args.strict, comparisons[0].verdict.description)
    _emit(
        {
            "outdir": str(outdir),
            "replicas": args.replicas,
            "verdict": comparisons[0].verdict.description,
        },
        None,
    )
    return EXIT_OK


def _replica_summary(comparisons: list) -> dict:
    """Cross-replica mean and spread of each cell's mean score (error bars)."""
    labels = list(comparisons[0].reports)
    cells = {}
    for label in labels:
        values = [c.verdict.means[label] for c in comparisons]
        clean = [v for v in values if v is not None]
        n = len(clean)
        mean = sum(clean) / n if n else None
        std = (sum((v - mean) ** 2 for v in clean) / n) ** 0.5 if n else None
        cells[label] = {"per_seed": values, "mean": mean, "std": std}
    return {
        "schema": 1,
        "seeds": [c.seed for c in comparisons],
        "cells": cells,
        "verdicts": [c.verdict.description for c in comparisons],
        "final_ordering_count": sum(1 for c in comparisons if c.verdict.final_ordering),
    }


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = SynthConfig(
        vertex_count=args.vertices,
        degree_distribution=DegreeSpec.parse(args.degree_dist),
        target_assortativity=args.assortativity,
        dispersion=args.dispersion,
        seed=args.seed,
    )
    g = generate(cfg)
    save_snapshot(g, args.output, regime="synthetic", seed=args.seed)
    _emit(
        {
            "vertices": g.vertex_count,
            "arcs": g.arc_count,
            "mutual_dyads": g.dyad_census().mutual,
            "snapshot": str(args.output),
        },
        None,
    )
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    g = load_edge_list(args.graph, strict=args.strict)
    rep = analyze(g, regime=args.regime, seed=args.seed, bin_width=args.bin_width, threads=args.threads)
    if args.output:
        emit_report(rep, args.format, args.output)
    elif args.format == "json":
        sys.stdout.write(json_bytes(report_to_dict(rep)).decode("utf-8"))
    else:
        write_report_csv(rep, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recipnet",
        description="Weighted reciprocity analysis on directed communication graphs.",
    )
    parser.add_argument("--version", action="version", version=f"recipnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="aggregate an event log into a graph snapshot")
    p.add_argument("events", help="events CSV (timestamp,caller,callee)")
    p.add_argument("-o", "--output", required=True, help="snapshot path (graph CSV)")
    _common_flags(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("census", help="mutual/asymmetric/null dyad counts")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    _common_flags(p)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("reciprocity", help="per-dyad reciprocity distribution")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.add_argument("--records", help="also write per-dyad records CSV here")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    _common_flags(p)
    p.set_defaults(func=_cmd_reciprocity)

    p = sub.add_parser("concentration", help="per-vertex weight concentration")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.add_argument("--records", help="also write per-vertex scores CSV here")
    _common_flags(p)
    p.set_defaults(func=_cmd_concentration)

    p = sub.add_parser("assortativity", help="degree assortativity across linked dyads")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.add_argument("--arcs", choices=("mutual", "full"), default="mutual")
    _common_flags(p)
    p.set_defaults(func=_cmd_assortativity)

    p = sub.add_parser("equidisperse", help="equal-split weight transform")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_equidisperse)

    p = sub.add_parser("rewire", help="degree-preserving backbone randomization")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--swap-multiplier", type=int, default=DEFAULT_SWAP_MULTIPLIER)
    _common_flags(p)
    p.set_defaults(func=_cmd_rewire)

    p = sub.add_parser("regimes", help="four-network comparison with ordering verdict")
    p.add_argument("graph")
    p.add_argument("--outdir", required=True)
    p.add_argument("--swap-multiplier", type=int, default=DEFAULT_SWAP_MULTIPLIER)
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--save-graphs", action="store_true", help="also write regime snapshots")
    p.add_argument(
        "--replicas",
        type=int,
        default=1,
        help="repeat with consecutive seeds and summarize spread across runs",
    )
    _common_flags(p)
    p.set_defaults(func=_cmd_regimes)

    p = sub.add_parser("synth", help="generate a synthetic network")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--degree-dist", default="poisson:8", help="powerlaw:G, poisson:M or regular:K")
    p.add_argument("--assortativity", type=float, default=0.0)
    p.add_argument("--dispersion", type=float, default=0.0)
    _common_flags(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("report", help="full analysis report for one graph")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.add_argument("--regime", default="observed", help="regime label for provenance")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    _common_flags(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
