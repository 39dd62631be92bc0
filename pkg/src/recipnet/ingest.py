"""Event-log aggregation and graph snapshot persistence.

File formats (UTF-8, LF, plain comma separation, no quoting; a field
containing a comma makes the line malformed):

* events: header ``timestamp,caller,callee``; timestamp may be empty and is
  ignored by aggregation.
* graph snapshot: header ``src,dst,weight``; optional leading provenance
  lines starting with ``#`` (regime, seed, tool version) that parsers of the
  data body skip. A sidecar ``<name>.vertices.csv`` with header
  ``external_id,dense_id`` pins the dense-id mapping, including isolated
  vertices.

Aggregation is streaming: memory grows with the number of distinct arcs, not
with the number of events.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__ as _version
from .errors import DomainError, FormatError
from .graph import GraphBuilder, WeightedDigraph

EVENT_HEADER = "timestamp,caller,callee"
GRAPH_HEADER = "src,dst,weight"
VERTEX_HEADER = "external_id,dense_id"


@dataclass(frozen=True)
class CallEvent:
    caller: str
    callee: str
    timestamp: float | None = None


@dataclass
class IngestStats:
    """Line-level accounting for one aggregation run.

    events_read always equals the aggregated weight total plus dropped
    self-calls plus malformed lines.
    """

    events_read: int = 0
    self_calls_dropped: int = 0
    malformed_lines: int = 0
    vertices: int = 0
    arcs: int = 0


def _graph_from_counts(
    counts: dict[tuple[str, str], int],
    extra_vertices: Iterable[str] = (),
) -> WeightedDigraph:
    builder = GraphBuilder()
    for label in extra_vertices:
        builder.add_vertex(label)
    for (caller, callee), n in counts.items():
        builder.add_arc(caller, callee, float(n))
    return builder.build()


def aggregate_events(
    events: Iterable[CallEvent],
    strict: bool = False,
) -> tuple[WeightedDigraph, IngestStats]:
    """Count events per ordered (caller, callee) pair into arc weights.

    Self-calls are dropped and counted (in strict mode they abort). The
    result is independent of event order: arc weights are sums and the dense
    id mapping comes from sorting the distinct ids.
    """
    stats = IngestStats()
    counts: dict[tuple[str, str], int] = {}
    for ev in events:
        stats.events_read += 1
        if ev.caller == ev.callee:
            if strict:
                raise FormatError(f"self-call for id {ev.caller!r}")
            stats.self_calls_dropped += 1
            continue
        key = (ev.caller, ev.callee)
        counts[key] = counts.get(key, 0) + 1
    g = _graph_from_counts(counts)
    stats.vertices = g.vertex_count
    stats.arcs = g.arc_count
    return g, stats


def read_events(path: str | Path, strict: bool = False) -> Iterator[CallEvent]:
    """Parse an events file, skipping (or aborting on, in strict mode) bad lines."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        header = f.readline().rstrip("\r\n")
        if header != EVENT_HEADER:
            raise FormatError(f"expected header {EVENT_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(f, start=2):
            fields = line.rstrip("\r\n").split(",")
            if len(fields) != 3 or not fields[1] or not fields[2]:
                if strict:
                    raise FormatError(f"{path}:{lineno}: malformed event line")
                continue
            ts_text, caller, callee = fields
            ts = float(ts_text) if ts_text else None
            yield CallEvent(caller=caller, callee=callee, timestamp=ts)


def aggregate_event_file(
    path: str | Path,
    strict: bool = False,
) -> tuple[WeightedDigraph, IngestStats]:
    """One-pass parse-and-aggregate of an events file.

    Equivalent to ``aggregate_events(read_events(path))`` but avoids building
    an event object per line, which matters at tens of millions of events.
    """
    stats = IngestStats()
    counts: dict[tuple[str, str], int] = {}
    get = counts.get
    with open(path, "r", encoding="utf-8", newline="") as f:
        header = f.readline().rstrip("\r\n")
        if header != EVENT_HEADER:
            raise FormatError(f"expected header {EVENT_HEADER!r}, got {header!r}")
        read = 0
        dropped = 0
        malformed = 0
        for line in f:
            read += 1
            fields = line.rstrip("\r\n").split(",")
            if len(fields) != 3 or not fields[1] or not fields[2]:
                if strict:
                    raise FormatError(f"{path}: malformed event line {read + 1}")
                malformed += 1
                continue
            caller = fields[1]
            callee = fields[2]
            if caller == callee:
                if strict:
                    raise FormatError(f"{path}: self-call for id {caller!r}")
                dropped += 1
                continue
            key = (caller, callee)
            counts[key] = get(key, 0) + 1
    stats.events_read = read
    stats.self_calls_dropped = dropped
    stats.malformed_lines = malformed
    g = _graph_from_counts(counts)
    stats.vertices = g.vertex_count
    stats.arcs = g.arc_count
    return g, stats


def sidecar_path(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".vertices.csv")


def save_snapshot(
    g: WeightedDigraph,
    path: str | Path,
    regime: str | None = None,
    seed: int | None = None,
    extra_provenance: dict[str, object] | None = None,
) -> None:
    """Write a graph snapshot plus its vertex sidecar.

    Weights are written with ``repr`` so a load/save cycle is lossless. The
    provenance header records the tool version and, when given, the regime
    label, seed and any extra key=value pairs (e.g. swap statistics) that
    produced the graph.
    """
    path = Path(path)
    lines = [f"# tool=recipnet/{_version}"]
    if regime is not None:
        lines.append(f"# regime={regime}")
    if seed is not None:
        lines.append(f"# seed={seed}")
    for key, value in (extra_provenance or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(GRAPH_HEADER)
    for src, dst, w in g.arcs():
        lines.append(f"{g.external_label(src)},{g.external_label(dst)},{w!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    side = [VERTEX_HEADER]
    side.extend(f"{g.external_label(v)},{v}" for v in range(g.vertex_count))
    sidecar_path(path).write_text("\n".join(side) + "\n", encoding="utf-8")


def _load_sidecar(path: Path) -> dict[str, int]:
    mapping: dict[str, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        header = f.readline().rstrip("\r\n")
        if header != VERTEX_HEADER:
            raise FormatError(f"expected header {VERTEX_HEADER!r} in {path}, got {header!r}")
        for lineno, line in enumerate(f, start=2):
            fields = line.rstrip("\r\n").split(",")
            if len(fields) != 2:
                raise FormatError(f"{path}:{lineno}: malformed vertex line")
            label, dense_text = fields
            try:
                dense = int(dense_text)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: dense id {dense_text!r} is not an integer") from None
            if label in mapping:
                raise FormatError(f"{path}:{lineno}: duplicate external id {label!r}")
            mapping[label] = dense
    dense_ids = sorted(mapping.values())
    if dense_ids != list(range(len(dense_ids))):
        raise FormatError(f"{path}: dense ids are not contiguous 0..V-1")
    return mapping


def load_edge_list(path: str | Path, strict: bool = False) -> WeightedDigraph:
    """Load a graph snapshot, honoring its sidecar when present.

    Duplicate (src, dst) rows aggregate with a warning (error in strict
    mode); non-positive weights and header mismatches are always errors.
    Without a sidecar, dense ids are assigned by sorting the distinct labels.
    """
    path = Path(path)
    rows: list[tuple[str, str, float]] = []
    seen: set[tuple[str, str]] = set()
    duplicates = 0
    with open(path, "r", encoding="utf-8", newline="") as f:
        header = None
        for lineno, line in enumerate(f, start=1):
            text = line.rstrip("\r\n")
            if text.startswith("#"):
                continue
            if header is None:
                if text != GRAPH_HEADER:
                    raise FormatError(f"expected header {GRAPH_HEADER!r}, got {text!r}")
                header = text
                continue
            if not text:
                continue
            fields = text.split(",")
            if len(fields) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
            src, dst, w_text = fields
            try:
                w = float(w_text)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: weight {w_text!r} is not a number") from None
            if not w > 0:
                raise FormatError(f"{path}:{lineno}: non-positive weight {w}")
            if src == dst:
                raise FormatError(f"{path}:{lineno}: self-loop at {src!r}")
            key = (src, dst)
            if key in seen:
                if strict:
                    raise FormatError(f"{path}:{lineno}: duplicate arc {src!r} -> {dst!r}")
                duplicates += 1
            seen.add(key)
            rows.append((src, dst, w))
        if header is None:
            raise FormatError(f"{path}: missing header line")
    if duplicates:
        warnings.warn(f"{path}: aggregated {duplicates} duplicate arc rows", stacklevel=2)

    side = sidecar_path(path)
    builder = GraphBuilder()
    if side.exists():
        mapping = _load_sidecar(side)
        order = sorted(mapping, key=mapping.get)
        for src, dst, w in rows:
            if src not in mapping or dst not in mapping:
                raise FormatError(f"{path}: arc references id missing from sidecar")
        # Dense ids come from the sidecar, not from sorting: feed the builder
        # the dense ints directly and restore labels afterwards.
        for dense in range(len(order)):
            builder.add_vertex(dense)
        for src, dst, w in rows:
            builder.add_arc(mapping[src], mapping[dst], w)
        g = builder.build()
        if order == [str(i) for i in range(len(order))]:
            return g
        return WeightedDigraph.from_dense_arcs(
            g.vertex_count, g.arcs(), external_ids=tuple(order)
        )
    for src, dst, w in rows:
        builder.add_arc(src, dst, w)
    return builder.build()
