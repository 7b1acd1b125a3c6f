"""CSV reading and writing for graphs, features and results.

All files are comma-separated UTF-8 with a header row and ``\\n`` line endings.
Weights and coefficients are written with ``repr`` precision so a write/read
round trip is bit-exact.
"""

from __future__ import annotations

import csv
import math
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import CsvFormatError, GraphError
from .graph import FeatureTable, WeightedDigraph, build_graph

EDGE_HEADER = ["source", "target", "weight"]
COEFFICIENT_HEADER = ["measure", "alpha", "beta", "value"]
SIGNIFICANCE_HEADER = ["source", "target", "weight", "p_out", "p_in", "keep"]
EXPERIMENT_HEADER = ["replicate", "parameter_name", "parameter_value", "metric", "value"]
SUMMARY_HEADER = ["parameter_name", "parameter_value", "metric", "count", "missing",
                  "mean", "sd", "min", "q1", "median", "q3", "max"]


def format_number(x) -> str:
    """Shortest round-trip text for a number; integral floats drop the ``.0``."""
    if isinstance(x, str):
        return x
    if x is None:
        return "NA"
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


@contextmanager
def _open_out(dest):
    if hasattr(dest, "write"):
        yield dest
    else:
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _writer(fh: IO[str]):
    return csv.writer(fh, lineterminator="\n")


def _sorted_labels(labels: list[str]) -> list[str]:
    # integer labels (as written by this package) keep their numeric order
    try:
        return sorted(labels, key=int)
    except ValueError:
        return labels


def read_edge_csv(path) -> tuple[WeightedDigraph, list[str]]:
    """Read ``source,target,weight`` rows; returns the graph and its vertex labels.

    Vertex ids follow numeric order when every label is an integer and first
    appearance otherwise. Malformed rows raise :class:`CsvFormatError` naming
    the line.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != EDGE_HEADER:
            raise CsvFormatError(f"expected header {','.join(EDGE_HEADER)}, got {header!r}", line=1)
        raw = []
        seen: dict[str, None] = {}
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise CsvFormatError(f"expected 3 fields, got {len(row)}", line=line)
            s, t, w_text = (c.strip() for c in row)
            if not s or not t:
                raise CsvFormatError("empty vertex label", line=line)
            try:
                w = float(w_text)
            except ValueError:
                raise CsvFormatError(f"non-numeric weight {w_text!r}", line=line) from None
            if not (math.isfinite(w) and w > 0):
                raise CsvFormatError(f"weight must be positive and finite, got {w_text!r}", line=line)
            if s == t:
                raise CsvFormatError(f"self-loop at vertex {s!r}", line=line)
            seen.setdefault(s)
            seen.setdefault(t)
            raw.append((s, t, w))
    labels = _sorted_labels(list(seen))
    ids = {lab: k for k, lab in enumerate(labels)}
    try:
        g = build_graph([(ids[s], ids[t], w) for s, t, w in raw], len(labels))
    except GraphError as exc:
        raise CsvFormatError(str(exc)) from None
    return g, labels


def write_edge_csv(g: WeightedDigraph, dest, labels=None, undirected: bool = False) -> None:
    """Write stored edges; with ``undirected`` write each split pair once at full weight."""
    names = labels if labels is not None else [str(v) for v in range(g.n)]
    with _open_out(dest) as fh:
        out = _writer(fh)
        out.writerow(EDGE_HEADER)
        for s, t, w in g.edges():
            if undirected:
                if s > t:
                    continue
                w = 2.0 * w
            out.writerow([names[s], names[t], format_number(w)])


def read_feature_csv(path, labels: list[str]) -> FeatureTable:
    """Read ``vertex,<feature>...`` aligned to ``labels`` (the graph's vertex order)."""
    index = {lab: k for k, lab in enumerate(labels)}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2 or header[0].strip() != "vertex":
            raise CsvFormatError("expected header vertex,<feature>...", line=1)
        names = [h.strip() for h in header[1:]]
        values = np.full((len(labels), len(names)), np.nan)
        filled = np.zeros(len(labels), dtype=bool)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvFormatError(f"expected {len(header)} fields, got {len(row)}", line=line)
            vertex = row[0].strip()
            if vertex not in index:
                raise CsvFormatError(f"vertex {vertex!r} is not in the graph", line=line)
            k = index[vertex]
            if filled[k]:
                raise CsvFormatError(f"duplicate vertex {vertex!r}", line=line)
            for j, cell in enumerate(row[1:]):
                try:
                    v = float(cell)
                except ValueError:
                    raise CsvFormatError(f"non-numeric value {cell.strip()!r} for feature {names[j]!r}",
                                         line=line) from None
                if not math.isfinite(v):
                    raise CsvFormatError(f"non-finite value for feature {names[j]!r}", line=line)
                values[k, j] = v
            filled[k] = True
    missing = [labels[k] for k in np.flatnonzero(~filled)]
    if missing:
        shown = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
        raise CsvFormatError(f"missing vertices in feature file: {shown}")
    return FeatureTable(tuple(names), values)


def write_rows(dest, header: list[str], rows: Iterable[Iterable]) -> None:
    with _open_out(dest) as fh:
        out = _writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([format_number(c) if not isinstance(c, str) else c for c in row])


def write_significance_csv(sig, dest, labels=None) -> None:
    names = labels if labels is not None else None
    rows = (
        [names[s] if names else str(s), names[t] if names else str(t), w, po, pi, "true" if k else "false"]
        for s, t, w, po, pi, k in sig.rows()
    )
    write_rows(dest, SIGNIFICANCE_HEADER, rows)


def read_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
