"""Immutable weighted directed graph and per-vertex feature tables.

Vertices are dense integer ids ``0..n-1``. Edges are stored once per ordered
pair, sorted by ``(source, target)``; parallel inputs are merged by summing
their weights, so any input order produces the same stored graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FeatureError, GraphError

KINDS = ("in", "out", "total")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class WeightedDigraph:
    """Directed graph with strictly positive edge weights and no self-loops.

    Use :func:`build_graph` (or :func:`from_undirected`) to construct one.
    Edge arrays and the cached strength/degree vectors are read-only.
    """

    __slots__ = (
        "n",
        "source",
        "target",
        "weight",
        "in_strength",
        "out_strength",
        "in_degree",
        "out_degree",
        "total_weight",
    )

    def __init__(self, n: int, source: np.ndarray, target: np.ndarray, weight: np.ndarray):
        self.n = int(n)
        self.source = _readonly(np.asarray(source, dtype=np.int64))
        self.target = _readonly(np.asarray(target, dtype=np.int64))
        self.weight = _readonly(np.asarray(weight, dtype=np.float64))
        self.out_strength = _readonly(np.bincount(self.source, weights=self.weight, minlength=self.n))
        self.in_strength = _readonly(np.bincount(self.target, weights=self.weight, minlength=self.n))
        self.out_degree = _readonly(np.bincount(self.source, minlength=self.n))
        self.in_degree = _readonly(np.bincount(self.target, minlength=self.n))
        self.total_weight = float(np.sum(self.weight))

    def __setattr__(self, name, value):
        if hasattr(self, "total_weight"):
            raise AttributeError("WeightedDigraph is immutable")
        object.__setattr__(self, name, value)

    @property
    def edge_count(self) -> int:
        return len(self.weight)

    def strengths(self, kind: str) -> np.ndarray:
        """Strength vector of the requested kind ("in", "out" or "total")."""
        if kind == "in":
            return self.in_strength
        if kind == "out":
            return self.out_strength
        if kind == "total":
            return self.in_strength + self.out_strength
        raise ValueError(f"unknown strength kind {kind!r}; expected one of {KINDS}")

    def degrees(self, kind: str) -> np.ndarray:
        if kind == "in":
            return self.in_degree
        if kind == "out":
            return self.out_degree
        if kind == "total":
            return self.in_degree + self.out_degree
        raise ValueError(f"unknown degree kind {kind!r}; expected one of {KINDS}")

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.source.tolist(), self.target.tolist(), self.weight.tolist()))

    def weight_matrix(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n))
        mat[self.source, self.target] = self.weight
        return mat

    def same_as(self, other: "WeightedDigraph") -> bool:
        """Exact structural equality: same vertex count, edges and weights."""
        return (
            self.n == other.n
            and np.array_equal(self.source, other.source)
            and np.array_equal(self.target, other.target)
            and np.array_equal(self.weight, other.weight)
        )

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, edges={self.edge_count}, W={self.total_weight:g})"


def build_graph(edge_list: Iterable[tuple[int, int, float]], vertex_count: int) -> WeightedDigraph:
    """Build a graph from ``(source, target, weight)`` triples.

    Duplicate ordered pairs are merged by summing weights. Raises
    :class:`GraphError` on self-loops, non-positive or non-finite weights,
    and vertex ids outside ``[0, vertex_count)``.
    """
    if vertex_count < 0:
        raise GraphError(f"vertex_count must be non-negative, got {vertex_count}")
    rows = list(edge_list)
    if not rows:
        empty = np.empty(0)
        return WeightedDigraph(vertex_count, empty, empty, empty)
    try:
        arr = np.asarray(rows, dtype=np.float64).reshape(len(rows), 3)
    except ValueError as exc:
        raise GraphError(f"edges must be (source, target, weight) triples: {exc}") from None
    src_f, dst_f, w = arr[:, 0], arr[:, 1], arr[:, 2]
    src = src_f.astype(np.int64)
    dst = dst_f.astype(np.int64)
    for ids, name in ((src_f, "source"), (dst_f, "target")):
        bad = np.flatnonzero((ids != np.floor(ids)) | (ids < 0) | (ids >= vertex_count))
        if bad.size:
            k = bad[0]
            raise GraphError(f"edge {k}: {name} id {rows[k][0 if name == 'source' else 1]!r} "
                             f"not in [0, {vertex_count})")
    loops = np.flatnonzero(src == dst)
    if loops.size:
        raise GraphError(f"edge {loops[0]}: self-loop at vertex {src[loops[0]]}")
    bad_w = np.flatnonzero(~(np.isfinite(w) & (w > 0)))
    if bad_w.size:
        raise GraphError(f"edge {bad_w[0]}: weight must be positive and finite, got {w[bad_w[0]]!r}")

    # sorting by weight within a pair fixes the merge summation order
    order = np.lexsort((w, dst, src))
    src, dst, w = src[order], dst[order], w[order]
    starts = np.flatnonzero(np.r_[True, (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])])
    merged = np.add.reduceat(w, starts)
    return WeightedDigraph(vertex_count, src[starts], dst[starts], merged)


def from_undirected(edge_list: Iterable[tuple[int, int, float]], vertex_count: int) -> WeightedDigraph:
    """Directed representation of an undirected weighted graph.

    Each undirected edge ``{i, j}`` of weight ``w`` is stored as ``i -> j`` and
    ``j -> i``, each with weight ``w / 2``. In-strength and out-strength of every
    vertex then both equal half its undirected strength.
    """
    split = []
    for i, j, w in edge_list:
        split.append((i, j, w / 2.0))
        split.append((j, i, w / 2.0))
    return build_graph(split, vertex_count)


def is_symmetric(g: WeightedDigraph) -> bool:
    """True when ``w_ij == w_ji`` for every stored edge."""
    fwd = dict(zip(zip(g.source.tolist(), g.target.tolist()), g.weight.tolist()))
    return all(fwd.get((j, i)) == w for (i, j), w in fwd.items())


def unit_weights(g: WeightedDigraph) -> WeightedDigraph:
    """Same edge set with every weight replaced by 1."""
    return WeightedDigraph(g.n, g.source.copy(), g.target.copy(), np.ones(g.edge_count))


def subgraph(g: WeightedDigraph, keep: np.ndarray) -> WeightedDigraph:
    """Edge-induced subgraph on the same vertex set; ``keep`` is a boolean mask over edges."""
    keep = np.asarray(keep, dtype=bool)
    return WeightedDigraph(g.n, g.source[keep], g.target[keep], g.weight[keep])


def _check_vertex(g: WeightedDigraph, v: int) -> None:
    if not (0 <= v < g.n) or int(v) != v:
        raise GraphError(f"vertex id {v!r} not in [0, {g.n})")


def strength(g: WeightedDigraph, v: int, kind: str = "total") -> float:
    _check_vertex(g, v)
    return float(g.strengths(kind)[v])


def degree(g: WeightedDigraph, v: int, kind: str = "total") -> int:
    _check_vertex(g, v)
    return int(g.degrees(kind)[v])


def _column(g: WeightedDigraph, values, name: str) -> np.ndarray:
    col = np.asarray(values, dtype=np.float64)
    if col.shape != (g.n,):
        raise FeatureError(f"feature {name} has shape {col.shape}, graph has {g.n} vertices")
    if not np.all(np.isfinite(col)):
        raise FeatureError(f"feature {name} contains non-finite values")
    return col


def expand_to_endpoint_list(g: WeightedDigraph, x, y) -> list[tuple[float, float, float]]:
    """One ``(x[source], y[target], weight)`` record per stored edge."""
    x = _column(g, x, "x")
    y = _column(g, y, "y")
    return list(zip(x[g.source].tolist(), y[g.target].tolist(), g.weight.tolist()))


@dataclass(frozen=True)
class FeatureTable:
    """Named real-valued features, one row per vertex."""

    feature_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] != len(self.feature_names):
            raise FeatureError(
                f"values shape {vals.shape} does not match {len(self.feature_names)} feature names"
            )
        if len(set(self.feature_names)) != len(self.feature_names):
            raise FeatureError("duplicate feature names")
        if not np.all(np.isfinite(vals)):
            raise FeatureError("feature values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "values", vals)

    @property
    def vertex_count(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.feature_names.index(name)]
        except ValueError:
            raise FeatureError(f"unknown feature {name!r}; have {list(self.feature_names)}") from None

    def check_graph(self, g: WeightedDigraph) -> None:
        if self.vertex_count != g.n:
            raise FeatureError(f"feature table has {self.vertex_count} rows, graph has {g.n} vertices")

    @classmethod
    def from_columns(cls, columns: dict[str, Sequence[float]]) -> "FeatureTable":
        names = tuple(columns)
        if not names:
            raise FeatureError("at least one feature column is required")
        return cls(names, np.column_stack([np.asarray(columns[k], dtype=np.float64) for k in names]))
