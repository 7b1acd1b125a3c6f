"""Disparity-filter backbone of a weighted directed graph.

Under the null model the normalized weights around a vertex of degree ``d``
are the spacings of ``d - 1`` uniform points, so a normalized weight ``x`` has
density ``(d - 1)(1 - x)**(d - 2)`` and upper-tail probability
``(1 - x)**(d - 1)``. An edge is kept when it is significant at level ``alpha``
from the source's out-edges or from the target's in-edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedDigraph, subgraph


def disparity_pvalue(w_norm, d):
    """Upper-tail probability of a normalized weight among ``d`` edges.

    Vectorized over both arguments. ``d == 1`` gives 1: a single edge carries
    the whole strength by construction and is never significant on its own.
    """
    w = np.asarray(w_norm, dtype=np.float64)
    d = np.asarray(d)
    if np.any((w < 0) | (w > 1)) or np.any(~np.isfinite(w)):
        raise ValueError("normalized weight must lie in [0, 1]")
    if np.any(d < 1) or np.any(d != np.floor(d)):
        raise ValueError("degree must be a positive integer")
    p = np.where(d > 1, (1.0 - w) ** (d - 1), 1.0)
    return float(p) if p.ndim == 0 else p


@dataclass(frozen=True)
class EdgeSignificance:
    """Per-edge test results, aligned with the edge order of the input graph.

    ``exempt`` marks edges whose source out-degree and target in-degree are
    both 1; those cannot be tested and are kept when ``keep_exempt`` was set.
    """

    source: np.ndarray
    target: np.ndarray
    weight: np.ndarray
    p_out: np.ndarray
    p_in: np.ndarray
    keep: np.ndarray
    exempt: np.ndarray

    def rows(self):
        return zip(self.source.tolist(), self.target.tolist(), self.weight.tolist(),
                   self.p_out.tolist(), self.p_in.tolist(), self.keep.tolist())


def edge_significance(g: WeightedDigraph, alpha: float, keep_exempt: bool = True) -> EdgeSignificance:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    s, t, w = g.source, g.target, g.weight
    d_out = g.out_degree[s]
    d_in = g.in_degree[t]
    # clip guards rounding just above 1 when an edge carries the full strength
    p_out = disparity_pvalue(np.clip(w / g.out_strength[s], 0.0, 1.0), d_out) if len(w) else np.empty(0)
    p_in = disparity_pvalue(np.clip(w / g.in_strength[t], 0.0, 1.0), d_in) if len(w) else np.empty(0)
    exempt = (d_out == 1) & (d_in == 1)
    keep = (p_out < alpha) | (p_in < alpha)
    if keep_exempt:
        keep = keep | exempt
    return EdgeSignificance(s, t, w, np.asarray(p_out), np.asarray(p_in), keep, exempt)


def extract_backbone(g: WeightedDigraph, alpha: float, keep_exempt: bool = True):
    """Filter ``g`` to its significant edges; returns ``(backbone, significance)``.

    Weights of kept edges are unchanged and the vertex set is preserved.
    """
    sig = edge_significance(g, alpha, keep_exempt=keep_exempt)
    return subgraph(g, sig.keep), sig
