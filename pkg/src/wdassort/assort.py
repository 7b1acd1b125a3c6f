"""Weighted, directed assortativity coefficients.

Everything here funnels into :func:`feature_assortativity`: a Pearson
correlation between a feature of the source vertex and a feature of the target
vertex, taken over edges with each edge weighted by ``w_ij``. Source-side
moments are weighted by out-strength and target-side moments by in-strength.
Strength-based, degree-based and undirected coefficients only choose which
columns (and which graph) to feed it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DegenerateGraphError, DegenerateVarianceError, GraphError, WdassortError
from .graph import WeightedDigraph, _column, is_symmetric, unit_weights

DIRECTIONS = ("in", "out")
TYPES = tuple(product(DIRECTIONS, DIRECTIONS))


@dataclass(frozen=True)
class WeightedMoments:
    mean_source: float
    mean_target: float
    sd_source: float
    sd_target: float


def _weighted_mean_sd(values: np.ndarray, weights: np.ndarray, total: float) -> tuple[float, float]:
    support = values[weights > 0]
    # exact zero for constant features, instead of rounding noise around the mean
    if support.size == 0 or np.all(support == support[0]):
        return (float(support[0]) if support.size else 0.0), 0.0
    mean = float(np.sum(weights * values) / total)
    var = float(np.sum(weights * (values - mean) ** 2) / total)
    return mean, float(np.sqrt(var))


def weighted_moments(g: WeightedDigraph, x, y) -> WeightedMoments:
    """Source-side moments of ``x`` and target-side moments of ``y``."""
    x = _column(g, x, "x")
    y = _column(g, y, "y")
    total = g.total_weight
    if total <= 0:
        raise DegenerateGraphError("graph has no edges (total weight is zero)")
    mx, sx = _weighted_mean_sd(x, g.out_strength, total)
    my, sy = _weighted_mean_sd(y, g.in_strength, total)
    return WeightedMoments(mx, my, sx, sy)


def feature_assortativity(g: WeightedDigraph, x, y) -> float:
    """Weighted correlation of ``x`` at edge sources with ``y`` at edge targets.

    Raises :class:`DegenerateGraphError` on an edgeless graph and
    :class:`DegenerateVarianceError` when either side has zero weighted
    variance.
    """
    x = _column(g, x, "x")
    y = _column(g, y, "y")
    mom = weighted_moments(g, x, y)
    if mom.sd_source == 0:
        raise DegenerateVarianceError("source feature has zero weighted variance", side="source")
    if mom.sd_target == 0:
        raise DegenerateVarianceError("target feature has zero weighted variance", side="target")
    cov = np.sum(g.weight * (x[g.source] - mom.mean_source) * (y[g.target] - mom.mean_target))
    r = cov / (g.total_weight * mom.sd_source * mom.sd_target)
    # rounding can push a perfect correlation a few ulps past the bound
    return float(min(1.0, max(-1.0, r)))


def strength_assortativity(g: WeightedDigraph, alpha: str, beta: str) -> float:
    """(alpha, beta)-type coefficient: alpha-strength of source vs beta-strength of target."""
    _check_type(alpha, beta)
    return feature_assortativity(g, g.strengths(alpha), g.strengths(beta))


def unweighted_strength_assortativity(g: WeightedDigraph, alpha: str, beta: str) -> float:
    """Directed degree-degree coefficient: weights dropped, strengths become degrees."""
    _check_type(alpha, beta)
    return strength_assortativity(unit_weights(g), alpha, beta)


def undirected_assortativity(g: WeightedDigraph, weighted: bool = True) -> float:
    """Coefficient of an undirected graph stored with the half-weight split.

    ``g`` must hold every undirected edge ``{i, j}`` as ``i -> j`` and ``j -> i``
    with equal weights (see :func:`wdassort.graph.from_undirected`); all four
    directed types coincide then, so the out-out value is returned.
    """
    if not is_symmetric(g):
        raise GraphError("graph is not symmetric; build it with from_undirected()")
    if weighted:
        return strength_assortativity(g, "out", "out")
    return unweighted_strength_assortativity(g, "out", "out")


def _check_type(alpha: str, beta: str) -> None:
    if alpha not in DIRECTIONS or beta not in DIRECTIONS:
        raise ValueError(f"alpha and beta must be 'in' or 'out', got ({alpha!r}, {beta!r})")


@dataclass
class AssortProfile:
    """Four weighted and four unweighted (alpha, beta) coefficients.

    An entry that could not be computed is ``None`` and its reason is kept in
    ``reasons`` under ``(measure, alpha, beta)``.
    """

    weighted: dict[tuple[str, str], float | None]
    unweighted: dict[tuple[str, str], float | None]
    reasons: dict[tuple[str, str, str], str] = field(default_factory=dict)

    def rows(self):
        """Yield ``(measure, alpha, beta, value)`` with ``value`` None when missing."""
        for measure, table in (("weighted", self.weighted), ("unweighted", self.unweighted)):
            for alpha, beta in TYPES:
                yield measure, alpha, beta, table[(alpha, beta)]

    def as_metrics(self) -> dict[str, float | str]:
        """Flat ``{"weighted_out_in": value, ...}``; missing entries map to ``"NA:<reason>"``."""
        out = {}
        for measure, alpha, beta, value in self.rows():
            key = f"{measure}_{alpha}_{beta}"
            out[key] = value if value is not None else f"NA:{self.reasons[(measure, alpha, beta)]}"
        return out


def failure_reason(exc: Exception) -> str:
    if isinstance(exc, DegenerateGraphError):
        return "degenerate-graph"
    if isinstance(exc, DegenerateVarianceError):
        return f"degenerate-variance-{exc.side}" if exc.side else "degenerate-variance"
    return type(exc).__name__


def assortativity_profile(g: WeightedDigraph) -> AssortProfile:
    """All eight coefficients; failures are recorded per entry instead of raised."""
    binary = unit_weights(g)
    profile = AssortProfile({}, {})
    for measure, graph, table in (("weighted", g, profile.weighted), ("unweighted", binary, profile.unweighted)):
        for alpha, beta in TYPES:
            try:
                table[(alpha, beta)] = strength_assortativity(graph, alpha, beta)
            except WdassortError as exc:
                table[(alpha, beta)] = None
                profile.reasons[(measure, alpha, beta)] = failure_reason(exc)
    return profile
