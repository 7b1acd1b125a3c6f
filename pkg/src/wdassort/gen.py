"""Seeded random generators for weighted directed ensembles.

Every generator takes an explicit ``numpy.random.Generator``; none touch global
random state, so a fixed seed reproduces the graph bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import WeightedDigraph, build_graph


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ErConfig:
    n: int
    p: float
    theta: int = 10

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        _check_prob("p", self.p)
        if self.theta < 1 or int(self.theta) != self.theta:
            raise ConfigError(f"theta must be a positive integer, got {self.theta}")


@dataclass(frozen=True)
class BaConfig:
    """Strength-driven preferential attachment with one new vertex per step.

    ``big_edge`` is ``(arrival_step, weight)``: the edge added at that step
    (steps are numbered from 1) gets the given weight instead of a random one.
    """

    steps: int
    alpha: float = 0.6
    gamma: float = 0.4
    delta_in: float = 1.0
    delta_out: float = 1.0
    theta: int = 10
    big_edge: tuple[int, float] | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise ConfigError(f"steps must be non-negative, got {self.steps}")
        _check_prob("alpha", self.alpha)
        _check_prob("gamma", self.gamma)
        if abs(self.alpha + self.gamma - 1.0) > 1e-12:
            raise ConfigError(f"alpha + gamma must equal 1, got {self.alpha} + {self.gamma}")
        if self.delta_in < 0 or self.delta_out < 0:
            raise ConfigError("delta_in and delta_out must be non-negative")
        if self.theta < 1 or int(self.theta) != self.theta:
            raise ConfigError(f"theta must be a positive integer, got {self.theta}")
        if self.big_edge is not None:
            step, weight = self.big_edge
            if not 1 <= step <= self.steps:
                raise ConfigError(f"big edge arrival step {step} not in [1, {self.steps}]")
            if not weight > 0:
                raise ConfigError(f"big edge weight must be positive, got {weight}")


@dataclass(frozen=True)
class SbmConfig:
    """Two equal communities; within-community weights are uniform on a range per community."""

    community_size: int = 500
    p_within: float = 0.2
    p_between: float = 0.02
    weight_range_1: tuple[float, float] = (0.0, 5.0)
    weight_range_2: tuple[float, float] = (5.0, 10.0)
    between_weight: float = 5.0

    def __post_init__(self):
        if self.community_size < 1:
            raise ConfigError(f"community_size must be at least 1, got {self.community_size}")
        _check_prob("p_within", self.p_within)
        _check_prob("p_between", self.p_between)
        for name, (lo, hi) in (("weight_range_1", self.weight_range_1), ("weight_range_2", self.weight_range_2)):
            if lo < 0 or hi < lo or hi <= 0:
                raise ConfigError(f"{name} must satisfy 0 <= low <= high, high > 0; got ({lo}, {hi})")
        if not self.between_weight > 0:
            raise ConfigError(f"between_weight must be positive, got {self.between_weight}")


def gen_er(cfg: ErConfig, rng: np.random.Generator) -> WeightedDigraph:
    """Each ordered pair ``i != j`` is an edge with probability ``p``; weights uniform on ``1..theta``.

    Every in- and out-strength then has mean ``(n - 1) * p * (theta + 1) / 2``.
    """
    n = cfg.n
    mask = rng.random((n, n)) < cfg.p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    w = rng.integers(1, cfg.theta + 1, size=src.size).astype(np.float64)
    return WeightedDigraph(n, src, dst, w)


def _sample_proportional(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    total = cum[-1]
    if not total > 0:
        raise ConfigError("all attachment weights are zero; use positive delta")
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return min(idx, len(weights) - 1)


def gen_ba(cfg: BaConfig, rng: np.random.Generator) -> WeightedDigraph:
    """Grow from a single edge ``0 -> 1``, adding one vertex and one edge per step.

    With probability ``alpha`` the newcomer points to an existing vertex chosen
    with probability proportional to ``in_strength + delta_in``; otherwise an
    existing vertex chosen proportional to ``out_strength + delta_out`` points
    to the newcomer.
    """
    n = cfg.steps + 2
    s_in = np.zeros(n)
    s_out = np.zeros(n)
    src = np.empty(cfg.steps + 1, dtype=np.int64)
    dst = np.empty(cfg.steps + 1, dtype=np.int64)
    w = np.empty(cfg.steps + 1)
    big_step, big_weight = cfg.big_edge if cfg.big_edge is not None else (-1, 0.0)

    # seed edge weight comes from the same weight distribution
    src[0], dst[0], w[0] = 0, 1, rng.integers(1, cfg.theta + 1)
    s_out[0] += w[0]
    s_in[1] += w[0]
    for step in range(1, cfg.steps + 1):
        new = step + 1
        existing = new  # vertices 0..new-1
        if rng.random() < cfg.alpha:
            i, j = new, _sample_proportional(s_in[:existing] + cfg.delta_in, rng)
        else:
            i, j = _sample_proportional(s_out[:existing] + cfg.delta_out, rng), new
        weight = big_weight if step == big_step else float(rng.integers(1, cfg.theta + 1))
        src[step], dst[step], w[step] = i, j, weight
        s_out[i] += weight
        s_in[j] += weight
    # every edge touches a distinct newcomer, so no pair repeats
    return build_graph(zip(src.tolist(), dst.tolist(), w.tolist()), n)


def _uniform_open_low(rng, lo, hi, size):
    # (lo, hi]: excludes a zero weight when lo == 0
    return lo + (hi - lo) * (1.0 - rng.random(size))


def gen_sbm(cfg: SbmConfig, rng: np.random.Generator) -> WeightedDigraph:
    """Two-community block model with random, independent edge directions.

    Links are realized on unordered pairs first (within each community, then
    between), and each realized link is then oriented by a fair coin.
    """
    m = cfg.community_size
    iu, ju = np.triu_indices(m, k=1)
    parts_i, parts_j, parts_w = [], [], []
    for c, (lo, hi) in enumerate((cfg.weight_range_1, cfg.weight_range_2)):
        hit = rng.random(iu.size) < cfg.p_within
        parts_i.append(iu[hit] + c * m)
        parts_j.append(ju[hit] + c * m)
        parts_w.append(_uniform_open_low(rng, lo, hi, int(hit.sum())))
    hit = rng.random((m, m)) < cfg.p_between
    bi, bj = np.nonzero(hit)
    parts_i.append(bi)
    parts_j.append(bj + m)
    parts_w.append(np.full(bi.size, float(cfg.between_weight)))

    a = np.concatenate(parts_i)
    b = np.concatenate(parts_j)
    w = np.concatenate(parts_w)
    flip = rng.random(a.size) < 0.5
    src = np.where(flip, b, a)
    dst = np.where(flip, a, b)
    order = np.lexsort((dst, src))
    return WeightedDigraph(2 * m, src[order], dst[order], w[order])
