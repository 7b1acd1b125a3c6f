"""Rewire a weighted undirected network towards a target assortativity.

Pipeline: sample a strength sequence from a finite strength distribution,
build a neutral integer-weighted network realizing it, solve a small
quadratic program for a zero-margin matrix ``M`` that turns the product
distribution ``q q^T`` into a link distribution ``L`` with the target
correlation, then run a Metropolis chain that moves unit weights between edge
pairs while conserving every vertex strength.

Undirected graphs are exchanged as :class:`WeightedDigraph` in the half-weight
split convention (see :func:`wdassort.graph.from_undirected`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import optimize, sparse

from .assort import undirected_assortativity
from .errors import ConfigError, GraphError, InfeasibleTargetError, SolverError, WdassortError
from .graph import WeightedDigraph, from_undirected, is_symmetric
from .qp import solve_box_least_norm

log = logging.getLogger(__name__)

SELECTION_MODES = ("weight", "uniform")
LINK_BASES = ("empirical", "distribution")


@dataclass(frozen=True)
class StrengthDistribution:
    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.support)
        p = np.asarray(self.probs, dtype=np.float64)
        if z.ndim != 1 or z.size == 0 or z.shape != p.shape:
            raise ConfigError("support and probs must be non-empty vectors of equal length")
        if np.any(z != np.round(z)) or np.any(z <= 0):
            raise ConfigError("support values must be positive integers")
        if np.any(np.diff(z) <= 0):
            raise ConfigError("support values must be strictly increasing")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ConfigError(f"probs must be a probability vector (sum={p.sum()!r})")
        object.__setattr__(self, "support", z.astype(np.int64))
        object.__setattr__(self, "probs", p)

    @classmethod
    def power_law_cutoff(cls, z_min=10, z_max=100, exponent=2.5, cutoff=100.0):
        """``p_k`` proportional to ``z_k**-exponent * exp(-z_k / cutoff)`` on ``z_min..z_max``."""
        if not 1 <= z_min <= z_max:
            raise ConfigError(f"need 1 <= z_min <= z_max, got ({z_min}, {z_max})")
        z = np.arange(z_min, z_max + 1, dtype=np.int64)
        p = z.astype(np.float64) ** -exponent * np.exp(-z / cutoff)
        return cls(z, p / p.sum())

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.support, size=n, p=self.probs)

    @classmethod
    def empirical(cls, strengths) -> "StrengthDistribution":
        """Distribution of the observed (positive) strength values."""
        s = np.asarray(strengths)
        z, counts = np.unique(s[s > 0], return_counts=True)
        return cls(z, counts / counts.sum())


def strength_weighted_dist(d: StrengthDistribution) -> tuple[np.ndarray, float]:
    """Edge-end strength distribution ``q`` and the variance of ``z`` under it."""
    zp = d.support * d.probs
    q = zp / zp.sum()
    z = d.support.astype(np.float64)
    mean = float(np.sum(q * z))
    var = max(float(np.sum(q * (z - mean) ** 2)), 0.0)
    return q, var


def _box(q: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Bounds on ``m`` making ``q_j q_k + scale * m_jk`` lie in [0, 1]."""
    qq = np.outer(q, q).ravel()
    if scale == 0:
        return np.full(qq.size, -np.inf), np.full(qq.size, np.inf)
    a, b = -qq / scale, (1.0 - qq) / scale
    return (a, b) if scale > 0 else (b, a)


def _check_feasible(zz: np.ndarray, target: float, lo: np.ndarray, hi: np.ndarray) -> bool:
    """LP feasibility of the QP constraint set (used only to classify a failed solve)."""
    S = zz.shape[0]
    eye = sparse.identity(S, format="csr")
    ones = sparse.csr_matrix(np.ones((1, S)))
    rows = sparse.kron(eye, ones)
    cols = sparse.kron(ones, eye)
    A_eq = sparse.vstack([rows, cols, sparse.csr_matrix(zz.ravel()[None, :])], format="csr")
    b_eq = np.r_[np.zeros(2 * S), target]
    bounds = list(zip(np.where(np.isfinite(lo), lo, None), np.where(np.isfinite(hi), hi, None)))
    res = optimize.linprog(np.zeros(S * S), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    return res.status != 2


def solve_transition_matrix(q, z, xi: float, tol: float = 1e-12) -> np.ndarray:
    """Minimum Frobenius-norm ``M`` with zero row/column sums and ``sum z_j z_k m_jk = 1``.

    Entries are additionally bounded so that the resulting link distribution
    ``q_j q_k + xi * var_q(z) * m_jk`` lies in [0, 1]. Raises
    :class:`InfeasibleTargetError` when no such ``M`` exists.
    """
    q = np.asarray(q, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    S = z.size
    if S < 2:
        raise InfeasibleTargetError("a single-point strength support admits no transition matrix")
    mean = float(np.sum(q * z))
    var = float(np.sum(q * (z - mean) ** 2))
    lo, hi = _box(q, xi * var)

    # rescale z so the normalization row is O(1) next to the margin rows
    zmax = float(z.max())
    zh = z / zmax
    zz = np.outer(zh, zh)
    zz_flat = zz.ravel()
    zz2 = zz * zz
    b = np.r_[np.zeros(2 * S - 1), 1.0 / zmax**2]  # last column sum is implied by the others

    def A_T(lam):
        col = np.r_[lam[S:2 * S - 1], 0.0]
        return (lam[:S, None] + col[None, :] + lam[-1] * zz).ravel()

    def A(x):
        X = x.reshape(S, S)
        return np.r_[X.sum(axis=1), X.sum(axis=0)[:-1], float(np.dot(zz_flat, x))]

    def hessian(free):
        D = free.reshape(S, S).astype(np.float64)
        Dz = D * zz
        H = np.zeros((2 * S, 2 * S))
        H[:S, :S] = np.diag(D.sum(axis=1))
        H[:S, S:2 * S - 1] = D[:, :-1]
        H[S:2 * S - 1, :S] = D[:, :-1].T
        H[S:2 * S - 1, S:2 * S - 1] = np.diag(D.sum(axis=0)[:-1])
        H[:S, -1] = H[-1, :S] = Dz.sum(axis=1)
        H[S:2 * S - 1, -1] = H[-1, S:2 * S - 1] = Dz.sum(axis=0)[:-1]
        H[-1, -1] = float(np.sum(D * zz2))
        return H

    res = solve_box_least_norm(A_T, A, hessian, b, lo, hi, tol=tol)
    if not res.converged:
        if not _check_feasible(zz, b[-1], lo, hi):
            raise InfeasibleTargetError(
                f"target assortativity {xi} is not reachable on this strength support: "
                "no transition matrix keeps every link probability in [0, 1]"
            )
        raise SolverError(f"QP did not converge (residual {res.residual:.3g} after {res.iterations} iterations)")
    return res.x.reshape(S, S)


@dataclass
class LinkDistribution:
    """Target joint distribution of edge-end strengths, ``L = q q^T + xi var M``."""

    support: np.ndarray
    q: np.ndarray
    sigma_q_sq: float
    M: np.ndarray
    L: np.ndarray
    xi: float

    def residuals(self) -> dict[str, float]:
        z = self.support.astype(np.float64)
        return {
            "row_sums": float(np.max(np.abs(self.M.sum(axis=1)))),
            "col_sums": float(np.max(np.abs(self.M.sum(axis=0)))),
            "normalization": abs(float(z @ self.M @ z) - 1.0),
            "total_mass": abs(float(self.L.sum()) - 1.0),
            "below_zero": float(max(0.0, -self.L.min())),
            "above_one": float(max(0.0, self.L.max() - 1.0)),
        }

    def check(self, tol: float = 1e-8) -> None:
        bad = {k: v for k, v in self.residuals().items() if v > tol}
        if bad:
            raise SolverError(f"link distribution violates its constraints: {bad}")

    def support_index(self, strengths: np.ndarray) -> np.ndarray:
        """Row/column of ``L`` for each strength (nearest support value if off-support)."""
        s = np.asarray(strengths)
        idx = np.clip(np.searchsorted(self.support, s), 0, self.support.size - 1)
        left = np.clip(idx - 1, 0, self.support.size - 1)
        nearer_left = np.abs(self.support[left] - s) < np.abs(self.support[idx] - s)
        return np.where(nearer_left, left, idx)


def link_distribution(d: StrengthDistribution, xi: float) -> LinkDistribution:
    if not -1.0 < xi < 1.0:
        raise ConfigError(f"target assortativity must lie in (-1, 1), got {xi}")
    q, var = strength_weighted_dist(d)
    M = solve_transition_matrix(q, d.support, xi)
    L = np.outer(q, q) + xi * var * M
    # clipped entries sit exactly on a bound up to rounding
    L = np.clip(L, 0.0, 1.0)
    ld = LinkDistribution(d.support, q, var, M, L, float(xi))
    ld.check()
    return ld


def _pair_units(strengths: np.ndarray, rng: np.random.Generator, max_tries: int) -> np.ndarray:
    stubs = rng.permutation(np.repeat(np.arange(strengths.size), strengths))
    pairs = stubs.reshape(-1, 2).copy()
    m = len(pairs)
    for k in np.flatnonzero(pairs[:, 0] == pairs[:, 1]).tolist():
        v = pairs[k, 0]
        if pairs[k, 1] != v:  # already repaired by an earlier swap
            continue
        for _ in range(max_tries):
            other = int(rng.integers(m))
            x, y = pairs[other]
            if x != v and y != v:
                pairs[k] = (v, x)
                pairs[other] = (v, y)
                break
        else:
            raise GraphError(f"could not place the half-edges of vertex {v} without self-loops")
    return pairs


def _units_to_graph(units: np.ndarray, n: int) -> WeightedDigraph:
    a = np.minimum(units[:, 0], units[:, 1])
    b = np.maximum(units[:, 0], units[:, 1])
    keys, counts = np.unique(a * n + b, return_counts=True)
    edges = zip((keys // n).tolist(), (keys % n).tolist(), counts.astype(float).tolist())
    return from_undirected(edges, n)


def _graph_to_units(g: WeightedDigraph) -> np.ndarray:
    if not is_symmetric(g):
        raise GraphError("rewiring needs an undirected graph in the half-weight split convention")
    upper = g.source < g.target
    w = 2.0 * g.weight[upper]
    if np.any(w != np.round(w)):
        raise GraphError("rewiring needs integer undirected weights")
    reps = w.astype(np.int64)
    return np.column_stack([np.repeat(g.source[upper], reps), np.repeat(g.target[upper], reps)])


def undirected_strengths(g: WeightedDigraph) -> np.ndarray:
    return np.rint(2.0 * g.out_strength).astype(np.int64)


def initial_network(d: StrengthDistribution, n: int, rng: np.random.Generator,
                    strengths=None, max_tries: int = 10_000) -> WeightedDigraph:
    """Neutral integer-weighted network realizing a sampled strength sequence.

    Half-edges are paired uniformly at random and pair counts become edge
    weights. Self-pairings are re-paired with a random other pair. An odd total
    is fixed by lowering one strength by 1, preferring a vertex whose lowered
    strength stays on the support.
    """
    if n < 2:
        raise ConfigError(f"n must be at least 2, got {n}")
    s = d.sample(n, rng) if strengths is None else np.asarray(strengths, dtype=np.int64).copy()
    if s.shape != (n,):
        raise ConfigError(f"strength sequence has shape {s.shape}, expected ({n},)")
    if s.sum() % 2:
        on_support = np.flatnonzero(np.isin(s - 1, d.support))
        pool = on_support if on_support.size else np.flatnonzero(s > 0)
        s[rng.choice(pool)] -= 1
    if s.sum() > 0 and 2 * s.max() > s.sum():
        raise GraphError("one vertex holds more than half of all half-edges; no loop-free pairing exists")
    units = _pair_units(s, rng, max_tries)
    return _units_to_graph(units, n)


@numba.njit(cache=True)
def _chain_weighted(ua, ub, sidx, L, steps, seed):
    np.random.seed(seed)
    U = ua.size
    accepted = 0
    if U < 2:
        return accepted
    for _ in range(steps):
        i = np.random.randint(U)
        j = np.random.randint(U)
        if i == j:
            continue
        a, b = ua[i], ub[i]
        if np.random.random() < 0.5:
            a, b = b, a
        c, d = ua[j], ub[j]
        if (a == c and b == d) or (a == d and b == c):
            continue  # two units of the same edge
        if a == c or b == d:
            continue  # would create a self-loop
        num = L[sidx[a], sidx[c]] * L[sidx[b], sidx[d]]
        den = L[sidx[a], sidx[b]] * L[sidx[c], sidx[d]]
        if num < den and np.random.random() * den >= num:
            continue
        ua[i], ub[i] = a, c
        ua[j], ub[j] = b, d
        accepted += 1
    return accepted


@numba.njit(cache=True)
def _chain_uniform(ea, eb, ew, n, sidx, L, steps, seed):
    np.random.seed(seed)
    index = numba.typed.Dict.empty(key_type=numba.types.int64, value_type=numba.types.int64)
    m = ea.size
    cap = m + 2 * steps + 2
    A = np.empty(cap, np.int64)
    B = np.empty(cap, np.int64)
    Wt = np.empty(cap, np.int64)
    for k in range(m):
        A[k], B[k], Wt[k] = ea[k], eb[k], ew[k]
        index[min(ea[k], eb[k]) * n + max(ea[k], eb[k])] = k
    accepted = 0
    for _ in range(steps):
        if m < 2:
            break
        i = np.random.randint(m)
        j = np.random.randint(m)
        if i == j:
            continue
        a, b = A[i], B[i]
        if np.random.random() < 0.5:
            a, b = b, a
        c, d = A[j], B[j]
        if a == c or b == d:
            continue
        num = L[sidx[a], sidx[c]] * L[sidx[b], sidx[d]]
        den = L[sidx[a], sidx[b]] * L[sidx[c], sidx[d]]
        if num < den and np.random.random() * den >= num:
            continue
        accepted += 1
        for (x, y) in ((a, c), (b, d)):
            key = min(x, y) * n + max(x, y)
            if key in index:
                Wt[index[key]] += 1
            else:
                A[m], B[m], Wt[m] = x, y, 1
                index[key] = m
                m += 1
        for k in (i, j):
            Wt[k] -= 1
        # delete emptied edges, higher slot first so swap-removal stays valid
        for k in (max(i, j), min(i, j)):
            if Wt[k] == 0:
                del index[min(A[k], B[k]) * n + max(A[k], B[k])]
                last = m - 1
                if k != last:
                    A[k], B[k], Wt[k] = A[last], B[last], Wt[last]
                    index[min(A[k], B[k]) * n + max(A[k], B[k])] = k
                m -= 1
    return A[:m].copy(), B[:m].copy(), Wt[:m].copy(), accepted


def rewire_chain(g: WeightedDigraph, L: LinkDistribution, steps: int, rng: np.random.Generator,
                 selection: str = "weight") -> WeightedDigraph:
    """Run ``steps`` proposals of the unit-weight rewiring chain.

    Each proposal picks two edges ``(a, b)`` and ``(c, d)`` (proportional to
    weight by default, or uniformly with ``selection="uniform"``) and, with
    probability ``min(1, L[a,c] L[b,d] / (L[a,b] L[c,d]))`` indexed by vertex
    strengths, moves one unit of weight onto ``(a, c)`` and ``(b, d)``.
    Vertex strengths never change.
    """
    if selection not in SELECTION_MODES:
        raise ConfigError(f"selection must be one of {SELECTION_MODES}, got {selection!r}")
    if steps < 0:
        raise ConfigError(f"steps must be non-negative, got {steps}")
    units = _graph_to_units(g)
    if steps == 0 or len(units) < 2:
        return g
    sidx = L.support_index(undirected_strengths(g))
    seed = int(rng.integers(2**31 - 1))
    n = g.n
    if selection == "weight":
        ua = np.ascontiguousarray(units[:, 0])
        ub = np.ascontiguousarray(units[:, 1])
        accepted = _chain_weighted(ua, ub, sidx, L.L, int(steps), seed)
        out = _units_to_graph(np.column_stack([ua, ub]), n)
    else:
        upper = g.source < g.target
        ea, eb = g.source[upper].copy(), g.target[upper].copy()
        ew = np.rint(2.0 * g.weight[upper]).astype(np.int64)
        A, B, Wt, accepted = _chain_uniform(ea, eb, ew, n, sidx, L.L, int(steps), seed)
        out = from_undirected(zip(A.tolist(), B.tolist(), Wt.astype(float).tolist()), n)
    log.debug("rewiring accepted %d of %d proposals", accepted, steps)
    return out


@dataclass(frozen=True)
class RewireConfig:
    n: int
    xi: float
    steps: int
    seed: int
    distribution: StrengthDistribution = field(default_factory=StrengthDistribution.power_law_cutoff)
    selection: str = "weight"
    link_basis: str = "empirical"

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if not -1.0 < self.xi < 1.0:
            raise ConfigError(f"xi must lie in (-1, 1), got {self.xi}")
        if self.steps < 0:
            raise ConfigError(f"steps must be non-negative, got {self.steps}")
        if self.selection not in SELECTION_MODES:
            raise ConfigError(f"selection must be one of {SELECTION_MODES}")
        if self.link_basis not in LINK_BASES:
            raise ConfigError(f"link_basis must be one of {LINK_BASES}")


@dataclass
class RewireResult:
    graph: WeightedDigraph
    initial: WeightedDigraph
    link: LinkDistribution
    achieved_weighted: float | None
    achieved_unweighted: float | None
    initial_weighted: float | None


def _safe(fn, *args):
    try:
        return fn(*args)
    except WdassortError:
        return None


def run_rewire(cfg: RewireConfig, link: LinkDistribution | None = None) -> RewireResult:
    """Full pipeline: initial network, link distribution, chain, achieved coefficients.

    With ``link_basis="empirical"`` the link distribution is built from the
    strength sequence actually realized by the initial network, so its
    marginal matches the stubs the chain can move; ``"distribution"`` uses the
    sampling distribution itself. A ``link`` passed in overrides both.
    """
    rng = np.random.default_rng(cfg.seed)
    g0 = initial_network(cfg.distribution, cfg.n, rng)
    if link is None:
        basis = cfg.distribution
        if cfg.link_basis == "empirical":
            basis = StrengthDistribution.empirical(undirected_strengths(g0))
        link = link_distribution(basis, cfg.xi)
    g = rewire_chain(g0, link, cfg.steps, rng, selection=cfg.selection)
    return RewireResult(
        graph=g,
        initial=g0,
        link=link,
        achieved_weighted=_safe(undirected_assortativity, g, True),
        achieved_unweighted=_safe(undirected_assortativity, g, False),
        initial_weighted=_safe(undirected_assortativity, g0, True),
    )
