"""Acceptance criteria, each run at its stated scale and tolerance.

Every test records a one-line verdict that is printed in the terminal summary
under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from wdassort.assort import (TYPES, assortativity_profile, feature_assortativity, strength_assortativity,
                             unweighted_strength_assortativity, weighted_moments)
from wdassort.backbone import disparity_pvalue, edge_significance, extract_backbone
from wdassort.errors import DegenerateVarianceError
from wdassort.experiment import run_design, summarize
from wdassort.graph import build_graph

from conftest import ACCEPTANCE, random_graphs, toy_graph
from oracles import degree_formula, pearson_over_endpoints

pytestmark = pytest.mark.slow

METRICS = [f"{m}_{a}_{b}" for m in ("weighted", "unweighted") for a, b in TYPES]


def record(k, checks):
    """Store the verdict for criterion ``k`` and fail on any unmet check."""
    ok = all(passed for _, passed in checks)
    failed = [label for label, passed in checks if not passed]
    detail = "; ".join(label for label, _ in checks)
    if failed:
        detail = "unmet: " + "; ".join(failed)
    ACCEPTANCE[k] = (ok, detail)
    assert ok, detail


def cell_stats(records, metric):
    return {(r.parameter_name, r.parameter_value): r for r in summarize(records) if r.metric == metric}


def values(records, metric, value=None):
    return np.array([r.value for r in records
                     if r.metric == metric and (value is None or r.parameter_value == value)], dtype=float)


def test_criterion_1_toy_golden_values():
    t0 = time.perf_counter()
    g = toy_graph()
    prof = assortativity_profile(g)
    m1 = weighted_moments(g, g.out_strength, g.in_strength)
    m2 = weighted_moments(g, g.in_strength, g.out_strength)
    elapsed = time.perf_counter() - t0

    expected = {("in", "in"): -0.56, ("in", "out"): -0.82, ("out", "in"): 0.29, ("out", "out"): -0.29}
    moments = [m1.mean_source, m2.mean_source, m2.mean_target, m1.mean_target,
               m1.sd_source, m2.sd_source, m2.sd_target, m1.sd_target]
    listed = [9.39, 5.90, 5.90, 10.16, 3.68, 6.58, 4.83, 6.06]
    checks = [
        ("weighted (in,in),(in,out),(out,in),(out,out) within 0.005",
         all(abs(prof.weighted[k] - v) <= 0.005 for k, v in expected.items())),
        ("unweighted all -0.75 within 0.005", all(abs(v + 0.75) <= 0.005 for v in prof.unweighted.values())),
        ("eight moments within 0.005", all(abs(a - b) <= 0.005 for a, b in zip(moments, listed))),
        (f"runtime {elapsed:.3f}s < 1s", elapsed < 1.0),
    ]
    record(1, checks)


def _boundary_checks():
    cyc = build_graph([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)], 5)
    r_in_out = strength_assortativity(cyc, "in", "out")
    r_out_in = strength_assortativity(cyc, "out", "in")
    pair = build_graph([(0, 1, 1.0), (1, 0, 2.0)], 5)
    r_pair = strength_assortativity(pair, "out", "out")
    tiny = build_graph([(0, 1, 1e-6), (1, 0, 1.0), (1, 2, 1.0)], 5)
    r_tiny = strength_assortativity(tiny, "out", "out")
    return [
        (f"cycle out-in = {r_out_in:.12f} (target 1 within 1e-9)", abs(r_out_in - 1) <= 1e-9),
        (f"cycle in-out = {r_in_out:.12f} (target 1 within 1e-9)", abs(r_in_out - 1) <= 1e-9),
        (f"reciprocal pair out-out = {r_pair:.12f} (target -1 within 1e-9)", abs(r_pair + 1) <= 1e-9),
        (f"vanishing-weight out-out = {r_tiny:.6f} < -0.999", r_tiny < -0.999),
    ]


def test_criterion_2_attainable_parts():
    checks = _boundary_checks()
    attainable = [c for c in checks if not c[0].startswith("cycle in-out")]
    assert all(passed for _, passed in attainable), attainable


@pytest.mark.xfail(strict=True, reason="on the 3-cycle the in-out pairs are a cyclic shift of the weights, "
                                       "so the in-out coefficient is not 1; only out-in equals 1")
def test_criterion_2_boundary_matrices():
    record(2, _boundary_checks())


def test_criterion_3_oracle_equivalence():
    graphs = random_graphs(100, seed=2024)
    worst_w = worst_u = 0.0
    degenerate_agree = True
    for g in graphs:
        for a, b in TYPES:
            with np.errstate(invalid="ignore"):
                ref = pearson_over_endpoints(g, g.strengths(a), g.strengths(b))
            try:
                worst_w = max(worst_w, abs(strength_assortativity(g, a, b) - ref))
            except DegenerateVarianceError:
                # only legitimate when one endpoint feature is constant over the edges
                xs, ys = g.strengths(a)[g.source], g.strengths(b)[g.target]
                degenerate_agree &= bool(np.all(xs == xs[0]) or np.all(ys == ys[0]))
            try:
                ref_u = degree_formula(g, a, b)
            except ZeroDivisionError:
                try:
                    unweighted_strength_assortativity(g, a, b)
                    degenerate_agree = False
                except DegenerateVarianceError:
                    pass
                continue
            worst_u = max(worst_u, abs(unweighted_strength_assortativity(g, a, b) - ref_u))
    record(3, [
        (f"weighted max |diff| {worst_w:.2e} <= 1e-10", worst_w <= 1e-10),
        (f"unweighted max |diff| {worst_u:.2e} <= 1e-10", worst_u <= 1e-10),
        ("degenerate cases agree", degenerate_agree),
    ])


def test_criterion_4_er_neutrality():
    t0 = time.perf_counter()
    records = run_design("er-sweep", 500, seed=4000, params={"grid": ["150"]})
    elapsed = time.perf_counter() - t0
    rows = [cell_stats(records, m)[("n", 150.0)] for m in METRICS]
    worst_mean = max(abs(r.mean) for r in rows)
    worst_sd = max(r.sd for r in rows)
    record(4, [
        (f"max |mean| {worst_mean:.4f} <= 0.01", worst_mean <= 0.01),
        (f"max sd {worst_sd:.4f} < 0.05", worst_sd < 0.05),
        ("no missing values", all(r.missing == 0 and r.count == 500 for r in rows)),
        (f"runtime {elapsed:.1f}s", elapsed < 300),
    ])


def test_criterion_5_ba_signs():
    sweep = run_design("ba-sweep", 200, seed=5000, params={"grid": ["1024"]})
    w = values(sweep, "weighted_out_in").mean()
    u = values(sweep, "unweighted_out_in").mean()
    big = run_design("ba-bigedge", 200, seed=5500, params={"grid": ["10", "250", "500"]})
    bw = [values(big, "weighted_out_in", t).mean() for t in (10.0, 250.0, 500.0)]
    bu = [values(big, "unweighted_out_in", t).mean() for t in (10.0, 250.0, 500.0)]
    fmt = lambda xs: ", ".join(f"{x:.3f}" for x in xs)  # noqa: E731
    record(5, [
        (f"steps 1022: weighted {w:.3f} < 0 and unweighted {u:.3f} < 0", w < 0 and u < 0),
        ("|weighted| < |unweighted|", abs(w) < abs(u)),
        (f"big edge weighted out-in ({fmt(bw)}) positive", all(x > 0 for x in bw)),
        ("strictly increasing in t", bw[0] < bw[1] < bw[2]),
        (f"big edge unweighted out-in ({fmt(bu)}) negative", all(x < 0 for x in bu)),
    ])


def test_criterion_6_sbm():
    size = run_design("sbm-size", 200, seed=6000, params={"grid": ["50", "500"]})
    w500 = values(size, "weighted_out_in", 500.0)
    u500 = values(size, "unweighted_out_in", 500.0)
    w50 = values(size, "weighted_out_in", 50.0)
    ci = stats.bootstrap((w500,), np.mean, confidence_level=0.99, n_resamples=9999,
                         random_state=np.random.default_rng(6001)).confidence_interval

    sens = run_design("sbm-sensitivity", 200, seed=6500)
    means = {key: r.mean for key, r in cell_stats(sens, "weighted_out_in").items()}
    ks = [1, 0.5, 0.25, 0.125]
    ps = sorted({p for _, p in means})
    by_k = {k: [means[(f"p_between|k={format(k, 'g')}", p)] for p in ps] for k in ks}
    dec_in_p = all(all(a > b for a, b in zip(row, row[1:])) for row in by_k.values())
    inc_as_k_drops = all(all(by_k[k1][i] < by_k[k2][i] for k1, k2 in zip(ks, ks[1:])) for i in range(len(ps)))
    record(6, [
        (f"unweighted out-in mean {u500.mean():.4f} within 0.02 of 0", abs(u500.mean()) <= 0.02),
        (f"weighted out-in mean {w500.mean():.3f} > 0, 99% CI [{ci.low:.3f}, {ci.high:.3f}] excludes 0",
         w500.mean() > 0 and ci.low > 0),
        (f"size 500 mean {w500.mean():.3f} > size 50 mean {w50.mean():.3f}", w500.mean() > w50.mean()),
        ("sensitivity decreasing in p' at every k", dec_in_p),
        ("sensitivity increasing as k decreases at every p'", inc_as_k_drops),
    ])


def test_criterion_7_rewiring_targets():
    records = run_design("rewire-targets", 20, seed=7000, params={"grid": ["0.2", "0.5", "0.8"]})
    checks = []
    for xi in (0.2, 0.5, 0.8):
        got = values(records, "weighted", xi)
        checks.append((f"xi {xi}: mean {got.mean():.4f} within 0.05 ({got.size} runs)",
                       got.size == 20 and abs(got.mean() - xi) <= 0.05))
    resid = values(records, "qp_max_residual")
    # residuals include the distance of every link probability from [0, 1]
    checks.append((f"max QP residual {resid.max():.1e} < 1e-8 (constraints and L in [0,1])",
                   resid.size == 60 and resid.max() < 1e-8))
    record(7, checks)


def test_criterion_8_backbone():
    worst = 0.0
    for d in (2, 3, 4, 7, 12, 30, 100):
        for w in np.linspace(0, 1, 21):
            tail, _ = integrate.quad(lambda x: (d - 1) * (1 - x) ** (d - 2), w, 1, epsabs=1e-13, epsrel=1e-13)
            worst = max(worst, abs(disparity_pvalue(w, d) - tail))
    star = build_graph([(0, k, w) for k, w in zip(range(1, 6), (100, 1, 1, 1, 1))], 6)
    bb, _ = extract_backbone(star, 0.05)
    nested = True
    for g in random_graphs(50, seed=8000):
        keeps = [edge_significance(g, a).keep for a in (0.01, 0.05, 0.1, 0.2, 0.5)]
        nested &= all(np.all(hi[lo]) for lo, hi in zip(keeps, keeps[1:]))
    record(8, [
        (f"closed form vs quadrature max |diff| {worst:.1e} <= 1e-10", worst <= 1e-10),
        ("star keeps exactly the weight-100 edge", bb.edges() == [(0, 1, 100.0)]),
        ("backbones nested in alpha on 50 graphs", nested),
    ])


def _coefficients(g):
    out = []
    for a, b in TYPES:
        try:
            out.append(strength_assortativity(g, a, b))
        except DegenerateVarianceError:
            out.append(math.nan)
    return np.array(out)


def _max_gap(u, v):
    if not np.array_equal(np.isnan(u), np.isnan(v)):
        return math.inf
    m = ~np.isnan(u)
    return float(np.max(np.abs(u[m] - v[m]), initial=0.0))


def test_criterion_9_invariances():
    rng = np.random.default_rng(9000)
    graphs = random_graphs(100, seed=9001, integer=True)
    gaps = {"weight scaling": 0.0, "affine feature": 0.0, "relabeling": 0.0, "multi-edge expansion": 0.0}
    for g in graphs:
        edges = g.edges()
        base = _coefficients(g)
        c = float(rng.uniform(0.01, 100))
        scaled = build_graph([(s, t, w * c) for s, t, w in edges], g.n)
        gaps["weight scaling"] = max(gaps["weight scaling"], _max_gap(base, _coefficients(scaled)))

        x, y = rng.normal(size=g.n), rng.normal(size=g.n)
        a, b = float(rng.choice([-1, 1]) * rng.uniform(0.1, 10)), float(rng.uniform(-50, 50))
        r0 = feature_assortativity(g, x, y)
        r1 = feature_assortativity(g, a * x + b, y)
        gaps["affine feature"] = max(gaps["affine feature"], abs(r1 - math.copysign(1, a) * r0))

        perm = rng.permutation(g.n)
        relabeled = build_graph([(perm[s], perm[t], w) for s, t, w in edges], g.n)
        gaps["relabeling"] = max(gaps["relabeling"], _max_gap(base, _coefficients(relabeled)))

        expanded = build_graph([(s, t, 1.0) for s, t, w in edges for _ in range(int(w))], g.n)
        gaps["multi-edge expansion"] = max(gaps["multi-edge expansion"], _max_gap(base, _coefficients(expanded)))
    record(9, [(f"{name} max |diff| {gap:.1e} <= 1e-12", gap <= 1e-12) for name, gap in gaps.items()])
