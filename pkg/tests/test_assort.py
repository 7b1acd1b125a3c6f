import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wdassort.assort import (TYPES, assortativity_profile, feature_assortativity, strength_assortativity,
                             undirected_assortativity, unweighted_strength_assortativity, weighted_moments)
from wdassort.errors import DegenerateGraphError, DegenerateVarianceError, GraphError
from wdassort.gen import ErConfig, gen_er
from wdassort.graph import build_graph, from_undirected

from conftest import random_graphs
from oracles import degree_formula, newman_undirected, pearson_over_endpoints

TOY_WEIGHTED = {("in", "in"): -0.56, ("in", "out"): -0.82, ("out", "in"): 0.29, ("out", "out"): -0.29}


class TestToyGolden:
    def test_moments(self, toy):
        out_s, in_s = toy.out_strength, toy.in_strength
        m = weighted_moments(toy, out_s, in_s)
        assert m.mean_source == pytest.approx(9.39, abs=0.005)
        assert m.sd_source == pytest.approx(3.68, abs=0.005)
        assert m.mean_target == pytest.approx(10.16, abs=0.005)
        assert m.sd_target == pytest.approx(6.06, abs=0.005)
        m = weighted_moments(toy, in_s, out_s)
        assert m.mean_source == pytest.approx(5.90, abs=0.005)
        assert m.sd_source == pytest.approx(6.58, abs=0.005)
        assert m.mean_target == pytest.approx(5.90, abs=0.005)
        assert m.sd_target == pytest.approx(4.83, abs=0.005)

    @pytest.mark.parametrize("alpha,beta", TYPES)
    def test_weighted(self, toy, alpha, beta):
        assert strength_assortativity(toy, alpha, beta) == pytest.approx(TOY_WEIGHTED[(alpha, beta)], abs=0.005)

    @pytest.mark.parametrize("alpha,beta", TYPES)
    def test_unweighted(self, toy, alpha, beta):
        assert unweighted_strength_assortativity(toy, alpha, beta) == pytest.approx(-0.75, abs=0.005)

    def test_feature_form(self, toy):
        assert feature_assortativity(toy, toy.out_strength, toy.in_strength) == pytest.approx(0.29, abs=0.005)

    def test_profile(self, toy):
        prof = assortativity_profile(toy)
        for key, expected in TOY_WEIGHTED.items():
            assert prof.weighted[key] == pytest.approx(expected, abs=0.005)
            assert prof.unweighted[key] == pytest.approx(-0.75, abs=0.005)
        assert prof.reasons == {}


class TestBoundaries:
    def test_cycle_out_in(self):
        g = build_graph([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)], 5)
        assert strength_assortativity(g, "out", "in") == pytest.approx(1.0, abs=1e-9)

    def test_cycle_in_out(self):
        # in-strength of a source and out-strength of its target are a cyclic shift of the weights
        g = build_graph([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)], 5)
        expected = pearson_over_endpoints(g, g.in_strength, g.out_strength)
        assert strength_assortativity(g, "in", "out") == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(-0.58549055, abs=1e-8)

    def test_reciprocal_pair_out_out(self):
        g = build_graph([(0, 1, 1.0), (1, 0, 2.0)], 5)
        assert strength_assortativity(g, "out", "out") == pytest.approx(-1.0, abs=1e-9)

    def test_vanishing_weight_out_out(self):
        g = build_graph([(0, 1, 1e-6), (1, 0, 1.0), (1, 2, 1.0)], 5)
        assert strength_assortativity(g, "out", "out") < -0.999


class TestDegenerate:
    def test_constant_feature_moments(self, toy):
        m = weighted_moments(toy, np.full(8, 3.7), np.full(8, 3.7))
        assert m.mean_source == 3.7 and m.sd_source == 0.0
        assert m.mean_target == 3.7 and m.sd_target == 0.0

    def test_constant_feature_raises(self, toy):
        with pytest.raises(DegenerateVarianceError):
            feature_assortativity(toy, np.full(8, 2.0), toy.in_strength)

    def test_edgeless(self):
        g = build_graph([], 4)
        with pytest.raises(DegenerateGraphError):
            strength_assortativity(g, "out", "in")
        prof = assortativity_profile(g)
        assert all(v is None for *_, v in prof.rows())
        assert set(prof.reasons.values()) == {"degenerate-graph"}

    def test_complete_undirected_graph(self):
        edges = [(i, j, 1.0) for i in range(4) for j in range(i + 1, 4)]
        g = from_undirected(edges, 4)
        with pytest.raises(DegenerateVarianceError):
            undirected_assortativity(g, weighted=False)
        with pytest.raises(DegenerateVarianceError):
            undirected_assortativity(g, weighted=True)


class TestOracles:
    graphs = random_graphs(100, seed=11)

    @pytest.mark.parametrize("k", range(0, 100, 7))
    def test_weighted_matches_endpoint_pearson(self, k):
        g = self.graphs[k]
        for alpha, beta in TYPES:
            x, y = g.strengths(alpha), g.strengths(beta)
            assert strength_assortativity(g, alpha, beta) == pytest.approx(pearson_over_endpoints(g, x, y),
                                                                           abs=1e-12)

    @pytest.mark.parametrize("k", range(0, 100, 7))
    def test_unweighted_matches_transcription(self, k):
        g = self.graphs[k]
        for alpha, beta in TYPES:
            try:
                expected = degree_formula(g, alpha, beta)
            except ZeroDivisionError:
                with pytest.raises(DegenerateVarianceError):
                    unweighted_strength_assortativity(g, alpha, beta)
                continue
            assert unweighted_strength_assortativity(g, alpha, beta) == pytest.approx(expected, abs=1e-12)

    def test_unit_weights_weighted_equals_unweighted(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = 12
            edges = [(i, j, 1.0) for i in range(n) for j in range(n) if i != j and rng.random() < 0.3]
            g = build_graph(edges, n)
            for alpha, beta in TYPES:
                assert strength_assortativity(g, alpha, beta) == pytest.approx(
                    unweighted_strength_assortativity(g, alpha, beta), abs=1e-12)


class TestUndirected:
    def test_path_graph(self):
        g = from_undirected([(0, 1, 1.0), (1, 2, 1.0)], 3)
        assert undirected_assortativity(g, weighted=False) == pytest.approx(-1.0, abs=1e-12)
        assert undirected_assortativity(g, weighted=True) == pytest.approx(-1.0, abs=1e-12)

    def test_matches_newman(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = 15
            edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.25]
            g = from_undirected([(i, j, 1.0) for i, j in edges], n)
            assert undirected_assortativity(g, weighted=False) == pytest.approx(newman_undirected(edges), abs=1e-12)

    def test_four_types_agree(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = 15
            edges = [(i, j, rng.uniform(0.1, 5)) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
            g = from_undirected(edges, n)
            vals = [strength_assortativity(g, a, b) for a, b in TYPES]
            assert max(vals) - min(vals) <= 1e-12

    def test_rejects_asymmetric(self, toy):
        with pytest.raises(GraphError):
            undirected_assortativity(toy)


def test_er_profile_near_zero():
    g = gen_er(ErConfig(150, 0.2, 10), np.random.default_rng(2024))
    prof = assortativity_profile(g)
    for *_, value in prof.rows():
        assert -0.2 < value < 0.2


# property-based invariants ---------------------------------------------------

small_graphs = st.integers(3, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 20)).filter(lambda e: e[0] != e[1]),
            min_size=3, max_size=50,
        ),
    )
)


def _coefficients(g):
    out = []
    for a, b in TYPES:
        try:
            out.append(strength_assortativity(g, a, b))
        except DegenerateVarianceError:
            out.append(None)
    return out


def _close(u, v, tol=1e-12):
    return all((a is None and b is None) or (a is not None and b is not None and abs(a - b) <= tol)
               for a, b in zip(u, v))


@settings(max_examples=100, deadline=None)
@given(small_graphs)
def test_range(data):
    n, edges = data
    for v in _coefficients(build_graph(edges, n)):
        assert v is None or -1 <= v <= 1


@settings(max_examples=100, deadline=None)
@given(small_graphs, st.sampled_from([7.0, 0.001, 3.3e4]))
def test_weight_scaling(data, c):
    n, edges = data
    g = build_graph(edges, n)
    h = build_graph([(s, t, w * c) for s, t, w in edges], n)
    assert _close(_coefficients(g), _coefficients(h))


@settings(max_examples=100, deadline=None)
@given(small_graphs, st.floats(-50, 50).filter(lambda a: abs(a) > 1e-3), st.floats(-100, 100))
def test_affine_feature(data, a, b):
    n, edges = data
    g = build_graph(edges, n)
    x, y = g.out_strength, g.in_strength
    try:
        base = feature_assortativity(g, x, y)
    except DegenerateVarianceError:
        return
    assert feature_assortativity(g, a * x + b, y) == pytest.approx(math.copysign(1, a) * base, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(small_graphs, st.randoms(use_true_random=False))
def test_relabeling(data, rnd):
    n, edges = data
    perm = list(range(n))
    rnd.shuffle(perm)
    g = build_graph(edges, n)
    h = build_graph([(perm[s], perm[t], w) for s, t, w in edges], n)
    assert _close(_coefficients(g), _coefficients(h))


@settings(max_examples=100, deadline=None)
@given(small_graphs)
def test_multi_edge_expansion(data):
    n, edges = data
    g = build_graph(edges, n)
    h = build_graph([(s, t, 1.0) for s, t, w in edges for _ in range(w)], n)
    assert _coefficients(g) == _coefficients(h)
