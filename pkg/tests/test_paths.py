import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from conftest import graphs
from cyclespan.graph import LabeledGraph, complete_graph, cycle_graph, gen_gnp, path_graph, star_graph
from cyclespan.paths import (
    ConflictGraph,
    count_ropes,
    enumerate_paths,
    greedy_independent_set,
    is_central,
    light_pairs,
    max_independent_set,
    r_set,
    rope_bound,
    rope_terms,
    sigma,
    sigma_central,
    tau,
)


class TestTau:
    def test_single_edge(self):
        G = path_graph(2)
        assert tau(G, 0, 1, 1) == (1, False)
        assert tau(G, 0, 2, 1) == (0, False)

    def test_k4_two_paths(self):
        assert tau(complete_graph(4), 0, 1, 2) == (2, False)

    def test_k5_three_paths(self):
        assert tau(complete_graph(5), 0, 1, 3) == (6, False)

    def test_bad_pair(self):
        with pytest.raises(ValueError):
            tau(complete_graph(3), 1, 1, 2)

    def test_cap(self):
        assert tau(complete_graph(8), 0, 1, 4, cap=10) == (10, True)

    @given(graphs(min_n=2, max_n=7), st.integers(1, 5), st.data())
    def test_matches_bruteforce(self, G, l, data):
        x, y = data.draw(st.lists(st.integers(0, G.n - 1), min_size=2, max_size=2, unique=True))
        brute = oracles.simple_paths(G, x, y, l)
        assert tau(G, x, y, l)[0] == len(brute)
        assert tau(G, y, x, l)[0] == len(brute)
        assert list(enumerate_paths(G, x, y, l).paths) == sorted(brute)


class TestSigma:
    def test_k5_pairs(self):
        for x, y in combinations(range(5), 2):
            assert sigma(complete_graph(5), x, y, 2).sigma == 3

    def test_c5_adjacent(self):
        st_ = sigma(cycle_graph(5), 0, 1, 4)
        assert (st_.tau, st_.sigma, st_.sigma_certified) == (1, 1, True)

    def test_no_paths(self):
        assert sigma(path_graph(3), 0, 3, 2).sigma == 0

    def test_k6(self):
        assert sigma(complete_graph(6), 0, 1, 2).sigma == 4
        assert sigma(complete_graph(7), 0, 1, 3).sigma == 2

    @given(graphs(min_n=2, max_n=7), st.integers(2, 4), st.data())
    def test_matches_bruteforce(self, G, l, data):
        x, y = data.draw(st.lists(st.integers(0, G.n - 1), min_size=2, max_size=2, unique=True))
        paths = oracles.simple_paths(G, x, y, l)
        assume(len(paths) <= 40)
        st_ = sigma(G, x, y, l)
        assert st_.sigma_certified
        assert st_.sigma == oracles.max_disjoint(paths)
        assert st_.sigma <= st_.tau
        used = [set(P[1:-1]) for P in st_.packing]
        for a, b in combinations(used, 2):
            assert not a & b

    def test_greedy_fallback_flagged(self):
        st_ = sigma(complete_graph(7), 0, 1, 3, node_cap=5)
        assert not st_.sigma_certified and 1 <= st_.sigma <= 2


class TestMIS:
    @given(st.integers(1, 14), st.data())
    def test_against_exhaustive(self, n, data):
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        keep = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        adj = [0] * n
        for (a, b), k in zip(pairs, keep):
            if k:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
        sel = max_independent_set(tuple(adj), n)
        assert all(not (adj[a] >> b) & 1 for a, b in combinations(sel, 2))
        best = 0
        for mask in range(1 << n):
            if all(not (adj[v] & mask) for v in range(n) if (mask >> v) & 1):
                best = max(best, mask.bit_count())
        assert len(sel) == best
        g = greedy_independent_set(tuple(adj), n)
        assert len(g) <= best

    def test_conflict_graph(self):
        pl = enumerate_paths(complete_graph(5), 0, 1, 3)
        cg = ConflictGraph.from_paths(pl)
        for a in range(cg.n_nodes):
            assert not (cg.adj[a] >> a) & 1
            for b in range(cg.n_nodes):
                assert ((cg.adj[a] >> b) & 1) == ((cg.adj[b] >> a) & 1)


class TestCentral:
    def test_empty_s(self):
        G = complete_graph(6)
        assert sigma_central(G, 0, 1, G.subset(), 4).sigma == 0

    def test_full_s_is_even(self):
        G = complete_graph(7)
        assert sigma_central(G, 0, 1, G.full(), 4).sigma == 0

    def test_c5_middle_edge(self):
        G = cycle_graph(5)
        # the only 4-edge path 0-4-3-2-1; 4-3 and 3-2 are internal
        S = G.subset_from_pairs([(3, 4)])
        assert sigma_central(G, 0, 1, S, 4).sigma == 1
        S_end = G.subset_from_pairs([(0, 4)])
        assert sigma_central(G, 0, 1, S_end, 4).sigma == 0

    def test_short_paths_never_central(self):
        G = complete_graph(5)
        assert not is_central(G, (0, 2, 1), G.full())

    def test_host_check(self):
        G = complete_graph(5)
        with pytest.raises(ValueError):
            sigma_central(G, 0, 1, complete_graph(5).subset(), 3)


class TestPairSets:
    def test_light_pairs_tiny_gamma(self):
        G = complete_graph(6)
        assert not light_pairs(G, 1.0, 3, 1e-9).pairs

    def test_light_pairs_edgeless(self):
        G = LabeledGraph(5, ())
        assert len(light_pairs(G, 0.5, 3, 0.5).pairs) == 10

    def test_light_pairs_k6(self):
        assert not light_pairs(complete_graph(6), 1.0, 3, 0.5).pairs

    def test_light_pairs_gamma_range(self):
        with pytest.raises(ValueError):
            light_pairs(complete_graph(4), 1.0, 3, 1.0)

    def test_r_set_empty_s(self):
        G = complete_graph(6)
        assert not r_set(G, 1.0, G.subset(), 5).pairs

    def test_r_set_high_threshold(self):
        G = complete_graph(7)
        assert not r_set(G, 1.0, G.subset(range(0, G.m, 2)), 5, threshold=G.m).pairs

    def test_r_set_hand_built(self):
        # x=0, y=1 joined by an edge and two 4-edge paths 0-2-3-4-1 and 0-5-6-7-1;
        # S marks one internal edge on each path
        G = LabeledGraph.from_edges(8, [(0, 1), (0, 2), (2, 3), (3, 4), (4, 1), (0, 5), (5, 6), (6, 7), (7, 1)])
        S = G.subset_from_pairs([(2, 3), (5, 6)])
        R = r_set(G, 1.0, S, 5, threshold=1.5)
        assert R.pairs == {(0, 1)}
        # brute-force: only (0, 1) has two internally disjoint S-central paths
        for x, y in combinations(range(8), 2):
            paths = [P for P in oracles.simple_paths(G, x, y, 4) if is_central(G, P, S)]
            assert (oracles.max_disjoint(paths) > 1.5) == ((x, y) == (0, 1))


class TestRopes:
    def test_empty_s(self):
        G = complete_graph(5)
        assert count_ropes(G, G.subset(), 3) == (0, False)
        assert rope_bound(G, 0.5, G.subset(), 3) == 0

    def test_star(self):
        G = star_graph(3)
        assert count_ropes(G, G.full(), 2) == (3, False)

    def test_p4_ends(self):
        G = path_graph(4)
        S = G.subset_from_pairs([(0, 1), (3, 4)])
        assert count_ropes(G, S, 4) == (1, False)

    def test_triangle(self):
        # no 3-edge path with distinct vertices fits in a triangle; walks give 24
        G = complete_graph(3)
        assert count_ropes(G, G.full(), 3) == (0, False)
        assert rope_bound(G, 1.0, G.full(), 3) == 24.0

    def test_t_range(self):
        G = complete_graph(4)
        with pytest.raises(ValueError):
            count_ropes(G, G.full(), 1)
        with pytest.raises(ValueError):
            rope_bound(G, 1.0, G.full(), 2)

    @given(graphs(min_n=2, max_n=7), st.integers(2, 5), st.data())
    def test_matches_bruteforce_and_bound(self, G, t, data):
        assume(G.m > 0)
        ids = data.draw(st.sets(st.integers(0, G.m - 1)))
        S = G.subset(ids)
        c, trunc = count_ropes(G, S, t)
        assert not trunc
        assert c == oracles.ropes(G, S.pairs(), t)
        if t >= 3:
            assert c <= rope_bound(G, 0.5, S, t) + 1e-9

    def test_bound_is_quadratic_form(self):
        G = gen_gnp(30, 0.2, 2)
        S = G.subset(range(0, G.m, 3))
        A = G.adjacency_matrix()
        f = np.zeros(G.n)
        for u, v in S.pairs():
            f[u] += 1
            f[v] += 1
        assert rope_bound(G, 0.2, S, 5) == pytest.approx(f @ np.linalg.matrix_power(A, 3) @ f)

    def test_terms(self):
        beta, a, b = rope_terms(100, 0.1, 500, 4)
        assert beta == pytest.approx(1.0)
        assert a == pytest.approx(100**5 * 0.1**4)
        assert b == pytest.approx(100**4 * 0.1**3)
        assert math.isfinite(a)
