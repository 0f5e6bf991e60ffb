import itertools

import numpy as np
import pytest
from scipy.stats import binom

from growabc.errors import (
    ConnectivityUnreachable,
    EmptyGraph,
    MissingEdge,
    SampleTooLarge,
    UnknownNode,
)
from growabc.graph import (
    Graph,
    NodeSample,
    er_seed,
    induced_triangles,
    sample_nodes,
    triangle_count_scan,
    write_edge_list,
)


def brute_force_triangles(g):
    """O(n^3) oracle: trace(A^3) / 6 on the undirected projection."""
    n = g.node_count
    a = np.zeros((n, n), dtype=float)
    for u in range(n):
        for v in g.neighbors(u):
            a[u, v] = 1.0
    return int(round(np.trace(a @ a @ a) / 6.0))


def complete_graph(n):
    g = Graph()
    for _ in range(n):
        g.add_node()
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(i, j)
    return g


def random_graph(n, p, rng):
    g = Graph()
    for _ in range(n):
        g.add_node()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_edge(i, j)
    return g


class TestErSeed:
    def test_complete_graph_forced(self):
        g = er_seed(3, 1.0, 12345)
        assert g.node_count == 3
        assert g.edge_count == 3
        assert g.triangle_count == 1

    def test_no_edges_possible(self):
        with pytest.raises(ConnectivityUnreachable):
            er_seed(2, 0.0, 0)

    def test_edge_count_in_binomial_interval(self):
        # central 0.9999 interval of Binomial(C(30,2), 0.2)
        lo = binom.ppf(0.00005, 435, 0.2)
        hi = binom.ppf(0.99995, 435, 0.2)
        g = er_seed(30, 0.2, 7)
        assert g.is_connected()
        assert lo <= g.edge_count <= hi

    def test_deterministic(self):
        g1 = er_seed(30, 0.2, 99)
        g2 = er_seed(30, 0.2, 99)
        assert list(g1.edges()) == list(g2.edges())

    def test_single_node(self):
        g = er_seed(1, 0.0, 0)
        assert g.node_count == 1
        assert g.edge_count == 0


class TestAddNodeWithEdges:
    def test_k3_to_k4(self):
        g = complete_graph(3)
        g.add_node_with_edges([0, 1, 2])
        assert g.triangle_count == 4

    def test_no_neighbors(self):
        g = complete_graph(3)
        g.add_node_with_edges([])
        assert g.triangle_count == 1

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        g = random_graph(20, 0.3, rng)
        nbrs = rng.choice(20, size=5, replace=False).tolist()
        g.add_node_with_edges(nbrs)
        assert g.triangle_count == brute_force_triangles(g)

    def test_unknown_node(self):
        g = complete_graph(3)
        with pytest.raises(UnknownNode):
            g.add_node_with_edges([0, 99])

    def test_duplicate_neighbors_rejected(self):
        g = complete_graph(3)
        with pytest.raises(ValueError):
            g.add_node_with_edges([0, 0])


class TestRemoveEdge:
    def test_k4(self):
        g = complete_graph(4)
        g.remove_edge(0, 1)
        assert g.triangle_count == 2

    def test_path(self):
        g = Graph()
        for _ in range(3):
            g.add_node()
        g.add_edge(0, 1)
        g.add_edge(1, 2)
        g.remove_edge(0, 1)
        assert g.triangle_count == 0

    def test_missing_edge(self):
        g = complete_graph(3)
        g.remove_edge(0, 1)
        with pytest.raises(MissingEdge):
            g.remove_edge(0, 1)

    def test_round_trips_preserve_count(self):
        rng = np.random.default_rng(11)
        g = random_graph(25, 0.25, rng)
        for _ in range(30):
            edges = list(g.edges())
            u, v = edges[rng.integers(len(edges))]
            g.remove_edge(u, v)
            assert g.triangle_count == brute_force_triangles(g)
            g.add_edge(u, v)
            assert g.triangle_count == brute_force_triangles(g)


class TestSampleNodes:
    def test_full_sample(self):
        g = complete_graph(5)
        s = sample_nodes(g, 5, np.random.default_rng(0))
        assert s.node_ids == frozenset(range(5))

    def test_zero_too_small(self):
        g = complete_graph(5)
        with pytest.raises(SampleTooLarge):
            sample_nodes(g, 0, np.random.default_rng(0))

    def test_too_large(self):
        g = complete_graph(5)
        with pytest.raises(SampleTooLarge):
            sample_nodes(g, 6, np.random.default_rng(0))

    def test_uniform_frequencies(self):
        # single-node samples: each node within 5 sigma of uniform
        g = complete_graph(20)
        rng = np.random.default_rng(5)
        draws = 100_000
        counts = np.zeros(20)
        for _ in range(draws):
            (i,) = sample_nodes(g, 1, rng).node_ids
            counts[i] += 1
        expected = draws / 20
        sigma = np.sqrt(draws * (1 / 20) * (19 / 20))
        assert np.all(np.abs(counts - expected) <= 5 * sigma)


class TestInducedTriangles:
    def test_k4_full(self):
        g = complete_graph(4)
        assert induced_triangles(g, sample_nodes(
            g, 4, np.random.default_rng(0))) == 4

    def test_pair_sample(self):
        g = complete_graph(4)
        s = NodeSample(node_ids=frozenset({0, 1}), size=2)
        assert induced_triangles(g, s) == 0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(8)
        g = random_graph(30, 0.3, rng)
        s = sample_nodes(g, 12, rng)
        nodes = sorted(s.node_ids)
        expected = sum(
            1 for a, b, c in itertools.combinations(nodes, 3)
            if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c))
        assert induced_triangles(g, s) == expected

    def test_all_nodes_equals_population(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            g = random_graph(15, 0.4, rng)
            s = sample_nodes(g, 15, rng)
            assert induced_triangles(g, s) == g.triangle_count


class TestAverageDegree:
    def test_k4(self):
        assert complete_graph(4).average_degree() == 3.0

    def test_path(self):
        g = Graph()
        for _ in range(3):
            g.add_node()
        g.add_edge(0, 1)
        g.add_edge(1, 2)
        assert g.average_degree() == pytest.approx(4 / 3)

    def test_edgeless(self):
        g = Graph()
        for _ in range(10):
            g.add_node()
        assert g.average_degree() == 0.0

    def test_empty(self):
        with pytest.raises(EmptyGraph):
            Graph().average_degree()

    def test_relabel_invariant(self):
        rng = np.random.default_rng(17)
        g = random_graph(12, 0.4, rng)
        perm = rng.permutation(12)
        h = Graph()
        for _ in range(12):
            h.add_node()
        for u, v in g.edges():
            h.add_edge(int(perm[u]), int(perm[v]))
        assert h.average_degree() == pytest.approx(g.average_degree())


class TestInvariants:
    def test_random_operation_sequences(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            g = random_graph(int(rng.integers(5, 20)), 0.3, rng)
            for _ in range(15):
                if rng.random() < 0.5 and g.edge_count > 0:
                    before = g.triangle_count
                    edges = list(g.edges())
                    u, v = edges[rng.integers(len(edges))]
                    g.remove_edge(u, v)
                    assert g.triangle_count <= before
                else:
                    before = g.triangle_count
                    k = int(rng.integers(0, min(5, g.node_count) + 1))
                    nbrs = rng.choice(g.node_count, size=k,
                                      replace=False).tolist()
                    g.add_node_with_edges(nbrs)
                    assert g.triangle_count >= before
                assert g.triangle_count == brute_force_triangles(g)
                degsum = sum(g.degree(u) for u in range(g.node_count))
                assert g.edge_count == degsum // 2

    def test_scan_matches_counter(self):
        rng = np.random.default_rng(29)
        g = random_graph(25, 0.3, rng)
        assert triangle_count_scan(g) == g.triangle_count


class TestDirected:
    def test_projection_triangles(self):
        g = Graph(directed=True)
        for _ in range(3):
            g.add_node()
        g.add_edge(1, 0)
        g.add_edge(2, 0)
        g.add_edge(2, 1)
        assert g.triangle_count == 1
        assert g.arc_count == 3
        assert g.in_degrees() == [2, 1, 0]

    def test_no_self_loops(self):
        g = Graph(directed=True)
        g.add_node()
        with pytest.raises(ValueError):
            g.add_edge(0, 0)

    def test_no_parallel_projection_edges(self):
        g = Graph(directed=True)
        g.add_node()
        g.add_node()
        g.add_edge(0, 1)
        with pytest.raises(ValueError):
            g.add_edge(1, 0)


def test_edge_list_round_trip(tmp_path):
    rng = np.random.default_rng(31)
    g = random_graph(10, 0.4, rng)
    path = tmp_path / "g.edgelist"
    write_edge_list(g, path)
    from growabc.ingest import read_edge_list

    h, ts = read_edge_list(path)
    assert ts is None
    assert list(h.edges()) == list(g.edges())
