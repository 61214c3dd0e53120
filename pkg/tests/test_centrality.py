# tests/test_centrality.py
import itertools

import networkx as nx
import numpy as np
import pytest

from rewirecap.centrality import Centrality
from rewirecap.exceptions import ConvergenceError, DisconnectedGraphError, UndefinedCorrelationError

from conftest import random_connected_graph


def _betweenness_by_path_counting(g):
    # sum over unordered pairs of the share of shortest paths through v
    out = np.zeros(g.number_of_nodes())
    for s, t in itertools.combinations(g.nodes(), 2):
        paths = list(nx.all_shortest_paths(g, s, t))
        for path in paths:
            for v in path[1:-1]:
                out[v] += 1.0 / len(paths)
    return out


def _assortativity_from_joint(g):
    m = g.number_of_edges()
    e = {}
    for u, v in g.edges():
        a, b = g.degree(u) - 1, g.degree(v) - 1
        e[(a, b)] = e.get((a, b), 0.0) + 1.0 / (2 * m)
        e[(b, a)] = e.get((b, a), 0.0) + 1.0 / (2 * m)
    q = {}
    for (j, _), w in e.items():
        q[j] = q.get(j, 0.0) + w
    mu = sum(k * w for k, w in q.items())
    var = sum(k * k * w for k, w in q.items()) - mu ** 2
    cov = sum(j * k * w for (j, k), w in e.items()) - mu ** 2
    return cov / var, var


# ----- Betweenness -----
def test_betweenness_matches_path_counting(graph_corpus):
    for g in graph_corpus:
        raw, norm = Centrality.betweenness(g)
        expected = _betweenness_by_path_counting(g)
        np.testing.assert_allclose(raw, expected, atol=1e-9)
        n = g.number_of_nodes()
        np.testing.assert_allclose(norm, expected / ((n - 1) * (n - 2) / 2), atol=1e-9)


def test_betweenness_path_graph(path4):
    raw, norm = Centrality.betweenness(path4)
    np.testing.assert_allclose(raw, [0, 2, 2, 0])
    assert norm[1] == pytest.approx(2 / 3)


def test_betweenness_needs_connected_graph():
    g = nx.Graph([(0, 1), (2, 3)])
    with pytest.raises(DisconnectedGraphError):
        Centrality.betweenness(g)
    with pytest.raises(DisconnectedGraphError):
        Centrality.betweenness(nx.path_graph(2))


def test_karate_betweenness_peak(karate):
    bundle = Centrality.compute_bundle(karate)
    assert bundle.g_max == pytest.approx(0.4376, abs=0.02)
    assert bundle.max_bc_node == 0


# ----- Closeness -----
def test_closeness_star(star4):
    cc = Centrality.closeness(star4)
    assert cc[0] == pytest.approx(1.0)
    np.testing.assert_allclose(cc[1:], 4 / 7)


# ----- Eigenvector centrality -----
def test_eigenvector_matches_dense_solver():
    rng = np.random.default_rng(7)
    for _ in range(40):
        g = random_connected_graph(rng, int(rng.integers(5, 31)), p=0.2)
        ec, kappa = Centrality.eigenvector_centrality(g)

        values, vectors = np.linalg.eigh(nx.to_numpy_array(g, nodelist=range(g.number_of_nodes())))
        principal = np.abs(vectors[:, -1])
        principal /= principal.max()

        np.testing.assert_allclose(ec, principal, atol=1e-6)
        assert kappa == pytest.approx(values[-1], abs=1e-6)
        assert ec.max() == pytest.approx(1.0)
        assert np.all(ec > 0)


def test_eigenvector_independent_of_start_vector(karate):
    rng = np.random.default_rng(21)
    reference, kappa = Centrality.eigenvector_centrality(karate)
    for _ in range(5):
        start = rng.uniform(0.01, 1.0, size=karate.number_of_nodes())
        ec, other_kappa = Centrality.eigenvector_centrality(karate, start=start)
        np.testing.assert_allclose(ec, reference, atol=1e-6)
        assert other_kappa == pytest.approx(kappa, abs=1e-6)


def test_eigenvector_convergence_error(star4):
    with pytest.raises(ConvergenceError) as e:
        Centrality.eigenvector_centrality(star4, max_iter=1)
    assert e.value.iterations == 1
    assert e.value.residual > 0


def test_eigenvector_rejects_bad_start(triangle):
    with pytest.raises(ValueError):
        Centrality.eigenvector_centrality(triangle, start=np.array([1.0, 0.0, 1.0]))


# ----- Degree correlation -----
def test_assortativity_matches_joint_distribution(graph_corpus):
    checked = 0
    for g in graph_corpus:
        if g.number_of_edges() < 2:
            continue
        expected, var = _assortativity_from_joint(g)
        if var <= 1e-12:
            continue
        assert Centrality.assortativity(g) == pytest.approx(np.clip(expected, -1, 1), abs=1e-9)
        checked += 1
    assert checked > 100


def test_assortativity_path_graph(path4):
    assert Centrality.assortativity(path4) == pytest.approx(-0.5)
    corr = Centrality.edge_correlation(path4)
    assert corr.mu_q == pytest.approx(2 / 3)
    assert corr.sigma_q2 == pytest.approx(2 / 9)


def test_assortativity_undefined_on_regular_graph():
    with pytest.raises(UndefinedCorrelationError):
        Centrality.assortativity(nx.cycle_graph(6))
    assert Centrality.edge_correlation(nx.cycle_graph(6)).r_deg is None


def test_pair_correlation_sign_and_clamp(star4):
    # hub has remaining degree 3 and leaves 0, with mu_q = 1.5
    assert Centrality.pair_correlation(star4, 0, 1) == pytest.approx(-1.0)
    assert Centrality.pair_correlation(star4, 1, 2) == pytest.approx(1.0)
    assert Centrality.pair_correlation(star4, 0, 0, clamp=False) == pytest.approx(1.0)

    with pytest.raises(UndefinedCorrelationError):
        Centrality.pair_correlation(nx.cycle_graph(5), 0, 1)


def test_pair_correlation_symmetric(small_ba):
    corr = Centrality.edge_correlation(small_ba)
    for i, j in [(0, 1), (3, 40), (7, 79), (12, 12)]:
        for clamp in (True, False):
            assert Centrality.pair_correlation(small_ba, i, j, clamp=clamp, correlation=corr) == pytest.approx(
                Centrality.pair_correlation(small_ba, j, i, clamp=clamp, correlation=corr)
            )


def test_pair_correlation_endpoint_mean_is_assortativity(karate, small_ba, graph_corpus):
    checked = 0
    for g in [karate, small_ba] + graph_corpus[:80]:
        corr = Centrality.edge_correlation(g)
        if corr.r_deg is None:
            continue
        scores = [Centrality.pair_correlation(g, u, v, clamp=False, correlation=corr) for u, v in g.edges()]
        assert np.mean(scores) == pytest.approx(corr.r_deg, abs=1e-9)
        checked += 1
    assert checked > 40


def test_scale_correlation_range():
    assert Centrality.scale_correlation(-1.0) == pytest.approx(0.0)
    assert Centrality.scale_correlation(1.0) == pytest.approx(2.0)
    np.testing.assert_allclose(Centrality.scale_correlation(np.array([-0.5, 0.0])), [0.5, 1.0])
    with pytest.raises(ValueError):
        Centrality.scale_correlation(1.5)


def test_centrality_csv(tmp_path, path4):
    bundle = Centrality.compute_bundle(path4)
    path = Centrality.write_centrality_csv(path4, bundle, str(tmp_path / "c.csv"))
    with open(path, encoding="utf-8") as f:
        header, *rows = f.read().splitlines()
    assert header == "node,degree,bc_raw,bc_norm,cc,ec"
    assert len(rows) == 4
