# tests/test_rewiring.py
from collections import Counter

import networkx as nx
import numpy as np
import pytest

from rewirecap.centrality import Centrality
from rewirecap.config import RejectReasons
from rewirecap.exceptions import ConfigurationError, DisconnectedGraphError
from rewirecap.graph_core import GraphUtils, NetworkBuilder
from rewirecap.meso_structure import CorePartition
from rewirecap.rewiring import RewireConfig, Rewiring
from rewirecap.utils import rewire_utils
from rewirecap.utils.rewire_utils import RewireUtils

STRATEGIES = ["dpa", "dec", "dkbc", "ckdbc"]


@pytest.fixture(autouse=True)
def quiet_move_logs(monkeypatch, recording_logger):
    # keep per-move lines out of logs/ and let tests inspect them
    monkeypatch.setattr(rewire_utils, "accepted_logger", recording_logger)
    monkeypatch.setattr(rewire_utils, "rejected_logger", recording_logger)
    return recording_logger


# ----- Run-level invariants -----
@pytest.mark.parametrize("strategy", STRATEGIES)
def test_rewire_preserves_edges_and_connectivity(small_ba, strategy):
    cfg = RewireConfig(strategy=strategy, r_f=0.1, seed=3)
    h, report = Rewiring.rewire(small_ba, cfg)

    assert h.number_of_edges() == small_ba.number_of_edges()
    assert report.edges_before == report.edges_after == small_ba.number_of_edges()
    assert nx.number_of_selfloops(h) == 0
    assert nx.is_connected(h)
    assert report.target == 16
    assert report.accepted <= report.target
    assert report.attempted == report.accepted + sum(report.rejections.values())
    assert len(report.moves) == report.accepted

    # input graph left untouched
    assert small_ba.number_of_edges() == 160


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_moves_change_only_the_detached_and_new_endpoint(small_ba, strategy):
    h, report = Rewiring.rewire(small_ba, RewireConfig(strategy=strategy, r_f=0.1, seed=5))

    current = small_ba.copy()
    for i, j, v in report.moves:
        before = GraphUtils.degrees(current)
        assert current.has_edge(i, j)
        assert not current.has_edge(i, v) and i != v
        current = RewireUtils.replay(current, [(i, j, v)])
        changes = RewireUtils.degree_changes(before, GraphUtils.degrees(current))
        assert changes == {j: -1, v: 1}

    assert GraphUtils.sorted_edges(current) == GraphUtils.sorted_edges(h)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_rewire_is_deterministic(small_ba, strategy):
    cfg = RewireConfig(strategy=strategy, r_f=0.05, seed=42)
    a, report_a = Rewiring.rewire(small_ba, cfg)
    b, report_b = Rewiring.rewire(small_ba, cfg)
    assert report_a.moves == report_b.moves
    assert report_a.rejections == report_b.rejections
    assert GraphUtils.sorted_edges(a) == GraphUtils.sorted_edges(b)


def test_different_seeds_differ(small_ba):
    _, a = Rewiring.rewire(small_ba, RewireConfig(strategy="dpa", r_f=0.1, seed=1))
    _, b = Rewiring.rewire(small_ba, RewireConfig(strategy="dpa", r_f=0.1, seed=2))
    assert a.moves != b.moves


def test_zero_fraction_and_none_strategy_return_copy(small_ba):
    for cfg in (RewireConfig(strategy="dpa", r_f=0.0, seed=1), RewireConfig(strategy="none", r_f=0.3, seed=1)):
        h, report = Rewiring.rewire(small_ba, cfg)
        assert h is not small_ba
        assert GraphUtils.sorted_edges(h) == GraphUtils.sorted_edges(small_ba)
        assert report.attempted == 0
        assert report.moves == []


def test_rewire_logs_every_move(small_ba, quiet_move_logs):
    _, report = Rewiring.rewire(small_ba, RewireConfig(strategy="dpa", r_f=0.05, seed=9))
    accepted = [m for _, m in quiet_move_logs.records if m.startswith("[accepted]")]
    rejected = [m for _, m in quiet_move_logs.records if not m.startswith("[accepted]")]
    assert len(accepted) == report.accepted
    assert len(rejected) == sum(report.rejections.values())


def test_report_row_columns(small_ba):
    _, report = Rewiring.rewire(small_ba, RewireConfig(strategy="dkbc", r_f=0.05, seed=9))
    row = report.to_row()
    assert row["strategy"] == "dkbc"
    assert row["accepted"] == report.accepted
    assert row["rejected_no_candidate"] == report.rejections[RejectReasons.NO_CANDIDATE]
    assert row["edges_after"] == 160


# ----- Rejections -----
def test_dpa_on_star_never_finds_assortative_edge(star4):
    h, report = Rewiring.rewire(star4, RewireConfig(strategy="dpa", r_f=0.5, seed=0))
    assert report.target == 2
    assert report.accepted == 0
    assert report.attempted == 10
    assert report.rejections[RejectReasons.CONDITION] == 10
    assert GraphUtils.sorted_edges(h) == GraphUtils.sorted_edges(star4)


def test_dkbc_on_single_shell_has_no_candidate(star4):
    _, report = Rewiring.rewire(star4, RewireConfig(strategy="dkbc", r_f=0.5, seed=0))
    assert report.accepted == 0
    assert report.rejections[RejectReasons.NO_CANDIDATE] == report.attempted == 10


def test_ckdbc_rejects_when_prod_reaches_one():
    g = nx.cycle_graph(6)
    scores = Rewiring.strategy_scores(g, "ckdbc")
    rng = np.random.default_rng(0)
    for _ in range(20):
        result = Rewiring.ckdbc_move(g, scores.cores_closeness, np.ones(6), scores, rng, max_attempts=10)
        assert not result.accepted
        assert result.reason == RejectReasons.CONDITION
    assert GraphUtils.sorted_edges(g) == GraphUtils.sorted_edges(nx.cycle_graph(6))


def test_ckdbc_runs_on_degenerate_closeness():
    g = nx.cycle_graph(8)
    h, report = Rewiring.rewire(g, RewireConfig(strategy="ckdbc", r_f=0.25, seed=4))
    assert h.number_of_edges() == 8
    assert nx.is_connected(h)


# ----- Attachment rule -----
def test_zeta_on_path(path4):
    scores = Rewiring.strategy_scores(path4, "dpa")
    np.testing.assert_allclose(scores.corr, [0.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(scores.zeta, [1.0, 0.0, 0.0, 1.0])
    np.testing.assert_allclose(Rewiring.dpa_weights(scores), [1.0, 0.0, 0.0, 1.0])


def test_zeta_is_a_fraction(small_ba):
    scores = Rewiring.strategy_scores(small_ba)
    assert np.all(scores.zeta >= 0)
    assert np.all(scores.zeta <= 1.0 + 1e-12)
    assert np.all((scores.corr >= 0) & (scores.corr <= 2))
    assert scores.ec is not None and scores.bc is not None
    assert scores.cores_degree is not None and scores.cores_closeness is not None


def test_attachment_probabilities_exclude_neighbors(small_ba):
    scores = Rewiring.strategy_scores(small_ba, "dpa")
    probs = Rewiring.attachment_probabilities(small_ba, 0, Rewiring.dpa_weights(scores))
    assert probs[0] == 0
    assert all(probs[n] == 0 for n in small_ba.adj[0])
    assert probs.sum() == pytest.approx(1.0)


def test_dpa_draws_follow_attachment_weights(monkeypatch, small_ba):
    scores = Rewiring.strategy_scores(small_ba, "dpa")
    i, j = max(GraphUtils.sorted_edges(small_ba), key=lambda e: scores.pair(*e))
    assert scores.pair(i, j) > 0

    monkeypatch.setattr(RewireUtils, "pick_edge", staticmethod(lambda edges, rng: (i, j)))
    expected = Rewiring.attachment_probabilities(small_ba, i, Rewiring.dpa_weights(scores))

    rng = np.random.default_rng(2024)
    draws = 4000
    counts = Counter()
    for _ in range(draws):
        result = Rewiring.dpa_move(small_ba.copy(), scores, rng, require_connectivity=False)
        assert result.accepted
        counts[result.move[2]] += 1

    observed = np.array([counts[v] / draws for v in range(small_ba.number_of_nodes())])
    assert np.max(np.abs(observed - expected)) < 0.03
    assert all(counts[v] == 0 for v in np.flatnonzero(expected == 0))


# ----- Validation -----
def test_rewire_config_validation():
    with pytest.raises(ConfigurationError):
        RewireConfig(strategy="random", r_f=0.1)
    with pytest.raises(ConfigurationError):
        RewireConfig(strategy="dpa", r_f=1.5)
    with pytest.raises(ConfigurationError):
        RewireConfig(strategy="dpa", r_f=0.1, max_attempts=0)
    assert RewireConfig(strategy="DPA", r_f=0.1).strategy == "dpa"


def test_rewire_rejects_disconnected_and_looped_graphs():
    with pytest.raises(DisconnectedGraphError):
        Rewiring.rewire(nx.Graph([(0, 1), (2, 3)]), RewireConfig(strategy="dpa", r_f=0.5, seed=1))
    looped = nx.path_graph(4)
    looped.add_edge(2, 2)
    with pytest.raises(ConfigurationError):
        Rewiring.rewire(looped, RewireConfig(strategy="dpa", r_f=0.5, seed=1))


def test_target_moves_rounds_half_up():
    assert Rewiring.target_moves(0.05, 30) == 2
    assert Rewiring.target_moves(0.1, 160) == 16
    assert Rewiring.target_moves(0.0, 160) == 0


def test_dec_draws_follow_attachment_weights(monkeypatch, small_ba):
    scores = Rewiring.strategy_scores(small_ba, "dec")
    i, j = max(GraphUtils.sorted_edges(small_ba), key=lambda e: scores.pair(*e))
    assert scores.pair(i, j) > 0

    monkeypatch.setattr(RewireUtils, "pick_edge", staticmethod(lambda edges, rng: (i, j)))
    expected = Rewiring.attachment_probabilities(small_ba, i, Rewiring.dec_weights(scores, scores.ec))
    assert expected.sum() == pytest.approx(1.0)

    rng = np.random.default_rng(77)
    draws = 4000
    counts = Counter()
    for _ in range(draws):
        result = Rewiring.dec_move(small_ba.copy(), scores, scores.ec, rng, require_connectivity=False)
        assert result.accepted
        counts[result.move[2]] += 1

    observed = np.array([counts[v] / draws for v in range(small_ba.number_of_nodes())])
    assert np.max(np.abs(observed - expected)) < 0.03
    assert all(counts[v] == 0 for v in np.flatnonzero(expected == 0))


# ----- CKDBC with real betweenness -----
def _two_hubs():
    # hub 0 with leaves 1..10, bridge 11, hub 12 with leaves 13..22
    g = nx.Graph()
    g.add_edges_from((0, leaf) for leaf in range(1, 11))
    g.add_edges_from([(0, 11), (11, 12)])
    g.add_edges_from((12, leaf) for leaf in range(13, 23))
    return g


def test_ckdbc_prod_gates_removal_and_attachment():
    g = _two_hubs()
    scores = Rewiring.strategy_scores(g, "ckdbc")
    only_hub = np.zeros(g.number_of_nodes(), dtype=np.int64)
    only_hub[12] = 1
    inner = CorePartition(core_index=only_hub, main_core_index=1, basis="closeness", innermost_floor=1)

    prod = scores.prod(12)
    assert prod[0] >= 1.0
    assert np.all(prod[13:23] == 0.0)
    assert 0.0 < prod[11] < 1.0

    rng = np.random.default_rng(8)
    targets = Counter()
    for _ in range(300):
        result = Rewiring.ckdbc_move(g.copy(), inner, scores.bc, scores, rng, require_connectivity=False)
        assert result.accepted
        i, j, v = result.move
        assert (i, j) == (12, 11)
        assert prod[v] < 1.0
        targets[v] += 1

    assert targets[0] == 0
    assert set(targets) <= set(range(1, 11))


# ----- Long runs -----
def _move(strategy, g, scores, rng):
    if strategy == "dpa":
        return Rewiring.dpa_move(g, scores, rng)
    if strategy == "dec":
        return Rewiring.dec_move(g, scores, scores.ec, rng)
    if strategy == "dkbc":
        return Rewiring.dkbc_move(g, scores.cores_degree, scores.bc, rng)
    return Rewiring.ckdbc_move(g, scores.cores_closeness, scores.bc, scores, rng)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_thousand_moves_keep_the_graph_simple_and_connected(strategy):
    g = NetworkBuilder.generate_ba(250, 5, 2, seed=13)
    edges = g.number_of_edges()
    rng = np.random.default_rng(101)
    accepted = 0

    for step in range(1000):
        if step % 50 == 0:
            scores = Rewiring.strategy_scores(g, strategy)
        before_edges = GraphUtils.sorted_edges(g)
        before = GraphUtils.degrees(g)
        result = _move(strategy, g, scores, rng)

        if result.accepted:
            i, j, v = result.move
            assert RewireUtils.degree_changes(before, GraphUtils.degrees(g)) == {j: -1, v: 1}
            assert g.has_edge(i, v) and not g.has_edge(i, j)
            accepted += 1
        else:
            assert GraphUtils.sorted_edges(g) == before_edges
        assert g.number_of_edges() == edges
        assert nx.number_of_selfloops(g) == 0
        assert nx.is_connected(g)

    if strategy != "dkbc":
        assert accepted > 0


@pytest.fixture(scope="module")
def large_ba():
    g = NetworkBuilder.generate_ba(2000, 5, 2, seed=2000)
    return g, Centrality.compute_bundle(g)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_rewiring_keeps_the_degree_tail(large_ba, strategy):
    g, bundle = large_ba
    k_max = int(GraphUtils.degrees(g).max()) // 2
    original = GraphUtils.degree_tail_slope(GraphUtils.degrees(g), k_max=k_max)

    cfg = RewireConfig(strategy=strategy, r_f=0.15, seed=15, recompute_every=10_000)
    h, report = Rewiring.rewire(g, cfg, centr=bundle)
    rewired = GraphUtils.degree_tail_slope(GraphUtils.degrees(h), k_max=k_max)

    assert h.number_of_edges() == g.number_of_edges()
    assert abs(rewired - original) <= 0.5
