# tests/test_rewire_utils.py
import networkx as nx
import numpy as np

from rewirecap.config import RejectReasons
from rewirecap.graph_core import GraphUtils
from rewirecap.utils import rewire_utils
from rewirecap.utils.rewire_utils import RewireUtils


def test_empty_histogram_has_every_reason():
    assert RewireUtils.empty_histogram() == {r: 0 for r in RejectReasons.all()}


def test_pick_edge_covers_both_orientations():
    rng = np.random.default_rng(0)
    seen = {RewireUtils.pick_edge([(0, 1)], rng) for _ in range(50)}
    assert seen == {(0, 1), (1, 0)}


def test_eligible_mask_excludes_self_and_neighbors(star4):
    np.testing.assert_array_equal(RewireUtils.eligible_mask(star4, 1), [False, False, True, True, True])
    assert not RewireUtils.eligible_mask(star4, 0).any()


def test_weighted_choice():
    rng = np.random.default_rng(1)
    assert RewireUtils.weighted_choice(np.zeros(3), rng) is None
    assert RewireUtils.weighted_choice(np.array([0.0, 2.0, 0.0]), rng) == 1


def test_apply_move_keeps_connected_swap(path4):
    assert RewireUtils.apply_move(path4, 1, 2, 3, require_connectivity=True)
    assert GraphUtils.sorted_edges(path4) == [(0, 1), (1, 3), (2, 3)]


def test_apply_move_reverts_disconnecting_swap():
    g = nx.path_graph(5)
    # detaching 2 from 1 and hooking it to 4 strands {0, 1}
    assert not RewireUtils.apply_move(g, 2, 1, 4, require_connectivity=True)
    assert GraphUtils.sorted_edges(g) == GraphUtils.sorted_edges(nx.path_graph(5))

    assert RewireUtils.apply_move(g, 2, 1, 4, require_connectivity=False)
    assert not nx.is_connected(g)


def test_replay_and_degree_changes(path4):
    h = RewireUtils.replay(path4, [(1, 2, 3)])
    assert GraphUtils.sorted_edges(path4) == [(0, 1), (1, 2), (2, 3)]
    changes = RewireUtils.degree_changes(GraphUtils.degrees(path4), GraphUtils.degrees(h))
    assert changes == {2: -1, 3: 1}


def test_move_log_lines(monkeypatch, recording_logger):
    monkeypatch.setattr(rewire_utils, "accepted_logger", recording_logger)
    monkeypatch.setattr(rewire_utils, "rejected_logger", recording_logger)

    RewireUtils.log_accepted("dpa", 3, (1, 2, 5))
    RewireUtils.log_rejected("dkbc", 4, RejectReasons.NO_CANDIDATE, (0, 7))
    RewireUtils.log_rejected("ckdbc", 5, RejectReasons.CONDITION)

    assert recording_logger.messages("info") == [
        "[accepted] dpa | step 3 | removed (1,2) | added (1,5)",
        "[no_candidate] dkbc | step 4 | edge (0,7)",
        "[condition] ckdbc | step 5",
    ]
