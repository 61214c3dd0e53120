# rewirecap/utils/rewire_utils.py

from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from rewirecap.config import RejectReasons
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()
accepted_logger = LogManager.get_accepted_logger()
rejected_logger = LogManager.get_rejected_logger()

Move = Tuple[int, int, int]


class RewireUtils:
    @staticmethod
    def empty_histogram() -> Dict[str, int]:
        return {reason: 0 for reason in RejectReasons.all()}

    @staticmethod
    def pick_edge(edges: Sequence[Tuple[int, int]], rng: np.random.Generator) -> Tuple[int, int]:
        """
        Uniform edge with a uniformly chosen orientation; the first node is
        the end that keeps its degree.
        """
        u, v = edges[int(rng.integers(len(edges)))]
        return (u, v) if rng.random() < 0.5 else (v, u)

    @staticmethod
    def eligible_mask(g: nx.Graph, i: int) -> np.ndarray:
        """
        Nodes that i may attach to without creating a loop or a duplicate.
        """
        mask = np.ones(g.number_of_nodes(), dtype=bool)
        mask[i] = False
        for n in g.adj[i]:
            mask[n] = False
        return mask

    @staticmethod
    def weighted_choice(weights: np.ndarray, rng: np.random.Generator) -> Optional[int]:
        total = float(weights.sum())
        if total <= 0.0:
            return None
        return int(rng.choice(len(weights), p=weights / total))

    @staticmethod
    def apply_move(g: nx.Graph, i: int, j: int, v: int, require_connectivity: bool) -> bool:
        """
        Swaps edge {i,j} for {i,v}. Reverts and returns False when the swap
        disconnects the graph and connectivity is required.
        """
        g.remove_edge(i, j)
        g.add_edge(i, v)
        if require_connectivity and not nx.is_connected(g):
            g.remove_edge(i, v)
            g.add_edge(i, j)
            return False
        return True

    @staticmethod
    def log_accepted(strategy: str, step: int, move: Move) -> None:
        i, j, v = move
        accepted_logger.info(f"[accepted] {strategy} | step {step} | removed ({i},{j}) | added ({i},{v})")

    @staticmethod
    def log_rejected(strategy: str, step: int, reason: str, edge: Optional[Tuple[int, int]] = None) -> None:
        where = f" | edge ({edge[0]},{edge[1]})" if edge else ""
        rejected_logger.info(f"[{reason}] {strategy} | step {step}{where}")

    @staticmethod
    def log_summary(strategy: str, accepted: int, target: int, histogram: Dict[str, int]) -> None:
        summary = ", ".join(f"{k}: {v}" for k, v in histogram.items())
        logger.info(f"Rewired {strategy}: {accepted}/{target} moves accepted; rejections {summary}")

    @staticmethod
    def degree_changes(before: np.ndarray, after: np.ndarray) -> Dict[int, int]:
        delta = after - before
        return {int(node): int(delta[node]) for node in np.flatnonzero(delta)}

    @staticmethod
    def replay(g: nx.Graph, moves: List[Move]) -> nx.Graph:
        """
        Applies recorded (i, j, v) moves to a copy of g.
        """
        h = g.copy()
        for i, j, v in moves:
            h.remove_edge(i, j)
            h.add_edge(i, v)
        return h
