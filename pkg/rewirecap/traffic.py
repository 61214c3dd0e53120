# rewirecap/traffic.py

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from rewirecap.config import OutputConfig, TrafficDefaults
from rewirecap.centrality import CentralityBundle
from rewirecap.exceptions import ConfigurationError, DisconnectedGraphError, ZeroBetweennessError
from rewirecap.graph_core import GraphUtils
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()


@dataclass
class TrafficParams:
    beta: float = TrafficDefaults.BETA
    lam: float = 0.0
    horizon: int = TrafficDefaults.HORIZON

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        if self.lam < 0:
            raise ConfigurationError(f"lambda must be non-negative, got {self.lam}")
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be at least 1, got {self.horizon}")


@dataclass
class TrafficState:
    capacity: np.ndarray
    inflow: np.ndarray
    queue: np.ndarray
    avg_path: float
    lambda_c: float
    trace: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def total_load(self) -> float:
        return float(self.queue.sum())


@dataclass
class UtilizationProfile:
    u: np.ndarray
    u_k: Dict[int, float]

    @property
    def u_max(self) -> float:
        return max(self.u_k.values()) if self.u_k else 0.0


class Traffic:
    @staticmethod
    def allocate_capacity(g: nx.Graph, centr: CentralityBundle, beta: float) -> np.ndarray:
        """
        C_i = beta * (x_i + g_i) * N with x max-normalized EC and g normalized BC.
        """
        if not beta > 0:
            raise ConfigurationError(f"beta must be positive, got {beta}")
        return beta * (centr.ec + centr.bc) * g.number_of_nodes()

    @staticmethod
    def average_path_length(g: nx.Graph) -> float:
        if g.number_of_nodes() < 2 or not nx.is_connected(g):
            raise DisconnectedGraphError("average path length")
        return float(nx.average_shortest_path_length(g))

    @staticmethod
    def expected_inflow(
        g: nx.Graph,
        centr: CentralityBundle,
        lam: float,
        avg_path: Optional[float] = None,
    ) -> np.ndarray:
        """
        Q_i = lambda * D * N * g_i / sum(g). When no node carries betweenness
        the same total is spread evenly.
        """
        if lam < 0:
            raise ConfigurationError(f"lambda must be non-negative, got {lam}")
        n = g.number_of_nodes()
        d = Traffic.average_path_length(g) if avg_path is None else avg_path
        total = float(centr.bc.sum())
        if total <= 0.0:
            return np.full(n, lam * d)
        return lam * d * n * centr.bc / total

    @staticmethod
    def critical_rate(g: nx.Graph, centr: CentralityBundle, capacities: np.ndarray) -> float:
        """
        lambda_c = C(i*) (N - 1) / B(i*) where i* carries the largest raw
        betweenness.
        """
        hub = centr.max_bc_node
        b = float(centr.bc_raw[hub])
        if b <= 0.0:
            raise ZeroBetweennessError("Critical rate undefined: the busiest node carries no shortest paths")
        return float(capacities[hub]) * (g.number_of_nodes() - 1) / b

    @staticmethod
    def analytic_load(params: TrafficParams, capacity: np.ndarray, inflow: np.ndarray) -> np.ndarray:
        """
        Total queue L^t for t = 1..T under the per-node ledger
        L_i <- max(0, L_i + Q_i - C_i), starting empty.
        """
        trace, _ = Traffic.analytic_queues(params, capacity, inflow)
        return trace

    @staticmethod
    def analytic_queues(
        params: TrafficParams, capacity: np.ndarray, inflow: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        capacity = np.asarray(capacity, dtype=float)
        inflow = np.asarray(inflow, dtype=float)
        queue = np.zeros_like(capacity)
        trace = np.zeros(params.horizon)
        for t in range(params.horizon):
            queue = np.maximum(0.0, queue + inflow - capacity)
            trace[t] = queue.sum()
        return trace, queue

    @staticmethod
    def free_flow_threshold(capacity: np.ndarray, unit_inflow: np.ndarray) -> float:
        """
        Largest lambda at which every node still serves its inflow, given
        inflow at lambda = 1. Infinite when no node receives traffic.
        """
        unit_inflow = np.asarray(unit_inflow, dtype=float)
        busy = unit_inflow > 0
        if not busy.any():
            return float("inf")
        return float(np.min(np.asarray(capacity, dtype=float)[busy] / unit_inflow[busy]))

    @staticmethod
    def network_capacity(capacity: np.ndarray) -> float:
        return float(np.sum(capacity))

    @staticmethod
    def network_load(inflow: np.ndarray) -> float:
        return float(np.sum(inflow))

    @staticmethod
    def node_utilization(g: nx.Graph, centr: CentralityBundle) -> UtilizationProfile:
        """
        u_i = g_i / sum(g); U_k averages u_i over the nodes of degree k.
        """
        total = float(centr.bc.sum())
        if total <= 0.0:
            raise ZeroBetweennessError("Node utilization undefined: no node carries shortest paths")
        u = centr.bc / total
        degrees = GraphUtils.degrees(g)
        u_k = {
            int(k): float(u[degrees == k].mean())
            for k in np.unique(degrees)
        }
        return UtilizationProfile(u=u, u_k=u_k)

    @staticmethod
    def evaluate(g: nx.Graph, centr: CentralityBundle, params: TrafficParams) -> TrafficState:
        avg_path = Traffic.average_path_length(g)
        capacity = Traffic.allocate_capacity(g, centr, params.beta)
        inflow = Traffic.expected_inflow(g, centr, params.lam, avg_path=avg_path)
        trace, queue = Traffic.analytic_queues(params, capacity, inflow)
        state = TrafficState(
            capacity=capacity,
            inflow=inflow,
            queue=queue,
            avg_path=avg_path,
            lambda_c=Traffic.critical_rate(g, centr, capacity),
            trace=trace,
        )
        logger.debug(
            f"Traffic beta={params.beta} lambda={params.lam}: L(T)={state.total_load:.3f}, "
            f"lambda_c={state.lambda_c:.4f}"
        )
        return state

    @staticmethod
    def node_traffic_frame(g: nx.Graph, capacity: np.ndarray, inflow: np.ndarray, u: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "node": [GraphUtils.label(g, node) for node in range(g.number_of_nodes())],
                "degree": GraphUtils.degrees(g),
                "C_i": capacity,
                "Q_i": inflow,
                "u_i": u,
            },
            columns=OutputConfig.NODE_TRAFFIC_COLUMNS,
        )

    @staticmethod
    def write_node_traffic_csv(
        g: nx.Graph, capacity: np.ndarray, inflow: np.ndarray, u: np.ndarray, path: str
    ) -> str:
        return ResultStore.write_frame(Traffic.node_traffic_frame(g, capacity, inflow, u), path)
