# rewirecap/centrality.py

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd

from rewirecap.config import CentralityConfig, OutputConfig
from rewirecap.exceptions import (
    ConvergenceError,
    DisconnectedGraphError,
    UndefinedCorrelationError,
)
from rewirecap.graph_core import GraphUtils
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()

ArrayLike = Union[float, np.ndarray]


@dataclass
class EdgeCorrelation:
    """
    Remaining-degree statistics over the 2|E| ordered edge endpoints.
    mu_q and sigma_q2 are the mean and variance of the excess degree
    distribution.
    """
    mu_q: float
    sigma_q2: float
    r_deg: Optional[float]

    @property
    def defined(self) -> bool:
        return self.sigma_q2 > CentralityConfig.VARIANCE_EPSILON

    def score(self, k_i: ArrayLike, k_j: ArrayLike, clamp: bool = True) -> ArrayLike:
        """
        Per-pair contribution to the degree correlation for nodes of degree
        k_i and k_j. Positive when both remaining degrees sit on the same side
        of mu_q.
        """
        if not self.defined:
            raise UndefinedCorrelationError("Excess degree variance is zero; pair correlation is undefined")
        dev_i = np.asarray(k_i, dtype=float) - 1.0 - self.mu_q
        dev_j = np.asarray(k_j, dtype=float) - 1.0 - self.mu_q
        value = dev_i * dev_j / self.sigma_q2
        if clamp:
            value = np.clip(value, -1.0, 1.0)
        return float(value) if np.ndim(value) == 0 else value


@dataclass
class CentralityBundle:
    bc_raw: np.ndarray
    bc: np.ndarray
    cc: np.ndarray
    ec: np.ndarray
    kappa: float
    correlation: EdgeCorrelation

    @property
    def r_deg(self) -> Optional[float]:
        return self.correlation.r_deg

    @property
    def g_max(self) -> float:
        return float(self.bc.max())

    @property
    def max_bc_node(self) -> int:
        # argmax returns the lowest index among ties
        return int(np.argmax(self.bc_raw))


class Centrality:
    @staticmethod
    def _require_connected(g: nx.Graph, operation: str, min_nodes: int) -> None:
        if g.number_of_nodes() < min_nodes:
            raise DisconnectedGraphError(f"{operation} (needs at least {min_nodes} nodes)")
        if not nx.is_connected(g):
            raise DisconnectedGraphError(operation)

    @staticmethod
    def _as_array(g: nx.Graph, values: dict) -> np.ndarray:
        out = np.zeros(g.number_of_nodes(), dtype=float)
        for node, value in values.items():
            out[node] = value
        return out

    @staticmethod
    def betweenness(g: nx.Graph) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns (raw, normalized) betweenness. Raw values count each unordered
        source/destination pair once; normalized values divide by
        (N-1)(N-2)/2.
        """
        Centrality._require_connected(g, "betweenness", 3)
        n = g.number_of_nodes()
        raw = Centrality._as_array(g, nx.betweenness_centrality(g, normalized=False))
        pairs = (n - 1) * (n - 2) / 2.0
        return raw, raw / pairs

    @staticmethod
    def closeness(g: nx.Graph) -> np.ndarray:
        Centrality._require_connected(g, "closeness", 2)
        return Centrality._as_array(g, nx.closeness_centrality(g))

    @staticmethod
    def eigenvector_centrality(
        g: nx.Graph,
        tol: float = CentralityConfig.EC_TOLERANCE,
        max_iter: int = CentralityConfig.EC_MAX_ITER,
        start: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, float]:
        """
        Power iteration on A + I. Returns the max-normalized principal
        eigenvector and its eigenvalue kappa; stops once ||Ax - kappa x||_inf <= tol.
        """
        Centrality._require_connected(g, "eigenvector centrality", 1)
        n = g.number_of_nodes()
        adjacency = nx.to_scipy_sparse_array(g, nodelist=list(range(n)), dtype=float, format="csr")

        x = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
        if x.shape != (n,) or np.any(x <= 0):
            raise ValueError("Power iteration start vector must be strictly positive with one entry per node")
        x /= x.max()

        residual = float("inf")
        for iteration in range(1, max_iter + 1):
            y = adjacency @ x
            kappa = float(x @ y / (x @ x))
            residual = float(np.max(np.abs(y - kappa * x)))
            if residual <= tol:
                logger.debug(f"EC converged in {iteration} iterations (kappa={kappa:.6f})")
                return x, kappa
            x = y + x
            x /= x.max()

        raise ConvergenceError(residual, max_iter)

    @staticmethod
    def edge_correlation(g: nx.Graph) -> EdgeCorrelation:
        edges = np.asarray(GraphUtils.sorted_edges(g), dtype=np.int64).reshape(-1, 2)
        if len(edges) == 0:
            raise UndefinedCorrelationError("Degree correlation needs at least one edge")
        remaining = GraphUtils.degrees(g).astype(float) - 1.0
        a, b = remaining[edges[:, 0]], remaining[edges[:, 1]]
        x = np.concatenate([a, b])
        y = np.concatenate([b, a])

        mu = float(x.mean())
        var = float(x.var())
        r_deg = None
        if len(edges) >= 2 and var > CentralityConfig.VARIANCE_EPSILON:
            r_deg = float(np.clip(np.mean((x - mu) * (y - mu)) / var, -1.0, 1.0))
        return EdgeCorrelation(mu_q=mu, sigma_q2=var, r_deg=r_deg)

    @staticmethod
    def assortativity(g: nx.Graph) -> float:
        """
        Pearson correlation of remaining degrees over ordered edge endpoints.
        """
        if g.number_of_edges() < 2:
            raise UndefinedCorrelationError("Assortativity needs at least two edges")
        corr = Centrality.edge_correlation(g)
        if corr.r_deg is None:
            raise UndefinedCorrelationError("Excess degree variance is zero (regular graph)")
        return corr.r_deg

    @staticmethod
    def pair_correlation(
        g: nx.Graph,
        i: int,
        j: int,
        clamp: bool = True,
        correlation: Optional[EdgeCorrelation] = None,
    ) -> float:
        corr = correlation or Centrality.edge_correlation(g)
        return corr.score(g.degree(i), g.degree(j), clamp=clamp)

    @staticmethod
    def scale_correlation(x: ArrayLike) -> ArrayLike:
        """
        Shifts a correlation from [-1, 1] onto [0, 2].
        """
        values = np.asarray(x, dtype=float)
        eps = CentralityConfig.RANGE_EPSILON
        if np.any(values < -1.0 - eps) or np.any(values > 1.0 + eps):
            raise ValueError(f"Correlation outside [-1, 1]: {x}")
        shifted = np.clip(values, -1.0, 1.0) + 1.0
        return float(shifted) if np.ndim(shifted) == 0 else shifted

    @staticmethod
    def compute_bundle(
        g: nx.Graph,
        tol: float = CentralityConfig.EC_TOLERANCE,
        max_iter: int = CentralityConfig.EC_MAX_ITER,
    ) -> CentralityBundle:
        bc_raw, bc = Centrality.betweenness(g)
        cc = Centrality.closeness(g)
        ec, kappa = Centrality.eigenvector_centrality(g, tol=tol, max_iter=max_iter)
        correlation = Centrality.edge_correlation(g)
        if correlation.r_deg is None:
            logger.debug("Degree correlation undefined for this graph; r_deg left empty")
        return CentralityBundle(bc_raw=bc_raw, bc=bc, cc=cc, ec=ec, kappa=kappa, correlation=correlation)

    @staticmethod
    def centrality_frame(g: nx.Graph, bundle: CentralityBundle) -> pd.DataFrame:
        degrees = GraphUtils.degrees(g)
        return pd.DataFrame(
            {
                "node": [GraphUtils.label(g, node) for node in range(g.number_of_nodes())],
                "degree": degrees,
                "bc_raw": bundle.bc_raw,
                "bc_norm": bundle.bc,
                "cc": bundle.cc,
                "ec": bundle.ec,
            },
            columns=OutputConfig.CENTRALITY_COLUMNS,
        )

    @staticmethod
    def write_centrality_csv(g: nx.Graph, bundle: CentralityBundle, path: str) -> str:
        return ResultStore.write_frame(Centrality.centrality_frame(g, bundle), path)
