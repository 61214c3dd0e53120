# rewirecap/rewiring.py

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from rewirecap.config import OutputConfig, RejectReasons, RewireDefaults
from rewirecap.centrality import Centrality, CentralityBundle, EdgeCorrelation
from rewirecap.exceptions import ConfigurationError, DisconnectedGraphError
from rewirecap.graph_core import GraphUtils
from rewirecap.meso_structure import CorePartition, MesoStructure
from rewirecap.utils.log_manager import LogManager
from rewirecap.utils.rewire_utils import Move, RewireUtils

logger = LogManager.setup_main_logger()


@dataclass
class RewireConfig:
    strategy: str
    r_f: float
    seed: Optional[int] = None
    max_attempts: int = RewireDefaults.MAX_ATTEMPTS
    require_connectivity: bool = True
    recompute_every: int = RewireDefaults.RECOMPUTE_EVERY

    def __post_init__(self):
        self.strategy = self.strategy.lower()
        valid = RewireDefaults.STRATEGIES + (RewireDefaults.NO_STRATEGY,)
        if self.strategy not in valid:
            raise ConfigurationError(f"Unknown strategy {self.strategy!r}; expected one of {', '.join(valid)}")
        if not 0.0 <= self.r_f <= 1.0:
            raise ConfigurationError(f"r_f must lie in [0, 1], got {self.r_f}")
        if self.max_attempts < 1:
            raise ConfigurationError(f"max_attempts must be at least 1, got {self.max_attempts}")
        if self.recompute_every < 1:
            raise ConfigurationError(f"recompute_every must be at least 1, got {self.recompute_every}")


@dataclass
class RewireReport:
    strategy: str
    r_f: float
    seed: Optional[int]
    target: int = 0
    attempted: int = 0
    accepted: int = 0
    rejections: Dict[str, int] = field(default_factory=RewireUtils.empty_histogram)
    edges_before: int = 0
    edges_after: int = 0
    moves: List[Move] = field(default_factory=list)

    def to_row(self) -> Dict[str, object]:
        row = {
            "strategy": self.strategy,
            "r_f": self.r_f,
            "seed": self.seed,
            "attempted": self.attempted,
            "accepted": self.accepted,
            "edges_before": self.edges_before,
            "edges_after": self.edges_after,
        }
        for reason, count in self.rejections.items():
            row[f"rejected_{reason}"] = count
        return {column: row.get(column) for column in OutputConfig.REPORT_COLUMNS}


@dataclass
class MoveResult:
    move: Optional[Move] = None
    reason: Optional[str] = None
    edge: Optional[Tuple[int, int]] = None

    @property
    def accepted(self) -> bool:
        return self.move is not None


@dataclass
class StrategyScores:
    """
    Per-node inputs of the attachment rules. Pair scores live on [-1, 1];
    corr and zeta are built from the same scores shifted onto [0, 2].
    """
    degrees: np.ndarray
    correlation: EdgeCorrelation
    corr: np.ndarray
    zeta: np.ndarray
    ec: Optional[np.ndarray] = None
    bc: Optional[np.ndarray] = None
    cores_degree: Optional[CorePartition] = None
    cores_closeness: Optional[CorePartition] = None

    def pair(self, i: int, j: int) -> float:
        if not self.correlation.defined:
            return 0.0
        return self.correlation.score(self.degrees[i], self.degrees[j])

    def pair_row(self, i: int) -> np.ndarray:
        if not self.correlation.defined:
            return np.zeros(len(self.degrees))
        return self.correlation.score(self.degrees[i], self.degrees)

    def prod(self, i: int) -> np.ndarray:
        """
        (r(i,n) + 1) * g(n) for every node n.
        """
        if self.bc is None:
            raise ValueError("prod needs betweenness in the strategy scores")
        return Centrality.scale_correlation(self.pair_row(i)) * self.bc


class Rewiring:
    @staticmethod
    def strategy_scores(
        g: nx.Graph,
        strategy: Optional[str] = None,
        centr: Optional[CentralityBundle] = None,
    ) -> StrategyScores:
        """
        Computes zeta and corr for every node plus whatever the given strategy
        reads (EC for dec, degree cores and BC for dkbc, closeness cores and
        BC for ckdbc). strategy=None fills in everything.
        """
        degrees = GraphUtils.degrees(g)
        correlation = centr.correlation if centr is not None else Centrality.edge_correlation(g)
        corr, zeta = Rewiring._disassortativeness(g, degrees, correlation)
        scores = StrategyScores(degrees=degrees, correlation=correlation, corr=corr, zeta=zeta)

        wants = set(RewireDefaults.STRATEGIES) if strategy is None else {strategy}
        if "dec" in wants:
            scores.ec = centr.ec if centr is not None else Centrality.eigenvector_centrality(g)[0]
        if wants & {"dkbc", "ckdbc"}:
            scores.bc = centr.bc if centr is not None else Centrality.betweenness(g)[1]
            scores.cores_degree = MesoStructure.kcore_degree(g)
        if "ckdbc" in wants:
            closeness = centr.cc if centr is not None else None
            scores.cores_closeness = MesoStructure.closeness_partition_or_fallback(
                g, closeness=closeness, degree_partition=scores.cores_degree
            )
        return scores

    @staticmethod
    def _disassortativeness(
        g: nx.Graph, degrees: np.ndarray, correlation: EdgeCorrelation
    ) -> Tuple[np.ndarray, np.ndarray]:
        n = g.number_of_nodes()
        edges = np.asarray(GraphUtils.sorted_edges(g), dtype=np.int64).reshape(-1, 2)
        a, b = edges[:, 0], edges[:, 1]
        if correlation.defined:
            shifted = Centrality.scale_correlation(correlation.score(degrees[a], degrees[b]))
        else:
            shifted = np.ones(len(edges))

        corr = np.full(n, np.inf)
        np.minimum.at(corr, a, shifted)
        np.minimum.at(corr, b, shifted)
        total = np.zeros(n)
        np.add.at(total, a, shifted)
        np.add.at(total, b, shifted)

        corr[np.isinf(corr)] = 0.0
        zeta = np.zeros(n)
        positive = total > 0
        zeta[positive] = corr[positive] / total[positive]
        # every neighbor score is zero: all neighbors are equally disassortative
        flat = ~positive & (degrees > 0)
        zeta[flat] = 1.0 / degrees[flat]
        return corr, zeta

    @staticmethod
    def dpa_weights(scores: StrategyScores) -> np.ndarray:
        return scores.degrees * scores.zeta

    @staticmethod
    def dec_weights(scores: StrategyScores, ec: np.ndarray) -> np.ndarray:
        return np.clip(1.0 - np.asarray(ec, dtype=float), 0.0, None) * scores.zeta

    @staticmethod
    def attachment_probabilities(g: nx.Graph, i: int, weights: np.ndarray) -> np.ndarray:
        """
        Normalized attachment distribution for node i; zero outside the
        eligible set. All zeros when nothing eligible carries weight.
        """
        masked = np.where(RewireUtils.eligible_mask(g, i), weights, 0.0)
        total = masked.sum()
        return masked / total if total > 0 else masked

    @staticmethod
    def _assortative_move(
        g: nx.Graph,
        scores: StrategyScores,
        weights: np.ndarray,
        rng: np.random.Generator,
        max_attempts: int,
        require_connectivity: bool,
    ) -> MoveResult:
        edges = GraphUtils.sorted_edges(g)
        result = MoveResult(reason=RejectReasons.NO_CANDIDATE)
        if not edges:
            return result

        for _ in range(max_attempts):
            i, j = RewireUtils.pick_edge(edges, rng)
            result.edge = (i, j)
            if scores.pair(i, j) <= 0.0:
                result.reason = RejectReasons.CONDITION
                continue

            probs = Rewiring.attachment_probabilities(g, i, weights)
            if not probs.any():
                result.reason = RejectReasons.NO_CANDIDATE
                continue
            v = int(rng.choice(len(probs), p=probs))

            if RewireUtils.apply_move(g, i, j, v, require_connectivity):
                return MoveResult(move=(i, j, v), edge=(i, j))
            result.reason = RejectReasons.DISCONNECT
        return result

    @staticmethod
    def dpa_move(
        g: nx.Graph,
        scores: StrategyScores,
        rng: np.random.Generator,
        max_attempts: int = RewireDefaults.MAX_ATTEMPTS,
        require_connectivity: bool = True,
    ) -> MoveResult:
        """
        Removes an assortative edge {i,j} and reattaches i preferentially to
        high-degree, disassortative nodes (weight k_v * zeta_v).
        """
        weights = Rewiring.dpa_weights(scores)
        return Rewiring._assortative_move(g, scores, weights, rng, max_attempts, require_connectivity)

    @staticmethod
    def dec_move(
        g: nx.Graph,
        scores: StrategyScores,
        ec: np.ndarray,
        rng: np.random.Generator,
        max_attempts: int = RewireDefaults.MAX_ATTEMPTS,
        require_connectivity: bool = True,
    ) -> MoveResult:
        """
        Same removal rule as dpa_move; attachment weight (1 - x_v) * zeta_v
        favours nodes with low eigenvector centrality.
        """
        weights = Rewiring.dec_weights(scores, ec)
        return Rewiring._assortative_move(g, scores, weights, rng, max_attempts, require_connectivity)

    @staticmethod
    def dkbc_move(
        g: nx.Graph,
        cores_degree: CorePartition,
        bc: np.ndarray,
        rng: np.random.Generator,
        max_attempts: int = RewireDefaults.MAX_ATTEMPTS,
        require_connectivity: bool = True,
    ) -> MoveResult:
        edges = GraphUtils.sorted_edges(g)
        if not edges:
            return MoveResult(reason=RejectReasons.NO_CANDIDATE)

        i, j = RewireUtils.pick_edge(edges, rng)
        core = cores_degree.core_index
        candidates = RewireUtils.eligible_mask(g, i) & (core > core[i]) & (bc < bc[i])
        if not candidates.any():
            return MoveResult(reason=RejectReasons.NO_CANDIDATE, edge=(i, j))

        n = g.number_of_nodes()
        for _ in range(max_attempts):
            v = int(rng.integers(n))
            if not candidates[v]:
                continue
            if RewireUtils.apply_move(g, i, j, v, require_connectivity):
                return MoveResult(move=(i, j, v), edge=(i, j))
            return MoveResult(reason=RejectReasons.DISCONNECT, edge=(i, j))
        return MoveResult(reason=RejectReasons.CONDITION, edge=(i, j))

    @staticmethod
    def ckdbc_move(
        g: nx.Graph,
        cores_closeness: CorePartition,
        bc: np.ndarray,
        scores: StrategyScores,
        rng: np.random.Generator,
        max_attempts: int = RewireDefaults.MAX_ATTEMPTS,
        require_connectivity: bool = True,
    ) -> MoveResult:
        """
        Takes a node i from the innermost closeness core, drops one of its
        links chosen by prod(n) = (r(i,n) + 1) * g(n), and hands the free end
        to a uniformly drawn node v accepted when prod(v) < U(0,1).
        """
        inner = cores_closeness.innermost()
        i = int(inner[int(rng.integers(len(inner)))])
        neighbors = np.asarray(sorted(g.adj[i]), dtype=np.int64)
        if len(neighbors) == 0:
            return MoveResult(reason=RejectReasons.NO_CANDIDATE)

        prod = Centrality.scale_correlation(scores.pair_row(i)) * np.asarray(bc, dtype=float)
        picked = RewireUtils.weighted_choice(prod[neighbors], rng)
        j = int(neighbors[picked if picked is not None else int(rng.integers(len(neighbors)))])

        candidates = np.flatnonzero(RewireUtils.eligible_mask(g, i))
        if len(candidates) == 0:
            return MoveResult(reason=RejectReasons.NO_CANDIDATE, edge=(i, j))

        for _ in range(max_attempts):
            v = int(candidates[int(rng.integers(len(candidates)))])
            if not prod[v] < rng.random():
                continue
            if RewireUtils.apply_move(g, i, j, v, require_connectivity):
                return MoveResult(move=(i, j, v), edge=(i, j))
            return MoveResult(reason=RejectReasons.DISCONNECT, edge=(i, j))
        return MoveResult(reason=RejectReasons.CONDITION, edge=(i, j))

    @staticmethod
    def _move_function(cfg: RewireConfig) -> Callable[[nx.Graph, StrategyScores, np.random.Generator], MoveResult]:
        kwargs = {"max_attempts": cfg.max_attempts, "require_connectivity": cfg.require_connectivity}
        moves = {
            "dpa": lambda g, s, rng: Rewiring.dpa_move(g, s, rng, **kwargs),
            "dec": lambda g, s, rng: Rewiring.dec_move(g, s, s.ec, rng, **kwargs),
            "dkbc": lambda g, s, rng: Rewiring.dkbc_move(g, s.cores_degree, s.bc, rng, **kwargs),
            "ckdbc": lambda g, s, rng: Rewiring.ckdbc_move(g, s.cores_closeness, s.bc, s, rng, **kwargs),
        }
        return moves[cfg.strategy]

    @staticmethod
    def target_moves(r_f: float, edges: int) -> int:
        return int(math.floor(r_f * edges + 0.5))

    @staticmethod
    def rewire(
        g: nx.Graph,
        cfg: RewireConfig,
        centr: Optional[CentralityBundle] = None,
    ) -> Tuple[nx.Graph, RewireReport]:
        """
        Rewires a copy of g until round(r_f * |E|) moves are accepted or the
        move budget runs out. Scores are refreshed every cfg.recompute_every
        accepted moves; centr, when given, must describe g itself.
        """
        if nx.number_of_selfloops(g) > 0:
            raise ConfigurationError("Rewiring needs a simple graph without self-loops")
        if cfg.require_connectivity and not GraphUtils.is_connected(g):
            raise DisconnectedGraphError("rewire")

        h = GraphUtils.copy_graph(g)
        edges_before = GraphUtils.edge_count(h)
        report = RewireReport(
            strategy=cfg.strategy,
            r_f=cfg.r_f,
            seed=cfg.seed,
            target=Rewiring.target_moves(cfg.r_f, edges_before),
            edges_before=edges_before,
            edges_after=edges_before,
        )
        if cfg.strategy == RewireDefaults.NO_STRATEGY or report.target == 0:
            return h, report

        rng = np.random.default_rng(cfg.seed)
        move = Rewiring._move_function(cfg)
        scores = Rewiring.strategy_scores(h, cfg.strategy, centr)
        budget = report.target * RewireDefaults.MOVE_BUDGET_FACTOR
        since_refresh = 0

        while report.accepted < report.target and report.attempted < budget:
            report.attempted += 1
            result = move(h, scores, rng)
            if not result.accepted:
                report.rejections[result.reason] += 1
                RewireUtils.log_rejected(cfg.strategy, report.attempted, result.reason, result.edge)
                continue

            report.accepted += 1
            report.moves.append(result.move)
            RewireUtils.log_accepted(cfg.strategy, report.attempted, result.move)
            since_refresh += 1
            if since_refresh >= cfg.recompute_every and report.accepted < report.target:
                scores = Rewiring.strategy_scores(h, cfg.strategy)
                since_refresh = 0

        report.edges_after = GraphUtils.edge_count(h)
        RewireUtils.log_summary(cfg.strategy, report.accepted, report.target, report.rejections)
        if report.accepted < report.target:
            logger.warning(
                f"{cfg.strategy}: move budget exhausted after {report.attempted} moves "
                f"({report.accepted}/{report.target} accepted)"
            )
        return h, report
