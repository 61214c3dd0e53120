# rewirecap/meso_structure.py

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import networkx as nx
import numpy as np
import pandas as pd

from rewirecap.config import OutputConfig
from rewirecap.centrality import Centrality
from rewirecap.exceptions import DegenerateCoreError, UndefinedCorrelationError
from rewirecap.graph_core import GraphUtils
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()

DEGREE_BASIS = "degree"
CLOSENESS_BASIS = "closeness"


@dataclass
class CorePartition:
    core_index: np.ndarray
    main_core_index: int
    basis: str
    interval: Optional[float] = None
    innermost_floor: Optional[int] = None

    def innermost(self) -> np.ndarray:
        """
        Nodes of the innermost core. For the degree basis this is the main
        core; for the closeness basis the top interval also absorbs the
        maximum-closeness node, whose raw index lands one above it.
        """
        floor = self.main_core_index if self.innermost_floor is None else self.innermost_floor
        return np.flatnonzero(self.core_index >= floor)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.core_index >= c)


@dataclass
class RichClubProfile:
    phi_k: Dict[int, float] = field(default_factory=dict)
    rc_scalar: float = 0.0


class MesoStructure:
    @staticmethod
    def kcore_degree(g: nx.Graph) -> CorePartition:
        if g.number_of_edges() < 1:
            raise ValueError("k-core decomposition needs at least one edge")
        core = np.zeros(g.number_of_nodes(), dtype=np.int64)
        for node, c in nx.core_number(g).items():
            core[node] = c
        main = int(core.max())
        return CorePartition(core_index=core, main_core_index=main, basis=DEGREE_BASIS, innermost_floor=main)

    @staticmethod
    def kcore_closeness(
        g: nx.Graph,
        closeness: Optional[np.ndarray] = None,
        degree_partition: Optional[CorePartition] = None,
    ) -> CorePartition:
        """
        Splits the closeness range into as many equal intervals as the main
        core order of the degree decomposition and indexes nodes by interval.

        Indices lie in [0, num_core]. Only the maximum-closeness node (and
        its ties) reaches num_core, so it still ranks above the top interval
        as in a star, while innermost() takes every node at num_core - 1 or
        above.
        """
        cc = Centrality.closeness(g) if closeness is None else np.asarray(closeness, dtype=float)
        num_core = (degree_partition or MesoStructure.kcore_degree(g)).main_core_index
        if num_core < 1:
            raise ValueError("Closeness cores need a degree main core of order at least 1")

        lo, hi = float(cc.min()), float(cc.max())
        interval = (hi - lo) / num_core
        if interval <= 0.0:
            fallback = CorePartition(
                core_index=np.zeros(len(cc), dtype=np.int64),
                main_core_index=0,
                basis=CLOSENESS_BASIS,
                interval=0.0,
                innermost_floor=0,
            )
            raise DegenerateCoreError("All nodes share one closeness value; single core", partition=fallback)

        index = np.floor((cc - lo) / interval).astype(np.int64)
        index = np.clip(index, 0, num_core)
        return CorePartition(
            core_index=index,
            main_core_index=num_core,
            basis=CLOSENESS_BASIS,
            interval=interval,
            innermost_floor=max(num_core - 1, 0),
        )

    @staticmethod
    def closeness_partition_or_fallback(
        g: nx.Graph,
        closeness: Optional[np.ndarray] = None,
        degree_partition: Optional[CorePartition] = None,
    ) -> CorePartition:
        try:
            return MesoStructure.kcore_closeness(g, closeness=closeness, degree_partition=degree_partition)
        except DegenerateCoreError as e:
            logger.debug(f"{e}; using the single-core fallback")
            return e.partition

    @staticmethod
    def rich_club_profile(g: nx.Graph) -> RichClubProfile:
        """
        Phi(k) for every distinct degree value with at least two nodes above
        it, and the scalar RC = (1/N) * sum over nodes of k_i * Phi(k_i)
        restricted to nodes whose Phi is defined.
        """
        if g.number_of_edges() < 1:
            raise ValueError("Rich-club profile needs at least one edge")
        coefficients = nx.rich_club_coefficient(g, normalized=False)
        degrees = GraphUtils.degrees(g)
        distinct = sorted(set(int(k) for k in degrees))
        phi = {k: float(coefficients[k]) for k in distinct if k in coefficients}

        n = g.number_of_nodes()
        total = sum(int(k) * phi[int(k)] for k in degrees if int(k) in phi)
        return RichClubProfile(phi_k=phi, rc_scalar=total / n)

    @staticmethod
    def default_core_set(g: nx.Graph, partition: Optional[CorePartition] = None) -> np.ndarray:
        """
        The degree main core. A main core spanning every node leaves the
        pattern constant, so the correlation is undefined.
        """
        part = partition or MesoStructure.kcore_degree(g)
        core = part.innermost()
        if len(core) == g.number_of_nodes():
            raise UndefinedCorrelationError(
                f"Main core (k={part.main_core_index}) spans all {len(core)} nodes; no periphery"
            )
        return core

    @staticmethod
    def core_periphery_coefficient(g: nx.Graph, core: Optional[Iterable[int]] = None) -> float:
        """
        Pearson correlation, over unordered node pairs, between adjacency and
        the ideal pattern "at least one endpoint in the core".
        """
        n = g.number_of_nodes()
        members = MesoStructure.default_core_set(g) if core is None else np.asarray(list(core), dtype=np.int64)
        in_core = np.zeros(n, dtype=bool)
        in_core[members] = True

        rows, cols = np.triu_indices(n, k=1)
        adjacency = nx.to_numpy_array(g, nodelist=list(range(n)))[rows, cols]
        pattern = (in_core[rows] | in_core[cols]).astype(float)

        if pattern.std() == 0.0 or adjacency.std() == 0.0:
            raise UndefinedCorrelationError("Core-periphery correlation undefined for a constant pattern")
        value = float(np.corrcoef(adjacency, pattern)[0, 1])
        if math.isnan(value):
            raise UndefinedCorrelationError("Core-periphery correlation evaluated to NaN")
        return value

    @staticmethod
    def core_frame(g: nx.Graph, degree_part: CorePartition, closeness_part: CorePartition) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "node": [GraphUtils.label(g, node) for node in range(g.number_of_nodes())],
                "core_degree": degree_part.core_index,
                "core_closeness": closeness_part.core_index,
            },
            columns=OutputConfig.CORE_COLUMNS,
        )

    @staticmethod
    def write_core_csv(g: nx.Graph, degree_part: CorePartition, closeness_part: CorePartition, path: str) -> str:
        return ResultStore.write_frame(MesoStructure.core_frame(g, degree_part, closeness_part), path)

    @staticmethod
    def write_profile_csv(profile: RichClubProfile, path: str) -> str:
        rows = [{"k": k, "phi_k": v} for k, v in sorted(profile.phi_k.items())]
        return ResultStore.write_rows(rows, OutputConfig.PROFILE_COLUMNS, path)
