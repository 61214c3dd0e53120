# rewirecap/metrics.py

from dataclasses import asdict, dataclass
from typing import Dict, Optional

import networkx as nx

from rewirecap.config import OutputConfig, TrafficDefaults
from rewirecap.centrality import Centrality, CentralityBundle
from rewirecap.exceptions import DisconnectedGraphError, UndefinedCorrelationError, ZeroBetweennessError
from rewirecap.meso_structure import MesoStructure
from rewirecap.traffic import Traffic
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()


@dataclass
class MetricsRow:
    """
    Topological and traffic measures of one network. Quantities that are
    undefined for the graph at hand (r_deg on a regular graph, CP when every
    node sits in the core, lambda_c without betweenness) are None.
    """
    g_max: float
    lambda_c: Optional[float]
    r_deg: Optional[float]
    avg_clustering: float
    anc: float
    apl: float
    anb: float
    rc: float
    cp: Optional[float]
    u_max: Optional[float]
    free_flow_lambda: float

    def as_dict(self) -> Dict[str, Optional[float]]:
        values = asdict(self)
        return {column: values[column] for column in OutputConfig.METRIC_COLUMNS}


class Metrics:
    @staticmethod
    def compute_metrics(
        g: nx.Graph,
        beta: float = TrafficDefaults.BETA,
        centr: Optional[CentralityBundle] = None,
    ) -> MetricsRow:
        if g.number_of_nodes() < 3 or not nx.is_connected(g):
            raise DisconnectedGraphError("metrics")

        bundle = centr or Centrality.compute_bundle(g)
        cores = MesoStructure.kcore_degree(g)
        avg_path = Traffic.average_path_length(g)
        capacity = Traffic.allocate_capacity(g, bundle, beta)
        unit_inflow = Traffic.expected_inflow(g, bundle, 1.0, avg_path=avg_path)

        try:
            lambda_c = Traffic.critical_rate(g, bundle, capacity)
        except ZeroBetweennessError as e:
            logger.debug(f"lambda_c left empty: {e}")
            lambda_c = None

        try:
            u_max = Traffic.node_utilization(g, bundle).u_max
        except ZeroBetweennessError:
            u_max = None

        try:
            cp = MesoStructure.core_periphery_coefficient(g)
        except UndefinedCorrelationError as e:
            logger.debug(f"CP left empty: {e}")
            cp = None

        return MetricsRow(
            g_max=bundle.g_max,
            lambda_c=lambda_c,
            r_deg=bundle.r_deg,
            avg_clustering=float(nx.average_clustering(g)),
            anc=float(cores.core_index.mean()),
            apl=avg_path,
            anb=float(bundle.bc.mean()),
            rc=MesoStructure.rich_club_profile(g).rc_scalar,
            cp=cp,
            u_max=u_max,
            free_flow_lambda=Traffic.free_flow_threshold(capacity, unit_inflow),
        )
