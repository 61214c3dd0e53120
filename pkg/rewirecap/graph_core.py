# rewirecap/graph_core.py

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from rewirecap.config import GraphDefaults
from rewirecap.exceptions import ConfigurationError, DataError, NumericError
from rewirecap.utils.log_manager import LogManager
from rewirecap.utils.tempfile_utils import TempFileManager

logger = LogManager.setup_main_logger()


@dataclass
class DegreeDistribution:
    """
    Node degree distribution p_k and excess degree distribution q_k, both
    indexed by degree value (position k holds the probability of degree k).
    """
    p_k: np.ndarray
    q_k: np.ndarray
    mean_degree: float
    mean_excess: float
    variance_excess: float


@dataclass
class LoadReport:
    source: str
    lines_read: int = 0
    comment_lines: int = 0
    layers: List[str] = field(default_factory=list)
    self_loops_dropped: int = 0
    duplicates_merged: int = 0
    nodes_in_file: int = 0
    edges_in_file: int = 0
    nodes_kept: int = 0
    edges_kept: int = 0

    @property
    def component_filtered(self) -> bool:
        return self.nodes_kept < self.nodes_in_file


class NetworkBuilder:
    @staticmethod
    def generate_ba(n: int, m0: int, m: int, seed: Optional[int] = None) -> nx.Graph:
        """
        Barabasi-Albert growth from a complete seed graph on m0 nodes. Every
        arriving node attaches m distinct links, picking existing nodes with
        probability proportional to their degree.
        """
        if not (n > m0 >= m >= 1):
            raise ConfigurationError(f"BA sizes must satisfy N > m0 >= m >= 1, got N={n}, m0={m0}, m={m}")
        if m0 < 2:
            raise ConfigurationError("BA seed clique needs at least 2 nodes so the first arrival has a target")

        g = nx.barabasi_albert_graph(n, m, seed=seed, initial_graph=nx.complete_graph(m0))
        nx.set_node_attributes(g, {node: str(node) for node in g.nodes()}, "label")
        logger.debug(f"Generated BA graph N={n} m0={m0} m={m} seed={seed}: |E|={g.number_of_edges()}")
        return g

    @staticmethod
    def load_dataset(
        source: str,
        aggregate_layers: bool = True,
        layer: Optional[str] = None,
    ) -> Tuple[nx.Graph, LoadReport]:
        """
        Resolves a built-in dataset name or an edge-list path.
        """
        if source.lower() in GraphDefaults.BUILTIN_DATASETS:
            return NetworkBuilder._builtin(source.lower())
        return NetworkBuilder.load_edge_list(source, aggregate_layers=aggregate_layers, layer=layer)

    @staticmethod
    def _builtin(name: str) -> Tuple[nx.Graph, LoadReport]:
        raw = nx.karate_club_graph()
        g = nx.Graph()
        g.add_nodes_from((node, {"label": str(node)}) for node in sorted(raw.nodes()))
        g.add_edges_from(raw.edges())
        report = LoadReport(
            source=name,
            nodes_in_file=g.number_of_nodes(),
            edges_in_file=g.number_of_edges(),
            nodes_kept=g.number_of_nodes(),
            edges_kept=g.number_of_edges(),
        )
        return g, report

    @staticmethod
    def load_edge_list(
        path: str,
        aggregate_layers: bool = True,
        layer: Optional[str] = None,
    ) -> Tuple[nx.Graph, LoadReport]:
        """
        Reads `u v` or `layer u v` lines into a simple undirected graph over
        dense integer ids, keeping only the largest connected component.
        Original tokens survive as the `label` node attribute.
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                lines = f.readlines()
        except (OSError, UnicodeDecodeError) as e:
            raise DataError(f"Cannot read edge list {path}: {e}") from e

        report = LoadReport(source=path)
        index: Dict[str, int] = {}
        edges = set()
        layers_seen: Dict[str, None] = {}

        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            report.lines_read += 1
            if line.startswith(GraphDefaults.COMMENT_PREFIX):
                report.comment_lines += 1
                continue

            tokens = line.split()
            if len(tokens) == 2:
                line_layer, u, v = None, tokens[0], tokens[1]
            elif len(tokens) == 3:
                line_layer, u, v = tokens
                layers_seen.setdefault(line_layer, None)
            else:
                raise DataError(f"{path}:{lineno}: expected 2 or 3 tokens, got {len(tokens)}")

            if line_layer is not None and layer is not None and line_layer != layer:
                continue

            for token in (u, v):
                if token not in index:
                    index[token] = len(index)
            if u == v:
                report.self_loops_dropped += 1
                continue

            key = (min(index[u], index[v]), max(index[u], index[v]))
            if key in edges:
                report.duplicates_merged += 1
                continue
            edges.add(key)

        report.layers = list(layers_seen)
        if len(report.layers) > 1 and not aggregate_layers and layer is None:
            raise DataError(
                f"{path} holds {len(report.layers)} layers; enable aggregate_layers or select one layer"
            )
        if not edges:
            raise DataError(f"{path}: no edges after parsing")

        labels = {i: token for token, i in index.items()}
        g = nx.Graph()
        g.add_nodes_from((i, {"label": labels[i]}) for i in range(len(index)))
        g.add_edges_from(sorted(edges))
        report.nodes_in_file = g.number_of_nodes()
        report.edges_in_file = g.number_of_edges()

        g = GraphUtils.largest_component(g)
        report.nodes_kept = g.number_of_nodes()
        report.edges_kept = g.number_of_edges()

        if report.component_filtered:
            logger.warning(
                f"{path}: kept largest component with {report.nodes_kept}/{report.nodes_in_file} nodes"
            )
        logger.info(
            f"Loaded {path}: N={report.nodes_kept}, |E|={report.edges_kept}, "
            f"duplicates merged={report.duplicates_merged}, self-loops dropped={report.self_loops_dropped}"
        )
        return g, report

    @staticmethod
    def edge_list_text(g: nx.Graph) -> str:
        rows = []
        for u, v in g.edges():
            a, b = sorted((GraphUtils.label(g, u), GraphUtils.label(g, v)))
            rows.append(f"{a} {b}")
        rows.sort()
        return "".join(f"{row}\n" for row in rows)

    @staticmethod
    def write_edge_list(g: nx.Graph, path: str) -> str:
        """
        Writes the canonical edge list: endpoints sorted within a line, lines
        sorted lexicographically, original labels.
        """
        return TempFileManager.atomic_write_text(path, NetworkBuilder.edge_list_text(g))


class GraphUtils:
    @staticmethod
    def label(g: nx.Graph, node: int) -> str:
        return str(g.nodes[node].get("label", node))

    @staticmethod
    def relabel_dense(g: nx.Graph) -> nx.Graph:
        """
        Maps nodes onto 0..N-1 in ascending id order, carrying labels along.
        """
        mapping = {node: i for i, node in enumerate(sorted(g.nodes()))}
        h = nx.Graph()
        h.add_nodes_from((mapping[node], {"label": GraphUtils.label(g, node)}) for node in sorted(g.nodes()))
        h.add_edges_from((mapping[u], mapping[v]) for u, v in g.edges())
        return h

    @staticmethod
    def largest_component(g: nx.Graph) -> nx.Graph:
        if nx.is_connected(g):
            return g
        biggest = max(nx.connected_components(g), key=lambda c: (len(c), -min(c)))
        return GraphUtils.relabel_dense(g.subgraph(biggest))

    @staticmethod
    def copy_graph(g: nx.Graph) -> nx.Graph:
        return g.copy()

    @staticmethod
    def is_connected(g: nx.Graph) -> bool:
        if g.number_of_nodes() == 0:
            return False
        return nx.is_connected(g)

    @staticmethod
    def edge_count(g: nx.Graph) -> int:
        return g.number_of_edges()

    @staticmethod
    def degrees(g: nx.Graph) -> np.ndarray:
        """
        Degree sequence as an array indexed by node id (nodes must be 0..N-1).
        """
        n = g.number_of_nodes()
        out = np.zeros(n, dtype=np.int64)
        for node, k in g.degree():
            out[node] = k
        return out

    @staticmethod
    def sorted_edges(g: nx.Graph) -> List[Tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u, v in g.edges())

    @staticmethod
    def degree_distribution(g: nx.Graph) -> DegreeDistribution:
        if g.number_of_edges() < 1:
            raise DataError("Degree distribution needs at least one edge")

        counts = np.asarray(nx.degree_histogram(g), dtype=float)
        p_k = counts / counts.sum()
        ks = np.arange(len(p_k), dtype=float)
        mean_degree = float(np.dot(ks, p_k))

        q_k = ks[1:] * p_k[1:] / mean_degree
        excess = ks[:-1]
        mean_excess = float(np.dot(excess, q_k))
        variance = float(np.dot(excess ** 2, q_k) - mean_excess ** 2)

        return DegreeDistribution(
            p_k=p_k,
            q_k=q_k,
            mean_degree=mean_degree,
            mean_excess=mean_excess,
            variance_excess=max(variance, 0.0),
        )

    @staticmethod
    def degree_tail_slope(
        degrees: Iterable[int],
        k_min: int = GraphDefaults.TAIL_FIT_MIN_DEGREE,
        k_max: Optional[int] = None,
        bins: int = GraphDefaults.TAIL_FIT_BINS,
    ) -> float:
        """
        Least-squares slope of log p(k) against log k over logarithmic bins
        spanning [k_min, k_max] (default k_max = max degree / 2).
        """
        deg = np.asarray(list(degrees), dtype=float)
        if deg.size == 0:
            raise NumericError("No degrees to fit")
        upper = k_max if k_max is not None else deg.max() / 2.0
        if upper <= k_min:
            raise NumericError(f"Fit window [{k_min}, {upper}] is empty")

        edges = np.logspace(np.log10(k_min), np.log10(upper + 1), bins + 1)
        counts, _ = np.histogram(deg, bins=edges)
        widths = np.diff(edges)
        density = counts / (widths * deg.size)
        centers = np.sqrt(edges[:-1] * edges[1:])

        keep = counts > 0
        if keep.sum() < 2:
            raise NumericError("Need at least two populated bins for the tail fit")
        slope, _ = np.polyfit(np.log(centers[keep]), np.log(density[keep]), 1)
        return float(slope)
