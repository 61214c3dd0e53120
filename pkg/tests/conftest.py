# tests/conftest.py
import sys
from pathlib import Path
import dotenv
import networkx as nx
import numpy as np
import pytest


def pytest_configure():
    dotenv.load_dotenv = lambda *a, **k: None


ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


class RecordingLogger:
    def __init__(self):
        self.records = []
    def debug(self, msg, *a, **k): self.records.append(("debug", msg))
    def info(self, msg, *a, **k): self.records.append(("info", msg))
    def warning(self, msg, *a, **k): self.records.append(("warning", msg))
    def error(self, msg, *a, **k): self.records.append(("error", msg))

    def messages(self, level):
        return [m for lvl, m in self.records if lvl == level]


def random_connected_graph(rng: np.random.Generator, n: int, p: float = 0.2) -> nx.Graph:
    # random spanning tree plus extra edges, nodes 0..n-1
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for i in range(1, n):
        g.add_edge(i, int(rng.integers(i)))
    for i in range(n):
        for j in range(i + 1, n):
            if not g.has_edge(i, j) and rng.random() < p:
                g.add_edge(i, j)
    return g


@pytest.fixture
def recording_logger():
    return RecordingLogger()


@pytest.fixture
def star4():
    # hub 0 with four leaves
    return nx.star_graph(4)


@pytest.fixture
def path4():
    return nx.path_graph(4)


@pytest.fixture
def triangle():
    return nx.complete_graph(3)


@pytest.fixture
def karate():
    from rewirecap.graph_core import NetworkBuilder
    g, _ = NetworkBuilder.load_dataset("karate")
    return g


@pytest.fixture
def small_ba():
    from rewirecap.graph_core import NetworkBuilder
    return NetworkBuilder.generate_ba(80, 5, 2, seed=7)


@pytest.fixture
def graph_corpus():
    rng = np.random.default_rng(12345)
    return [random_connected_graph(rng, int(rng.integers(3, 13)), p=float(rng.uniform(0.05, 0.5))) for _ in range(200)]
