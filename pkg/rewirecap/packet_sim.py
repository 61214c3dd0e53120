# rewirecap/packet_sim.py

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from scipy.sparse.csgraph import shortest_path

from rewirecap.config import OutputConfig, TrafficDefaults
from rewirecap.exceptions import ConfigurationError, DisconnectedGraphError, NumericError
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()


@dataclass
class Packet:
    source: int
    destination: int
    born: int
    # global enqueue stamp, refreshed every time the packet joins a queue
    stamp: int = 0
    hops: int = 0


@dataclass
class PacketSimState:
    queues: List[Deque[Packet]]
    generated: int = 0
    delivered: int = 0
    load_trace: List[int] = field(default_factory=list)
    generated_trace: List[int] = field(default_factory=list)
    delivered_trace: List[int] = field(default_factory=list)

    @property
    def in_flight(self) -> int:
        return sum(len(q) for q in self.queues)

    def trace_frame(self) -> pd.DataFrame:
        steps = np.arange(1, len(self.load_trace) + 1)
        return pd.DataFrame(
            {
                "t": steps,
                "L_total": self.load_trace,
                "generated": self.generated_trace,
                "delivered": self.delivered_trace,
            },
            columns=OutputConfig.TRACE_COLUMNS,
        )


class PacketSimulator:
    @staticmethod
    def next_hop_table(g: nx.Graph) -> np.ndarray:
        """
        next_hop[u, d] is the smallest-id neighbor of u one hop closer to d
        (-1 on the diagonal).
        """
        n = g.number_of_nodes()
        if n < 2 or not nx.is_connected(g):
            raise DisconnectedGraphError("packet routing")
        adjacency = nx.to_scipy_sparse_array(g, nodelist=list(range(n)), format="csr")
        dist = shortest_path(adjacency, method="D", unweighted=True, directed=False).astype(np.int64)

        table = np.full((n, n), -1, dtype=np.int64)
        for u in range(n):
            neighbors = np.asarray(sorted(g.adj[u]), dtype=np.int64)
            closer = dist[neighbors] == (dist[u] - 1)
            table[u] = neighbors[np.argmax(closer, axis=0)]
            table[u, u] = -1
        return table

    @staticmethod
    def integer_capacity(capacity: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """
        Stochastic rounding: floor(C_i) plus one with probability frac(C_i).
        """
        base = np.floor(capacity)
        return (base + (rng.random(len(capacity)) < (capacity - base))).astype(np.int64)

    @staticmethod
    def _generation_counts(lam: float, n: int, mode: str, rng: np.random.Generator) -> np.ndarray:
        if mode == "poisson":
            return rng.poisson(lam, size=n)
        # bernoulli: floor(lambda) packets plus one more with probability frac(lambda)
        whole = np.floor(lam)
        return (whole + (rng.random(n) < (lam - whole))).astype(np.int64)

    @staticmethod
    def _serve(queue: Deque[Packet], slots: int, table: np.ndarray, node: int) -> List[Tuple[Packet, int]]:
        out = []
        for _ in range(min(slots, len(queue))):
            packet = queue.popleft()
            out.append((packet, int(table[node, packet.destination])))
        return out

    @staticmethod
    def packet_simulate(
        g: nx.Graph,
        capacity: Sequence[float],
        lam: float,
        horizon: int,
        seed: Optional[int] = None,
        mode: str = TrafficDefaults.GENERATION_MODE,
        next_hop: Optional[np.ndarray] = None,
    ) -> PacketSimState:
        """
        Discrete-time FIFO simulation over static shortest-path routes. Each
        step generates packets at every node, then every node forwards up to
        its integerized capacity; forwarded packets join the next queue only
        after all nodes have served.
        """
        if lam < 0:
            raise ConfigurationError(f"lambda must be non-negative, got {lam}")
        if horizon < 1:
            raise ConfigurationError(f"horizon must be at least 1, got {horizon}")
        if mode not in TrafficDefaults.GENERATION_MODES:
            raise ConfigurationError(f"Unknown generation mode {mode!r}")

        n = g.number_of_nodes()
        capacity = np.asarray(capacity, dtype=float)
        table = PacketSimulator.next_hop_table(g) if next_hop is None else next_hop
        rng = np.random.default_rng(seed)
        state = PacketSimState(queues=[deque() for _ in range(n)])
        stamp = 0

        for t in range(1, horizon + 1):
            counts = PacketSimulator._generation_counts(lam, n, mode, rng)
            for i in np.flatnonzero(counts):
                i = int(i)
                for offset in rng.integers(n - 1, size=int(counts[i])):
                    dest = int(offset) + (1 if offset >= i else 0)
                    state.queues[i].append(Packet(source=i, destination=dest, born=t, stamp=stamp))
                    stamp += 1
                state.generated += int(counts[i])

            service = PacketSimulator.integer_capacity(capacity, rng)
            departures: List[Tuple[Packet, int]] = []
            for i in range(n):
                departures.extend(PacketSimulator._serve(state.queues[i], int(service[i]), table, i))

            for packet, hop in departures:
                packet.hops += 1
                if hop == packet.destination:
                    state.delivered += 1
                    continue
                packet.stamp = stamp
                stamp += 1
                state.queues[hop].append(packet)

            state.load_trace.append(state.in_flight)
            state.generated_trace.append(state.generated)
            state.delivered_trace.append(state.delivered)

        return state

    @staticmethod
    def is_congested(
        g: nx.Graph,
        capacity: Sequence[float],
        lam: float,
        horizon: int,
        seeds: Sequence[int],
        mode: str = TrafficDefaults.GENERATION_MODE,
        next_hop: Optional[np.ndarray] = None,
        load_fraction: float = TrafficDefaults.ONSET_LOAD_FRACTION,
    ) -> bool:
        """
        Mean over seeds of L(T)/T exceeds load_fraction * lambda * N.
        """
        table = PacketSimulator.next_hop_table(g) if next_hop is None else next_hop
        growth = [
            PacketSimulator.packet_simulate(g, capacity, lam, horizon, seed=s, mode=mode, next_hop=table).load_trace[-1]
            / horizon
            for s in seeds
        ]
        return float(np.mean(growth)) > load_fraction * lam * g.number_of_nodes()

    @staticmethod
    def estimate_onset(
        g: nx.Graph,
        capacity: Sequence[float],
        upper: float,
        horizon: int = TrafficDefaults.HORIZON,
        seed: Optional[int] = None,
        realizations: int = 1,
        steps: int = TrafficDefaults.ONSET_BISECTION_STEPS,
        mode: str = TrafficDefaults.GENERATION_MODE,
        max_doublings: int = 8,
    ) -> float:
        """
        Bisects lambda for the smallest rate at which the simulated load keeps
        growing. The same seeds serve every trial rate. upper is doubled until it
        congests.
        """
        if upper <= 0:
            raise ConfigurationError(f"Onset search needs a positive upper bound, got {upper}")
        seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(realizations)]
        table = PacketSimulator.next_hop_table(g)

        def congested(lam: float) -> bool:
            return PacketSimulator.is_congested(g, capacity, lam, horizon, seeds, mode=mode, next_hop=table)

        lo, hi = 0.0, float(upper)
        for _ in range(max_doublings):
            if congested(hi):
                break
            lo, hi = hi, hi * 2.0
        else:
            raise NumericError(f"No congestion observed up to lambda={hi}")

        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            if congested(mid):
                hi = mid
            else:
                lo = mid
        logger.debug(f"Simulated congestion onset in [{lo:.4f}, {hi:.4f}]")
        return hi

    @staticmethod
    def write_trace_csv(state: PacketSimState, path: str) -> str:
        return ResultStore.write_frame(state.trace_frame(), path)
