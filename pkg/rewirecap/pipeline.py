# rewirecap/pipeline.py

import asyncio
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from rewirecap import __version__
from rewirecap.config import (
    EnvConfig,
    GraphDefaults,
    LogConfig,
    Messages,
    OutputConfig,
    RewireDefaults,
    SweepDefaults,
    TrafficDefaults,
)
from rewirecap.centrality import Centrality
from rewirecap.exceptions import ConfigurationError, RewireCapError
from rewirecap.graph_core import GraphUtils, NetworkBuilder
from rewirecap.metrics import Metrics
from rewirecap.packet_sim import PacketSimulator
from rewirecap.rewiring import RewireConfig, Rewiring
from rewirecap.traffic import Traffic, TrafficParams
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager
from rewirecap.utils.pipeline_utils import CellSpec, PipelineHelper
from rewirecap.utils.tempfile_utils import TempFileManager

logger = LogManager.setup_main_logger()

UTILIZATION_COLUMNS = ["k", "U_k"]
DEGREE_COLUMNS = ["k", "p_k"]
SIM_COLUMNS = ["beta", "lambda", "sim"] + OutputConfig.TRACE_COLUMNS
FAILURE_COLUMNS = ["index"] + OutputConfig.CELL_KEY_COLUMNS + ["error_type", "message"]


@dataclass
class NetworkSource:
    kind: str = "ba"
    n: int = GraphDefaults.BA_NODES
    m0: int = GraphDefaults.BA_SEED_NODES
    m: int = GraphDefaults.BA_LINKS_PER_NODE
    path: Optional[str] = None
    aggregate_layers: bool = True
    layer: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("ba", "dataset"):
            raise ConfigurationError(f"Network source kind must be 'ba' or 'dataset', got {self.kind!r}")
        if self.kind == "dataset" and not self.path:
            raise ConfigurationError("Dataset network source needs a path")
        if self.kind == "ba" and not (self.n > self.m0 >= self.m >= 1):
            raise ConfigurationError(f"BA sizes must satisfy N > m0 >= m >= 1, got {self.n},{self.m0},{self.m}")

    @property
    def name(self) -> str:
        if self.kind == "ba":
            return f"ba_{self.n}_{self.m0}_{self.m}"
        base = os.path.splitext(os.path.basename(self.path))[0]
        return f"{base}_{self.layer}" if self.layer else base

    def build(self, seed: Optional[int]) -> nx.Graph:
        if self.kind == "ba":
            return NetworkBuilder.generate_ba(self.n, self.m0, self.m, seed=seed)
        g, _ = NetworkBuilder.load_dataset(self.path, aggregate_layers=self.aggregate_layers, layer=self.layer)
        return g


@dataclass
class ExperimentConfig:
    network: NetworkSource = field(default_factory=NetworkSource)
    strategies: List[str] = field(default_factory=lambda: list(RewireDefaults.STRATEGIES))
    rf_grid: List[float] = field(default_factory=lambda: list(SweepDefaults.RF_GRID))
    beta_grid: List[float] = field(default_factory=lambda: list(SweepDefaults.BETA_GRID))
    lambda_grid: List[float] = field(default_factory=lambda: list(SweepDefaults.LAMBDA_GRID))
    realizations: int = SweepDefaults.REALIZATIONS
    master_seed: int = SweepDefaults.MASTER_SEED
    recompute_every: int = RewireDefaults.RECOMPUTE_EVERY
    max_attempts: int = RewireDefaults.MAX_ATTEMPTS
    horizon: int = TrafficDefaults.HORIZON
    trace_stride: int = TrafficDefaults.TRACE_STRIDE
    metrics_beta: float = TrafficDefaults.BETA
    simulate: bool = False
    sim_realizations: int = SweepDefaults.SIM_REALIZATIONS
    generation_mode: str = TrafficDefaults.GENERATION_MODE
    out_dir: str = OutputConfig.DEFAULT_OUT_DIR
    workers: int = SweepDefaults.WORKERS

    # runtime-only fields, left out of the hash and the manifest
    RUNTIME_FIELDS = ("out_dir", "workers")

    def __post_init__(self):
        if isinstance(self.network, dict):
            self.network = NetworkSource(**self.network)
        self.strategies = [s.lower() for s in self.strategies]
        self.rf_grid = [float(x) for x in self.rf_grid]
        self.beta_grid = [float(x) for x in self.beta_grid]
        self.lambda_grid = [float(x) for x in self.lambda_grid]
        self.validate()

    def validate(self) -> None:
        for name in ("rf_grid", "beta_grid", "lambda_grid"):
            if not getattr(self, name):
                raise ConfigurationError(Messages.INVALID_GRID.format(name=name))
        for strategy in self.strategies:
            if strategy not in RewireDefaults.STRATEGIES:
                raise ConfigurationError(f"Unknown strategy {strategy!r}")
        if any(not 0.0 <= r <= 1.0 for r in self.rf_grid):
            raise ConfigurationError(Messages.INVALID_RF.format(value=self.rf_grid))
        if any(b <= 0 for b in self.beta_grid) or self.metrics_beta <= 0:
            raise ConfigurationError("beta values must be positive")
        if any(lam < 0 for lam in self.lambda_grid):
            raise ConfigurationError("lambda values must be non-negative")
        if self.realizations < 1 or self.sim_realizations < 1:
            raise ConfigurationError("realizations must be at least 1")
        if min(self.horizon, self.trace_stride, self.recompute_every, self.max_attempts) < 1:
            raise ConfigurationError("horizon, trace_stride, recompute_every and max_attempts must be at least 1")
        if self.generation_mode not in TrafficDefaults.GENERATION_MODES:
            raise ConfigurationError(f"Unknown generation mode {self.generation_mode!r}")

    def to_dict(self, include_runtime: bool = True) -> Dict[str, Any]:
        data = asdict(self)
        if not include_runtime:
            for name in self.RUNTIME_FIELDS:
                data.pop(name, None)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config is not valid JSON: {e}") from e
        return cls.from_dict(data)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(include_runtime=False), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def run_id(self) -> str:
        return self.config_hash[:LogConfig.RUN_ID_LENGTH]

    @property
    def logs_dir(self) -> str:
        return os.path.join(self.out_dir, LogConfig.LOGS_DIR)


def trace_steps(horizon: int, stride: int) -> List[int]:
    """Sampled steps of an analytic trace: every stride-th step plus the last one."""
    steps = list(range(stride, horizon + 1, stride))
    if not steps or steps[-1] != horizon:
        steps.append(horizon)
    return steps


def traffic_rows(g: nx.Graph, centr, cfg: ExperimentConfig) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """
    Final-load rows per (beta, lambda) and the analytic load trace sampled
    every trace_stride steps.
    """
    rows, trace_rows = [], []
    steps = trace_steps(cfg.horizon, cfg.trace_stride)
    avg_path = Traffic.average_path_length(g)
    unit_inflow = Traffic.expected_inflow(g, centr, 1.0, avg_path=avg_path)
    for beta in cfg.beta_grid:
        capacity = Traffic.allocate_capacity(g, centr, beta)
        lambda_c = Traffic.critical_rate(g, centr, capacity)
        free_flow = Traffic.free_flow_threshold(capacity, unit_inflow)
        for lam in cfg.lambda_grid:
            trace = Traffic.analytic_load(TrafficParams(beta, lam, cfg.horizon), capacity, unit_inflow * lam)
            rows.append({
                "beta": beta,
                "lambda": lam,
                "load_final": float(trace[-1]),
                "free_flow_lambda": free_flow,
                "lambda_c": lambda_c,
            })
            trace_rows.extend(
                {"beta": beta, "lambda": lam, "t": t, "L_total": float(trace[t - 1])} for t in steps
            )
    return rows, trace_rows


def simulation_rows(g: nx.Graph, centr, cfg: ExperimentConfig, seed: int) -> List[Dict[str, Any]]:
    rows = []
    table = PacketSimulator.next_hop_table(g)
    for beta in cfg.beta_grid:
        capacity = Traffic.allocate_capacity(g, centr, beta)
        for lam in cfg.lambda_grid:
            for sim in range(cfg.sim_realizations):
                sim_seed = PipelineHelper.derive_seed(seed, "sim", repr(beta), repr(lam), sim)
                state = PacketSimulator.packet_simulate(
                    g, capacity, lam, cfg.horizon, seed=sim_seed, mode=cfg.generation_mode, next_hop=table
                )
                steps = zip(state.load_trace, state.generated_trace, state.delivered_trace)
                for t, (load, generated, delivered) in enumerate(steps, start=1):
                    rows.append({
                        "beta": beta, "lambda": lam, "sim": sim, "t": t,
                        "L_total": load, "generated": generated, "delivered": delivered,
                    })
    return rows


def evaluate_cell(cell: CellSpec, cfg: ExperimentConfig) -> Dict[str, Any]:
    base = cfg.network.build(cell.network_seed)
    if cell.strategy == "original":
        g, report = base, None
    else:
        rewire_cfg = RewireConfig(
            strategy=cell.strategy,
            r_f=cell.r_f,
            seed=cell.seed,
            max_attempts=cfg.max_attempts,
            recompute_every=cfg.recompute_every,
        )
        g, report = Rewiring.rewire(base, rewire_cfg)

    centr = Centrality.compute_bundle(g)
    metrics = Metrics.compute_metrics(g, beta=cfg.metrics_beta, centr=centr)
    utilization = Traffic.node_utilization(g, centr)
    distribution = GraphUtils.degree_distribution(g)
    traffic, analytic_traces = traffic_rows(g, centr, cfg)

    result: Dict[str, Any] = {
        "index": cell.index,
        "key": cell.key(),
        "metrics": metrics.as_dict(),
        "report": report.to_row() if report else None,
        "traffic": traffic,
        "analytic_traces": analytic_traces,
        "utilization": [{"k": k, "U_k": u} for k, u in sorted(utilization.u_k.items())],
        "degree": [{"k": k, "p_k": float(p)} for k, p in enumerate(distribution.p_k) if p > 0],
    }
    if cfg.simulate:
        result["traces"] = simulation_rows(g, centr, cfg, cell.seed)
    return result


def run_cell(cell: CellSpec, config: Dict[str, Any], cells_dir: str) -> str:
    """
    Evaluates one cell and writes its JSON result; failures are written as
    error records instead of propagating.
    """
    cfg = ExperimentConfig.from_dict(config)
    path = os.path.join(cells_dir, cell.filename)
    LogManager.bind_run(cfg.run_id, cfg.logs_dir)
    with LogManager.cell_context(cell.label):
        try:
            result = evaluate_cell(cell, cfg)
        except RewireCapError as e:
            logger.warning(f"Cell {cell.index} ({cell.strategy}, r_f={cell.r_f}) failed: {e}")
            result = {"index": cell.index, "key": cell.key(), "error": {"error_type": type(e).__name__, "message": str(e)}}
        except Exception as e:
            logger.error(f"Unexpected failure in cell {cell.index}", exc_info=True)
            result = {"index": cell.index, "key": cell.key(), "error": {"error_type": type(e).__name__, "message": str(e)}}
    return ResultStore.write_json(path, result)


class ExperimentPipeline:
    def __init__(self, cfg: ExperimentConfig, workers: Optional[int] = None):
        self.cfg = cfg
        self.workers = max(1, workers if workers is not None else cfg.workers)
        self.out_dir = cfg.out_dir
        self.cells_dir = os.path.join(self.out_dir, OutputConfig.CELLS_DIR)
        self.cells: List[CellSpec] = PipelineHelper.enumerate_cells(
            cfg.network.name, cfg.strategies, cfg.rf_grid, cfg.realizations, cfg.master_seed
        )

    async def run(self) -> Dict[str, str]:
        LogManager.bind_run(self.cfg.run_id, self.cfg.logs_dir)
        logger.info(
            f"Starting sweep on {self.cfg.network.name}: {len(self.cells)} cells, "
            f"{self.workers} worker(s), seed {self.cfg.master_seed}"
        )
        TempFileManager.cleanup_file(self.cells_dir)
        os.makedirs(self.cells_dir, exist_ok=True)

        config = self.cfg.to_dict()
        semaphore = asyncio.Semaphore(self.workers)
        loop = asyncio.get_running_loop()
        pool = ProcessPoolExecutor(max_workers=self.workers) if self.workers > 1 else None

        async def dispatch(cell: CellSpec) -> str:
            async with semaphore:
                if pool is None:
                    return await asyncio.to_thread(run_cell, cell, config, self.cells_dir)
                return await loop.run_in_executor(pool, run_cell, cell, config, self.cells_dir)

        try:
            outcomes = await asyncio.gather(*(dispatch(c) for c in self.cells), return_exceptions=True)
        finally:
            if pool is not None:
                pool.shutdown(wait=True)

        for cell, outcome in zip(self.cells, outcomes):
            if isinstance(outcome, Exception):
                logger.error(f"Cell {cell.index} did not complete: {outcome}")
                ResultStore.write_json(
                    os.path.join(self.cells_dir, cell.filename),
                    {"index": cell.index, "key": cell.key(),
                     "error": {"error_type": type(outcome).__name__, "message": str(outcome)}},
                )

        return self.reduce()

    def reduce(self) -> Dict[str, str]:
        """
        Folds the per-cell JSON files into the result CSVs and the manifest.
        """
        results = PipelineHelper.load_cells(self.cells_dir)
        keys = OutputConfig.CELL_KEY_COLUMNS
        written: Dict[str, str] = {}

        metrics_rows = PipelineHelper.keyed_rows(results, "metrics")
        written["metrics"] = PipelineHelper.write_section(
            metrics_rows, keys + OutputConfig.METRIC_COLUMNS, self.out_dir, OutputConfig.METRICS_CSV
        )

        metrics_frame = ResultStore.read_frame(written["metrics"])
        summary_path = os.path.join(self.out_dir, OutputConfig.SUMMARY_CSV)
        written["summary"] = ResultStore.write_frame(PipelineHelper.summarize(metrics_frame), summary_path)

        report_columns = ["network", "realization"] + OutputConfig.REPORT_COLUMNS
        report_rows = [
            {"network": r["key"]["network"], "realization": r["key"]["realization"], **r["report"]}
            for r in results
            if r.get("report")
        ]
        written["reports"] = PipelineHelper.write_section(
            report_rows, report_columns, self.out_dir, OutputConfig.REPORTS_CSV
        )
        written["traffic"] = PipelineHelper.write_section(
            PipelineHelper.keyed_rows(results, "traffic"),
            keys + OutputConfig.TRAFFIC_COLUMNS, self.out_dir, OutputConfig.TRAFFIC_CSV,
        )
        written["analytic_traces"] = PipelineHelper.write_section(
            PipelineHelper.keyed_rows(results, "analytic_traces"),
            keys + OutputConfig.ANALYTIC_TRACE_COLUMNS, self.out_dir, OutputConfig.ANALYTIC_TRACES_CSV,
        )
        written["utilization"] = PipelineHelper.write_section(
            PipelineHelper.keyed_rows(results, "utilization"),
            keys + UTILIZATION_COLUMNS, self.out_dir, OutputConfig.UTILIZATION_CSV,
        )
        written["degree"] = PipelineHelper.write_section(
            PipelineHelper.keyed_rows(results, "degree"),
            keys + DEGREE_COLUMNS, self.out_dir, OutputConfig.DEGREE_CSV,
        )
        if self.cfg.simulate:
            written["traces"] = PipelineHelper.write_section(
                PipelineHelper.keyed_rows(results, "traces"),
                keys + SIM_COLUMNS, self.out_dir, OutputConfig.TRACES_CSV,
            )

        failures = PipelineHelper.failure_rows(results)
        written["failures"] = PipelineHelper.write_section(
            failures, FAILURE_COLUMNS, self.out_dir, OutputConfig.FAILURES_CSV
        )
        written["manifest"] = ResultStore.write_json(
            os.path.join(self.out_dir, OutputConfig.MANIFEST),
            {
                "config": self.cfg.to_dict(include_runtime=False),
                "config_hash": self.cfg.config_hash,
                "master_seed": self.cfg.master_seed,
                "version": __version__,
                "cells": len(results),
                "failures": len(failures),
            },
        )
        PipelineHelper.log_run_summary(len(results), len(failures))
        return written

    @staticmethod
    def with_env_defaults(cfg: ExperimentConfig) -> ExperimentConfig:
        """
        Applies REWIRECAP_* environment overrides to fields left at their
        defaults.
        """
        if cfg.out_dir == OutputConfig.DEFAULT_OUT_DIR:
            cfg.out_dir = EnvConfig.out_dir()
        if cfg.workers == SweepDefaults.WORKERS:
            cfg.workers = EnvConfig.workers()
        if cfg.master_seed == SweepDefaults.MASTER_SEED:
            cfg.master_seed = EnvConfig.master_seed()
        return cfg


def run_experiment(cfg: ExperimentConfig) -> Dict[str, str]:
    return asyncio.run(ExperimentPipeline(cfg).run())
