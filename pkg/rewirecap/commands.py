# rewirecap/commands.py

import argparse
import os
from typing import Any, Dict, List

from rewirecap.config import (
    ExitCodes,
    GraphDefaults,
    Messages,
    OutputConfig,
    SweepDefaults,
    TrafficDefaults,
)
from rewirecap.centrality import Centrality
from rewirecap.exceptions import ConfigurationError, DataError, NumericError
from rewirecap.graph_core import GraphUtils, NetworkBuilder
from rewirecap.meso_structure import MesoStructure
from rewirecap.metrics import Metrics
from rewirecap.packet_sim import PacketSimulator
from rewirecap.pipeline import ExperimentConfig, run_experiment
from rewirecap.plots import emit_plots
from rewirecap.rewiring import RewireConfig, Rewiring
from rewirecap.traffic import Traffic, TrafficParams
from rewirecap.utils.command_utils import CommandUtils
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager
from rewirecap.utils.pipeline_utils import PipelineHelper

logger = LogManager.setup_main_logger()


class RewireCapCommands:
    @staticmethod
    def generate_command(args: argparse.Namespace) -> int:
        n, m0, m = args.ba or (GraphDefaults.BA_NODES, GraphDefaults.BA_SEED_NODES, GraphDefaults.BA_LINKS_PER_NODE)
        seed = CommandUtils.seed(args)
        g = NetworkBuilder.generate_ba(n, m0, m, seed=seed)
        path = os.path.join(CommandUtils.out_dir(args), f"ba_{n}_{m0}_{m}.edges")
        NetworkBuilder.write_edge_list(g, path)
        logger.info(f"Generated BA network N={n} m0={m0} m={m} (seed {seed}) -> {path}")
        print(path)
        return ExitCodes.OK

    @staticmethod
    def metrics_command(args: argparse.Namespace) -> int:
        g, name = CommandUtils.load_network(args)
        beta = args.beta if args.beta is not None else TrafficDefaults.BETA
        bundle = Centrality.compute_bundle(g)
        row = Metrics.compute_metrics(g, beta=beta, centr=bundle)

        values = row.as_dict()
        print(f"network: {name} (N={g.number_of_nodes()}, |E|={g.number_of_edges()})")
        for column, value in values.items():
            print(f"{column}: {'n/a' if value is None else f'{value:.4f}'}")
        try:
            slope = GraphUtils.degree_tail_slope(GraphUtils.degrees(g))
            print(f"degree tail slope: {slope:.4f}")
        except NumericError as e:
            logger.info(f"No degree tail fit for {name}: {e}")
            print("degree tail slope: n/a")

        if args.out:
            out = args.out
            ResultStore.write_rows([{"network": name, **values}], ["network"] + OutputConfig.METRIC_COLUMNS,
                                   os.path.join(out, f"{name}_metrics.csv"))
            Centrality.write_centrality_csv(g, bundle, os.path.join(out, f"{name}_centrality.csv"))
            degree_part = MesoStructure.kcore_degree(g)
            closeness_part = MesoStructure.closeness_partition_or_fallback(g, bundle.cc, degree_part)
            MesoStructure.write_core_csv(g, degree_part, closeness_part, os.path.join(out, f"{name}_cores.csv"))
            MesoStructure.write_profile_csv(MesoStructure.rich_club_profile(g),
                                            os.path.join(out, f"{name}_rich_club.csv"))
            logger.info(f"Wrote metrics for {name} to {out}")
        return ExitCodes.OK

    @staticmethod
    def rewire_command(args: argparse.Namespace) -> int:
        if len(args.strategy) != 1:
            raise ConfigurationError("rewire takes exactly one strategy")
        strategy = args.strategy[0]
        g, name = CommandUtils.load_network(args)

        cfg = RewireConfig(
            strategy=strategy,
            r_f=args.rf,
            seed=CommandUtils.seed(args),
            max_attempts=args.max_attempts,
            recompute_every=args.recompute_every,
        )
        rewired, report = Rewiring.rewire(g, cfg)

        out = CommandUtils.out_dir(args)
        edges_path = os.path.join(out, f"{name}_{strategy}.edges")
        NetworkBuilder.write_edge_list(rewired, edges_path)
        ResultStore.write_rows([report.to_row()], OutputConfig.REPORT_COLUMNS,
                               os.path.join(out, f"{name}_{strategy}_report.csv"))
        print(f"{strategy}: {report.accepted}/{report.target} moves accepted -> {edges_path}")
        return ExitCodes.OK

    @staticmethod
    def sweep_command(args: argparse.Namespace) -> int:
        cfg = ExperimentConfig.from_dict(CommandUtils.experiment_dict(args))
        written = run_experiment(cfg)
        if args.plots:
            emit_plots(cfg.out_dir)
        print(f"Results in {cfg.out_dir} (config {cfg.config_hash[:12]}, {len(written)} files)")
        return ExitCodes.OK

    @staticmethod
    def simulate_command(args: argparse.Namespace) -> int:
        g, name = CommandUtils.load_network(args)
        seed = CommandUtils.seed(args)
        betas = args.beta or [TrafficDefaults.BETA]
        lambdas = args.lam or list(SweepDefaults.LAMBDA_GRID)
        horizon = args.horizon or TrafficDefaults.HORIZON
        mode = args.mode or TrafficDefaults.GENERATION_MODE
        out = CommandUtils.out_dir(args)

        bundle = Centrality.compute_bundle(g)
        avg_path = Traffic.average_path_length(g)
        unit_inflow = Traffic.expected_inflow(g, bundle, 1.0, avg_path=avg_path)
        u = Traffic.node_utilization(g, bundle).u
        table = PacketSimulator.next_hop_table(g) if args.packets else None

        analytic_rows: List[Dict[str, Any]] = []
        packet_rows: List[Dict[str, Any]] = []
        threshold_rows: List[Dict[str, Any]] = []

        for beta in betas:
            capacity = Traffic.allocate_capacity(g, bundle, beta)
            lambda_c = Traffic.critical_rate(g, bundle, capacity)
            free_flow = Traffic.free_flow_threshold(capacity, unit_inflow)
            threshold = {"beta": beta, "lambda_c": lambda_c, "free_flow_lambda": free_flow}

            for lam in lambdas:
                trace = Traffic.analytic_load(TrafficParams(beta, lam, horizon), capacity, unit_inflow * lam)
                analytic_rows.extend(
                    {"beta": beta, "lambda": lam, "t": t, "L_total": float(load)}
                    for t, load in enumerate(trace, start=1)
                )
                if table is not None:
                    sim_seed = PipelineHelper.derive_seed(seed, "sim", repr(beta), repr(lam), 0)
                    state = PacketSimulator.packet_simulate(
                        g, capacity, lam, horizon, seed=sim_seed, mode=mode, next_hop=table
                    )
                    steps = zip(state.load_trace, state.generated_trace, state.delivered_trace)
                    packet_rows.extend(
                        {"beta": beta, "lambda": lam, "t": t, "L_total": load,
                         "generated": generated, "delivered": delivered}
                        for t, (load, generated, delivered) in enumerate(steps, start=1)
                    )

            if args.onset:
                threshold["simulated_onset"] = PacketSimulator.estimate_onset(
                    g, capacity, upper=2.0 * lambda_c, horizon=horizon, seed=seed, mode=mode
                )
            threshold_rows.append(threshold)
            Traffic.write_node_traffic_csv(
                g, capacity, unit_inflow, u, os.path.join(out, f"{name}_nodes_beta{beta}.csv")
            )
            print(f"beta={beta}: lambda_c={lambda_c:.4f}, free-flow lambda={free_flow:.4f}"
                  + f", C={Traffic.network_capacity(capacity):.2f}, Q/lambda={Traffic.network_load(unit_inflow):.2f}"
                  + (f", simulated onset={threshold['simulated_onset']:.4f}" if args.onset else ""))

        ResultStore.write_rows(analytic_rows, ["beta", "lambda", "t", "L_total"],
                               os.path.join(out, f"{name}_analytic.csv"))
        if packet_rows:
            ResultStore.write_rows(packet_rows, ["beta", "lambda"] + OutputConfig.TRACE_COLUMNS,
                                   os.path.join(out, f"{name}_packets.csv"))
        columns = ["beta", "lambda_c", "free_flow_lambda"] + (["simulated_onset"] if args.onset else [])
        ResultStore.write_rows(threshold_rows, columns, os.path.join(out, f"{name}_thresholds.csv"))
        return ExitCodes.OK

    @staticmethod
    def plot_command(args: argparse.Namespace) -> int:
        result_dir = CommandUtils.out_dir(args)
        csvs = [OutputConfig.METRICS_CSV, OutputConfig.SUMMARY_CSV, OutputConfig.TRAFFIC_CSV,
                OutputConfig.ANALYTIC_TRACES_CSV]
        if not any(os.path.exists(os.path.join(result_dir, name)) for name in csvs):
            raise DataError(Messages.MISSING_RESULTS.format(path=result_dir))
        for path in emit_plots(result_dir):
            print(path)
        return ExitCodes.OK
