# rewirecap/config.py

import os

from dotenv import load_dotenv

from rewirecap.exceptions import ConfigurationError

load_dotenv()


class EnvConfig:
    @staticmethod
    def get_int(key: str, default: int) -> int:
        """
        Reads an integer override from the environment, falling back to default.
        """
        raw = os.getenv(key)
        if raw is None or not raw.strip():
            return default
        try:
            return int(raw)
        except ValueError as e:
            raise ConfigurationError(f"Environment variable {key} must be an integer, got {raw!r}") from e

    @staticmethod
    def get_str(key: str, default: str) -> str:
        raw = os.getenv(key)
        return raw.strip() if raw and raw.strip() else default

    @staticmethod
    def out_dir() -> str:
        return EnvConfig.get_str("REWIRECAP_OUT_DIR", OutputConfig.DEFAULT_OUT_DIR)

    @staticmethod
    def workers() -> int:
        return EnvConfig.get_int("REWIRECAP_WORKERS", SweepDefaults.WORKERS)

    @staticmethod
    def master_seed() -> int:
        return EnvConfig.get_int("REWIRECAP_SEED", SweepDefaults.MASTER_SEED)


class GraphDefaults:
    BA_NODES = 500
    BA_SEED_NODES = 5
    BA_LINKS_PER_NODE = 4
    COMMENT_PREFIX = "#"
    BUILTIN_DATASETS = ("karate",)
    TAIL_FIT_BINS = 12
    TAIL_FIT_MIN_DEGREE = 4


class CentralityConfig:
    EC_TOLERANCE = 1e-10
    EC_MAX_ITER = 10_000
    VARIANCE_EPSILON = 1e-12
    RANGE_EPSILON = 1e-12


class RewireDefaults:
    STRATEGIES = ("dpa", "dec", "dkbc", "ckdbc")
    NO_STRATEGY = "none"
    MAX_ATTEMPTS = 50
    RECOMPUTE_EVERY = 1
    # Move slots available per requested move before the run gives up.
    MOVE_BUDGET_FACTOR = 5


class TrafficDefaults:
    BETA = 0.5
    HORIZON = 1000
    GENERATION_MODES = ("poisson", "bernoulli")
    GENERATION_MODE = "poisson"
    ONSET_LOAD_FRACTION = 0.01
    ONSET_BISECTION_STEPS = 12
    TRACE_STRIDE = 10


class SweepDefaults:
    RF_GRID = (0.01, 0.02, 0.05, 0.10, 0.15, 0.20)
    BETA_GRID = (0.3, 0.5, 0.7)
    LAMBDA_GRID = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
    REALIZATIONS = 10
    MASTER_SEED = 20180101
    WORKERS = 1
    SIM_REALIZATIONS = 1


class OutputConfig:
    DEFAULT_OUT_DIR = "results"
    CELLS_DIR = "cells"
    PLOTS_DIR = "plots"
    MANIFEST = "manifest.json"
    METRICS_CSV = "metrics.csv"
    SUMMARY_CSV = "summary.csv"
    REPORTS_CSV = "rewire_reports.csv"
    TRAFFIC_CSV = "traffic.csv"
    UTILIZATION_CSV = "utilization.csv"
    DEGREE_CSV = "degree_distribution.csv"
    TRACES_CSV = "packet_traces.csv"
    ANALYTIC_TRACES_CSV = "analytic_traces.csv"
    FAILURES_CSV = "failures.csv"

    METRIC_COLUMNS = [
        "g_max", "lambda_c", "r_deg", "avg_clustering", "anc",
        "apl", "anb", "rc", "cp", "u_max", "free_flow_lambda",
    ]
    CELL_KEY_COLUMNS = ["network", "strategy", "r_f", "realization", "seed"]
    REPORT_COLUMNS = [
        "strategy", "r_f", "seed", "attempted", "accepted",
        "rejected_no_candidate", "rejected_condition", "rejected_disconnect",
        "edges_before", "edges_after",
    ]
    TRAFFIC_COLUMNS = ["beta", "lambda", "load_final", "free_flow_lambda", "lambda_c"]
    TRACE_COLUMNS = ["t", "L_total", "generated", "delivered"]
    ANALYTIC_TRACE_COLUMNS = ["beta", "lambda", "t", "L_total"]
    CENTRALITY_COLUMNS = ["node", "degree", "bc_raw", "bc_norm", "cc", "ec"]
    CORE_COLUMNS = ["node", "core_degree", "core_closeness"]
    PROFILE_COLUMNS = ["k", "phi_k"]
    NODE_TRAFFIC_COLUMNS = ["node", "degree", "C_i", "Q_i", "u_i"]


class LogConfig:
    LOGS_DIR = "logs"
    ACCEPTED_LOG_NAME = "rewire_accepted.log"
    REJECTED_LOG_NAME = "rewire_rejected.log"
    ERROR_LOG_PATH = "logs/error.log"
    ACCEPTED_LOG_PATH = f"{LOGS_DIR}/{ACCEPTED_LOG_NAME}"
    REJECTED_LOG_PATH = f"{LOGS_DIR}/{REJECTED_LOG_NAME}"
    # run and cell fields of records logged outside a sweep
    NO_CONTEXT = "-"
    RUN_ID_LENGTH = 12


class RejectReasons:
    NO_CANDIDATE = "no_candidate"
    CONDITION = "condition"
    DISCONNECT = "disconnect"

    @classmethod
    def all(cls) -> list[str]:
        return [
            cls.NO_CANDIDATE,
            cls.CONDITION,
            cls.DISCONNECT,
        ]


class ExitCodes:
    OK = 0
    USAGE = 1
    DATA_ERROR = 2
    NUMERIC_FAILURE = 3


class Messages:
    USAGE_MESSAGE = (
        "Usage: python . <command> [options]\n\n"
        "Commands:\n"
        "  generate  Generate a BA network and write its edge list\n"
        "  metrics   Compute the topological measures of one network\n"
        "  rewire    Rewire one network with a single strategy\n"
        "  sweep     Run a full experiment sweep\n"
        "  simulate  Run analytic and packet-level traffic traces\n"
        "  plot      Render figures from a result directory"
    )

    INVALID_BA_SPEC = "Invalid --ba value {value!r}. Expected N,M0,M, e.g. 500,5,4."
    INVALID_STRATEGY = "Unknown strategy {value!r}. Choose from: {choices}."
    INVALID_GRID = "Grid {name} must contain at least one value."
    INVALID_RF = "r_f values must lie in [0, 1], got {value}."
    NO_NETWORK_SOURCE = "Provide a network with --dataset PATH or --ba N,M0,M."
    MISSING_RESULTS = "No result CSVs found in {path}."
    CONFIG_NOT_FOUND = "Config file not found: {path}"
