# rewirecap/utils/command_utils.py

import argparse
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from rewirecap.config import EnvConfig, ExitCodes, GraphDefaults, Messages, RewireDefaults
from rewirecap.exceptions import ConfigurationError
from rewirecap.graph_core import NetworkBuilder
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()


class UsageArgumentParser(argparse.ArgumentParser):
    """
    argparse exits with status 2 on bad usage; usage errors here exit with 1
    so that 2 stays reserved for data errors.
    """

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(ExitCodes.USAGE, f"{self.prog}: error: {message}\n")


class CommandParser:
    @staticmethod
    def parse_ba(value: str) -> Tuple[int, int, int]:
        parts = [p.strip() for p in value.split(",")]
        try:
            n, m0, m = (int(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(Messages.INVALID_BA_SPEC.format(value=value))
        if not (n > m0 >= m >= 1):
            raise argparse.ArgumentTypeError(Messages.INVALID_BA_SPEC.format(value=value))
        return n, m0, m

    @staticmethod
    def parse_float_list(value: str) -> List[float]:
        try:
            values = [float(p) for p in value.split(",") if p.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {value!r}")
        if not values:
            raise argparse.ArgumentTypeError(Messages.INVALID_GRID.format(name=value))
        return values

    @staticmethod
    def parse_strategies(value: str) -> List[str]:
        choices = RewireDefaults.STRATEGIES + (RewireDefaults.NO_STRATEGY,)
        names = [p.strip().lower() for p in value.split(",") if p.strip()]
        for name in names:
            if name not in choices:
                raise argparse.ArgumentTypeError(
                    Messages.INVALID_STRATEGY.format(value=name, choices=", ".join(choices))
                )
        return names

    @staticmethod
    def _add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="master RNG seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--config", default=None, help="JSON experiment config")

    @staticmethod
    def _add_source(p: argparse.ArgumentParser) -> None:
        p.add_argument("--dataset", default=None, help="edge-list path or built-in name (karate)")
        p.add_argument("--ba", type=CommandParser.parse_ba, default=None, help="N,M0,M")
        p.add_argument("--layer", default=None, help="layer of a multiplex edge list")
        p.add_argument("--no-aggregate", dest="aggregate_layers", action="store_false",
                       help="refuse multiplex files unless --layer is given")

    @staticmethod
    def build_parser() -> UsageArgumentParser:
        parser = UsageArgumentParser(prog="rewirecap", description=Messages.USAGE_MESSAGE,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
        sub = parser.add_subparsers(dest="command", parser_class=UsageArgumentParser)
        float_list = CommandParser.parse_float_list

        p = sub.add_parser("generate", help="generate a BA network")
        CommandParser._add_common(p)
        p.add_argument("--ba", type=CommandParser.parse_ba, default=None, help="N,M0,M")

        p = sub.add_parser("metrics", help="topological measures of one network")
        CommandParser._add_common(p)
        CommandParser._add_source(p)
        p.add_argument("--beta", type=float, default=None)

        p = sub.add_parser("rewire", help="rewire one network")
        CommandParser._add_common(p)
        CommandParser._add_source(p)
        p.add_argument("--strategy", type=CommandParser.parse_strategies, required=True)
        p.add_argument("--rf", type=float, required=True)
        p.add_argument("--max-attempts", type=int, default=RewireDefaults.MAX_ATTEMPTS)
        p.add_argument("--recompute-every", type=int, default=RewireDefaults.RECOMPUTE_EVERY)

        p = sub.add_parser("sweep", help="full experiment sweep")
        CommandParser._add_common(p)
        CommandParser._add_source(p)
        p.add_argument("--strategy", type=CommandParser.parse_strategies, default=None)
        p.add_argument("--rf", type=float_list, default=None)
        p.add_argument("--beta", type=float_list, default=None)
        p.add_argument("--lambda", dest="lam", type=float_list, default=None)
        p.add_argument("--realizations", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--trace-stride", type=int, default=None, help="sampling step of the analytic load traces")
        p.add_argument("--recompute-every", type=int, default=None)
        p.add_argument("--simulate", action="store_true", default=None)
        p.add_argument("--plots", action="store_true", help="render plots after the sweep")

        p = sub.add_parser("simulate", help="analytic and packet-level traffic traces")
        CommandParser._add_common(p)
        CommandParser._add_source(p)
        p.add_argument("--beta", type=float_list, default=None)
        p.add_argument("--lambda", dest="lam", type=float_list, default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--packets", action="store_true", help="also run the packet simulator")
        p.add_argument("--mode", choices=("poisson", "bernoulli"), default=None)
        p.add_argument("--onset", action="store_true", help="bisect the simulated congestion onset")

        p = sub.add_parser("plot", help="render figures from a result directory")
        CommandParser._add_common(p)

        return parser


class CommandUtils:
    @staticmethod
    def seed(args: argparse.Namespace) -> int:
        return args.seed if args.seed is not None else EnvConfig.master_seed()

    @staticmethod
    def out_dir(args: argparse.Namespace) -> str:
        return args.out if args.out else EnvConfig.out_dir()

    @staticmethod
    def load_config_file(path: Optional[str]) -> Dict[str, Any]:
        if not path:
            return {}
        if not os.path.exists(path):
            raise ConfigurationError(Messages.CONFIG_NOT_FOUND.format(path=path))
        data = ResultStore.load_json(path)
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config {path} must hold a JSON object")
        return data

    @staticmethod
    def network_source(args: argparse.Namespace) -> Optional[Dict[str, Any]]:
        if getattr(args, "dataset", None):
            return {
                "kind": "dataset",
                "path": args.dataset,
                "aggregate_layers": getattr(args, "aggregate_layers", True),
                "layer": getattr(args, "layer", None),
            }
        if getattr(args, "ba", None):
            n, m0, m = args.ba
            return {"kind": "ba", "n": n, "m0": m0, "m": m}
        return None

    @staticmethod
    def sweep_strategies(names: Optional[List[str]]) -> Optional[List[str]]:
        # "none" in a sweep means: original network only
        if names is None:
            return None
        return [n for n in names if n != RewireDefaults.NO_STRATEGY]

    @staticmethod
    def experiment_dict(args: argparse.Namespace) -> Dict[str, Any]:
        """
        Environment defaults, then the --config file, then explicit flags.
        """
        data: Dict[str, Any] = {
            "out_dir": EnvConfig.out_dir(),
            "workers": EnvConfig.workers(),
            "master_seed": EnvConfig.master_seed(),
        }
        data.update(CommandUtils.load_config_file(args.config))

        overrides = {
            "master_seed": args.seed,
            "out_dir": args.out,
            "strategies": CommandUtils.sweep_strategies(getattr(args, "strategy", None)),
            "rf_grid": getattr(args, "rf", None),
            "beta_grid": getattr(args, "beta", None),
            "lambda_grid": getattr(args, "lam", None),
            "realizations": getattr(args, "realizations", None),
            "workers": getattr(args, "workers", None),
            "horizon": getattr(args, "horizon", None),
            "trace_stride": getattr(args, "trace_stride", None),
            "recompute_every": getattr(args, "recompute_every", None),
            "simulate": getattr(args, "simulate", None),
            "network": CommandUtils.network_source(args),
        }
        data.update({k: v for k, v in overrides.items() if v is not None})
        return data

    @staticmethod
    def load_network(args: argparse.Namespace, default_ba: bool = False) -> Tuple[nx.Graph, str]:
        source = CommandUtils.network_source(args)
        if source is None and args.config:
            source = CommandUtils.load_config_file(args.config).get("network")
        if source is None:
            if not default_ba:
                raise ConfigurationError(Messages.NO_NETWORK_SOURCE)
            source = {
                "kind": "ba",
                "n": GraphDefaults.BA_NODES,
                "m0": GraphDefaults.BA_SEED_NODES,
                "m": GraphDefaults.BA_LINKS_PER_NODE,
            }

        if source.get("kind", "ba") == "dataset":
            path = source["path"]
            g, _ = NetworkBuilder.load_dataset(
                path, aggregate_layers=source.get("aggregate_layers", True), layer=source.get("layer")
            )
            return g, os.path.splitext(os.path.basename(path))[0]

        n, m0, m = source["n"], source["m0"], source["m"]
        g = NetworkBuilder.generate_ba(n, m0, m, seed=CommandUtils.seed(args))
        return g, f"ba_{n}_{m0}_{m}"
