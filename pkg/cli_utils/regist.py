# cli_utils/regist.py

import argparse
from typing import Callable, Dict, List, Optional

from rewirecap.commands import RewireCapCommands
from rewirecap.config import ExitCodes, Messages
from rewirecap.exceptions import (
    ConfigurationError,
    DataError,
    DisconnectedGraphError,
    NumericError,
)
from rewirecap.utils.command_utils import CommandParser
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()

Handler = Callable[[argparse.Namespace], int]


class CommandRegistrar:
    @classmethod
    def command_handlers(cls) -> Dict[str, Handler]:
        return {
            "generate": RewireCapCommands.generate_command,
            "metrics": RewireCapCommands.metrics_command,
            "rewire": RewireCapCommands.rewire_command,
            "sweep": RewireCapCommands.sweep_command,
            "simulate": RewireCapCommands.simulate_command,
            "plot": RewireCapCommands.plot_command,
        }

    @classmethod
    def dispatch(cls, argv: Optional[List[str]] = None) -> int:
        parser = CommandParser.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)

        handler = cls.command_handlers().get(args.command)
        if handler is None:
            print(Messages.USAGE_MESSAGE)
            return ExitCodes.USAGE

        try:
            return handler(args)
        except (ConfigurationError, DataError, DisconnectedGraphError, ValueError) as e:
            logger.error(f"{args.command} failed: {e}")
            return ExitCodes.DATA_ERROR
        except NumericError as e:
            logger.error(f"{args.command} numeric failure: {e}")
            return ExitCodes.NUMERIC_FAILURE
