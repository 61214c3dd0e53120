import sys
from typing import List, Optional

from dotenv import load_dotenv

from rewirecap.config import LogConfig
from rewirecap.utils.log_manager import LogManager
from cli_utils.regist import CommandRegistrar


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()

    LogManager.setup_error_logging(LogConfig.ERROR_LOG_PATH)
    logger = LogManager.setup_main_logger()
    logger.debug(f"rewirecap invoked with {argv if argv is not None else sys.argv[1:]}")

    return CommandRegistrar.dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
