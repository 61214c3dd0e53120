# rewirecap/utils/log_manager.py

import contextvars
import logging
import os
import sys
from contextlib import contextmanager
from typing import Iterator, Optional

from rewirecap.config import LogConfig

_cell_label: contextvars.ContextVar[str] = contextvars.ContextVar("rewirecap_cell", default=LogConfig.NO_CONTEXT)

STREAM_FORMAT = "%(asctime)s - %(levelname)s - %(name)s:%(lineno)d - [%(run_id)s %(cell)s] %(message)s"
ERROR_FORMAT = "%(asctime)s - %(levelname)s - [%(run_id)s %(cell)s] %(message)s"
MOVE_FORMAT = "%(levelname)s:%(run_id)s:%(cell)s:%(message)s"


class RunContextFilter(logging.Filter):
    """
    Stamps every record with the sweep it belongs to (run_id, process-wide)
    and the cell being evaluated (cell, per thread or task).
    """

    run_id: str = LogConfig.NO_CONTEXT

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run_id"):
            record.run_id = RunContextFilter.run_id
        if not hasattr(record, "cell"):
            record.cell = _cell_label.get()
        return True


def _contextual_handler(handler: logging.Handler, fmt: str) -> logging.Handler:
    handler.addFilter(RunContextFilter())
    handler.setFormatter(logging.Formatter(fmt))
    return handler


class BaseLogger:
    @staticmethod
    def setup_stream_logger(level=None):
        # allow LOG_LEVEL=DEBUG/INFO/WARNING/ERROR
        if isinstance(level, str):
            level = getattr(logging, level.upper(), logging.INFO)
        if level is None:
            level = getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)

        logger = logging.getLogger()
        logger.setLevel(level)

        if not logger.hasHandlers():
            handler = _contextual_handler(logging.StreamHandler(), STREAM_FORMAT)
            handler.setLevel(level)
            logger.addHandler(handler)

        return logger

    @staticmethod
    def setup_error_file_logger(log_path: str):
        logger = logging.getLogger("error_logger")
        logger.setLevel(logging.WARNING)

        if not logger.handlers:
            os.makedirs(os.path.dirname(log_path) or ".", exist_ok=True)
            handler = logging.FileHandler(log_path, mode="a", encoding="utf-8")
            logger.addHandler(_contextual_handler(handler, ERROR_FORMAT))
            logger.propagate = False
        return logger


class FileLogger:
    """
    A named logger writing move records to one file. Rebuilding it on the
    same name closes the previous file first.
    """

    def __init__(self, name: str, path: str, mode: str = "w"):
        self.name = name
        self.path = path
        self.mode = mode
        self.logger = logging.getLogger(name)
        self._setup()

    def _setup(self):
        os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)

        for old in list(self.logger.handlers):
            self.logger.removeHandler(old)
            old.close()

        handler = logging.FileHandler(self.path, mode=self.mode, encoding="utf-8", delay=True)
        self.logger.setLevel(logging.INFO)
        self.logger.addHandler(_contextual_handler(handler, MOVE_FORMAT))
        self.logger.propagate = False

    def get(self):
        return self.logger


class LogManager:
    _accepted_logger = None
    _rejected_logger = None
    _error_logger = None
    _bound_dir: Optional[str] = None

    @classmethod
    def setup_main_logger(cls):
        return BaseLogger.setup_stream_logger()

    @classmethod
    def get_accepted_logger(cls):
        if cls._accepted_logger is None:
            cls._accepted_logger = FileLogger("rewire_accepted", LogConfig.ACCEPTED_LOG_PATH).get()
        return cls._accepted_logger

    @classmethod
    def get_rejected_logger(cls):
        if cls._rejected_logger is None:
            cls._rejected_logger = FileLogger("rewire_rejected", LogConfig.REJECTED_LOG_PATH).get()
        return cls._rejected_logger

    @classmethod
    def bind_run(cls, run_id: str, log_dir: str) -> None:
        """
        Tags later records with run_id and moves the accepted/rejected move
        logs into log_dir. Files there are appended to, so every cell of a
        sweep (and every worker process) lands in the same pair of files.
        Rebinding to the current directory only updates the run id.
        """
        RunContextFilter.run_id = run_id
        log_dir = os.path.abspath(log_dir)
        if cls._bound_dir == log_dir:
            return
        cls._accepted_logger = FileLogger(
            "rewire_accepted", os.path.join(log_dir, LogConfig.ACCEPTED_LOG_NAME), mode="a"
        ).get()
        cls._rejected_logger = FileLogger(
            "rewire_rejected", os.path.join(log_dir, LogConfig.REJECTED_LOG_NAME), mode="a"
        ).get()
        cls._bound_dir = log_dir

    @classmethod
    def bound_dir(cls) -> Optional[str]:
        return cls._bound_dir

    @classmethod
    @contextmanager
    def cell_context(cls, label: str) -> Iterator[None]:
        token = _cell_label.set(label)
        try:
            yield
        finally:
            _cell_label.reset(token)

    @classmethod
    def setup_error_logging(cls, log_path=LogConfig.ERROR_LOG_PATH):
        if cls._error_logger is None:
            cls._error_logger = BaseLogger.setup_error_file_logger(log_path)

        def handle_exception(exc_type, exc_value, exc_traceback):
            if issubclass(exc_type, KeyboardInterrupt):
                sys.__excepthook__(exc_type, exc_value, exc_traceback)
                return
            cls._error_logger.error("Unhandled exception", exc_info=(exc_type, exc_value, exc_traceback))

        sys.excepthook = handle_exception
        return cls._error_logger
