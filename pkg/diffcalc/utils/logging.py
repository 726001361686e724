import os
import logging
from logging.handlers import RotatingFileHandler

from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler

EVENTS_LEVEL_NUM = 38
DEFAULT_LOG_BACKUP_COUNT = 10

PACKAGE_LOGGER = "diffcalc"


def setup_logging(debug: bool = False, trace: bool = False) -> logging.Logger:
    """Route the package logger to stderr through rich; idempotent."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(logging.DEBUG if debug or trace else logging.INFO)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=debug,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
    logger.propagate = False
    return logger


class EventLog(logging.LoggerAdapter):
    """
    Append-only record of reductions, equality checks, theorem checks and
    suite summaries.

    Each record is one line: timestamp, ``EVENT``, the event kind and the
    pydantic payload as JSON.
    """

    def process(self, msg, kwargs):
        return msg, kwargs

    def record(self, kind: str, payload: BaseModel) -> None:
        self.log(EVENTS_LEVEL_NUM, payload.model_dump_json(), extra={"kind": kind})

    def flush(self) -> None:
        for handler in self.logger.handlers:
            handler.flush()


def setup_events_logger(full_path: str, events_retention_size: int) -> EventLog:
    """Events log rotating at ``events_retention_size`` bytes under ``full_path``."""
    logging.addLevelName(EVENTS_LEVEL_NUM, "EVENT")

    logger = logging.getLogger(f"{PACKAGE_LOGGER}.event")
    logger.setLevel(EVENTS_LEVEL_NUM)
    logger.propagate = False

    path = os.path.abspath(os.path.join(full_path, "events.log"))
    if not any(getattr(h, "baseFilename", None) == path for h in logger.handlers):
        file_handler = RotatingFileHandler(
            path,
            maxBytes=events_retention_size,
            backupCount=DEFAULT_LOG_BACKUP_COUNT,
        )
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s | %(levelname)s | %(kind)s | %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
                defaults={"kind": "note"},
            )
        )
        file_handler.setLevel(EVENTS_LEVEL_NUM)
        logger.addHandler(file_handler)

    return EventLog(logger, {})
