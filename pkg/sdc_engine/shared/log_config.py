import logging
import os

LOG_FORMAT = "[%(name)s] %(levelname)s %(message)s"


def configure_logging(level: str | int | None = None) -> None:
    """Configure the sdc_engine logger tree once (CLI entry point only)."""
    if level is None:
        level = os.getenv("SDC_LOG_LEVEL", "WARNING")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING

    root = logging.getLogger("sdc_engine")
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(level)
