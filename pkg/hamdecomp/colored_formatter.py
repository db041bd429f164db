#!/usr/bin/env python
"""Colored logging formatter for hamdecomp.

Log level names are coloured by severity. Records emitted by the pipeline
carry a ``stage`` attribute (``logger.info(..., extra={"stage": "split"})``);
those get a coloured ``[stage]`` tag in front of the message.
"""

import logging
import os
import sys

from colorama import Fore, Style, init

# strip=False keeps colours when output is redirected and FORCE_COLOR is set
init(autoreset=True, strip=False)


class ColoredFormatter(logging.Formatter):
    """Formatter that colours level names and pipeline stage tags.

    - ERROR: Bright Red
    - WARNING: Bright Yellow
    - INFO: Green
    - DEBUG: Cyan
    - stage tags: Magenta
    """

    COLORS = {
        logging.ERROR: Fore.RED + Style.BRIGHT,
        logging.WARNING: Fore.YELLOW + Style.BRIGHT,
        logging.INFO: Fore.GREEN,
        logging.DEBUG: Fore.CYAN,
    }
    STAGE_COLOR = Fore.MAGENTA

    def format(self, record: logging.LogRecord) -> str:
        """Format the log record with colours and an optional stage tag.

        Args:
            record: The log record to format.

        Returns:
            Formatted log line.
        """
        use_colors = self.colors_enabled()
        color = self.COLORS.get(record.levelno, "") if use_colors else ""

        original_levelname = record.levelname
        original_msg = record.msg
        original_args = record.args

        if color:
            record.levelname = f"{color}{record.levelname}{Style.RESET_ALL}"

        stage = getattr(record, "stage", None)
        if stage:
            tag = f"[{stage}]"
            if use_colors:
                tag = f"{self.STAGE_COLOR}{tag}{Style.RESET_ALL}"
            record.msg = f"{tag} {record.getMessage()}"
            record.args = None

        try:
            return super().format(record)
        finally:
            # records may be handled by several handlers
            record.levelname = original_levelname
            record.msg = original_msg
            record.args = original_args

    @classmethod
    def colors_enabled(cls) -> bool:
        """Decide whether colour codes should be emitted.

        ``NO_COLOR`` wins over ``FORCE_COLOR``; otherwise colours are used only
        on a TTY that is not a dumb terminal.

        Returns:
            True when colour codes should be emitted.
        """
        if os.environ.get("NO_COLOR", "").lower() in ("1", "true", "yes"):
            return False
        if os.environ.get("FORCE_COLOR", "").lower() in ("1", "true", "yes"):
            return True
        return cls._should_use_colors()

    @staticmethod
    def _should_use_colors() -> bool:
        """Check terminal capabilities.

        Returns:
            True if stdout is a TTY and not a dumb terminal.
        """
        if not hasattr(sys.stdout, "isatty") or not sys.stdout.isatty():
            return False
        return os.environ.get("TERM", "") != "dumb"


def configure_logging(level: int = logging.WARNING) -> logging.Handler:
    """Install a single colored stream handler on the root logger.

    Args:
        level: Root logger level.

    Returns:
        The installed handler.
    """
    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "_hamdecomp", False):
            root.removeHandler(existing)
    handler = logging.StreamHandler()
    handler.setFormatter(ColoredFormatter("%(levelname)s: %(message)s"))
    handler._hamdecomp = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(level)
    return handler
