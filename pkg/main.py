# main.py

import logging
import os
import sys
from typing import Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# ============================================================================
# LOGGING CONFIGURATION
# ============================================================================

# Level from the environment; --log-level overrides it per run.
# Handlers write to stderr so stdout carries only CSV/JSON.
log_level = os.getenv("UNIVOQUE_LOG_LEVEL", os.getenv("LOG_LEVEL", "INFO")).upper()
logging.basicConfig(
    level=getattr(logging, log_level, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

# Suppress verbose logging from numeric libraries
logging.getLogger("sympy").setLevel(logging.WARNING)
logging.getLogger("matplotlib").setLevel(logging.WARNING)
logging.getLogger("numexpr").setLevel(logging.WARNING)

from cli.commands import run  # noqa: E402


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point of the `univoque` command."""
    try:
        return run(argv)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
