# app/core/settings.py
import logging
import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

LOG_LEVEL = os.getenv("LSE_LOG_LEVEL", "INFO").upper()
MAX_WORKERS = int(os.getenv("LSE_MAX_WORKERS", "1"))
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Configure root logging once for command-line use"""
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
