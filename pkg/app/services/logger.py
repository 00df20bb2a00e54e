"""
Logging service for the application.
"""
import logging
from typing import Optional, TextIO

from app.config.settings import LOG_FORMAT, LOG_LEVEL


def setup_logger(name="transmon"):
    """Setup and return a logger instance."""
    # Configure the root logger; handlers go to stderr so stdout stays machine-readable
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)

    logger = logging.getLogger(name)
    return logger


# Create a singleton logger instance
logger = setup_logger()


class StatusLogger:
    """
    A wrapper class for logging to both the logger and a text stream.
    The CLI hands it stdout for report lines; services hand it nothing.
    """
    def __init__(self, stream: Optional[TextIO] = None):
        self.stream = stream
        self.logger = logger

    def info(self, message):
        """Log info message to both logger and stream if available."""
        self.logger.info(message)
        if self.stream:
            self.stream.write(f"{message}\n")

    def warning(self, message):
        """Log warning message to both logger and stream if available."""
        self.logger.warning(message)
        if self.stream:
            self.stream.write(f"WARNING: {message}\n")

    def error(self, message, exc_info=False):
        """Log error message to both logger and stream if available."""
        self.logger.error(message, exc_info=exc_info)
        if self.stream:
            self.stream.write(f"ERROR: {message}\n")

    def update(self, label=None, done=None, total=None):
        """Log a progress label, with a counter when both done and total are given."""
        if not label:
            return
        if done is not None and total:
            label = f"[{done}/{total}] {label}"
        self.logger.info(label)

