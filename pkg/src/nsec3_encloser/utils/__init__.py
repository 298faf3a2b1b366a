from .exceptions import ForgeError
from .logging_config import setup_logging

__all__ = ["ForgeError", "setup_logging"]
