"""Procedurally composed, textured and augmented shapes rendered from many views."""
from .config import Config
from .errors import BooleanFailure, InvalidConfig, InvalidInput, InvalidParameter, ZeroverseError

__version__ = "0.1.0"

__all__ = ["BooleanFailure", "Config", "InvalidConfig", "InvalidInput", "InvalidParameter", "ZeroverseError"]
