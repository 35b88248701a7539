"""Live-shift HTTP service (the communication interface for the console)."""

from .app import create_app
from .live import LiveShift

__all__ = ["create_app", "LiveShift"]
