"""FastAPI application and routes."""

from .app import app

__all__ = ["app"]
