"""FastAPI service exposing the model store, comparisons and analyses."""

from .app import app, create_app

__all__ = ["app", "create_app"]
