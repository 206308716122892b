"""Service layer: FastAPI app plus the request/response models."""

from .app import app

__all__ = ["app"]
