"""Interactive annotation over HTTP: sessions, label batches, progress views."""

from .app import create_app
from .manager import Session, SessionManager, pca_2d

__all__ = ["create_app", "Session", "SessionManager", "pca_2d"]
