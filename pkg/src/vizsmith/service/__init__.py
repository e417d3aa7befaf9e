"""HTTP service: session store plus the FastAPI application factory."""

from vizsmith.service.app import ServiceSettings, create_app
from vizsmith.service.sessions import Session, SessionStore, Visualization

__all__ = [
    "ServiceSettings",
    "Session",
    "SessionStore",
    "Visualization",
    "create_app",
]
