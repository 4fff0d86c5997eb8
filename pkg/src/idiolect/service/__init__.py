from .app import create_app, serve
from .core import ServiceCore, ServiceError

__all__ = ["create_app", "serve", "ServiceCore", "ServiceError"]
