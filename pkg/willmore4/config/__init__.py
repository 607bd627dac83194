from .settings import (
    EngineConfig,
    get_engine_config,
    reset_engine_config,
    VALID_FD_ORDERS,
)

__all__ = [
    "EngineConfig",
    "get_engine_config",
    "reset_engine_config",
    "VALID_FD_ORDERS",
]
