"""LP backends for otcap."""

from .base import (
    BaseLpBackend,
    available_backends,
    check_feasible,
    get_backend,
    register_backend,
    solve_lp,
)
from .simplex import BoundedSimplexBackend
from .highs import HighsBackend, HighsDualSimplexBackend, HighsInteriorPointBackend

__all__ = [
    "BaseLpBackend",
    "BoundedSimplexBackend",
    "HighsBackend",
    "HighsDualSimplexBackend",
    "HighsInteriorPointBackend",
    "available_backends",
    "check_feasible",
    "get_backend",
    "register_backend",
    "solve_lp",
]
