"""Linear program models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..errors import InvalidArgumentError


class LpStatus(str, Enum):
    """Outcome of an LP solve."""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LinearProgram:
    """
    min c.x  subject to  A x = r,  0 <= x <= u.

    Upper bounds may be +inf for unbounded variables.
    """
    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    upper_bounds: np.ndarray
    name: str = ""

    def __post_init__(self):
        objective = np.array(self.objective, dtype=float).reshape(-1)
        eq_rhs = np.array(self.eq_rhs, dtype=float).reshape(-1)
        eq_matrix = np.array(self.eq_matrix, dtype=float)
        if eq_matrix.size == 0:
            eq_matrix = eq_matrix.reshape(eq_rhs.shape[0], objective.shape[0])
        upper_bounds = np.array(self.upper_bounds, dtype=float).reshape(-1)

        if eq_matrix.ndim != 2:
            raise InvalidArgumentError(f"eq_matrix must be 2-dimensional, got shape {eq_matrix.shape}")
        if eq_matrix.shape[1] != objective.shape[0]:
            raise InvalidArgumentError(
                f"eq_matrix has {eq_matrix.shape[1]} columns but objective has {objective.shape[0]} entries"
            )
        if eq_matrix.shape[0] != eq_rhs.shape[0]:
            raise InvalidArgumentError(
                f"eq_matrix has {eq_matrix.shape[0]} rows but eq_rhs has {eq_rhs.shape[0]} entries"
            )
        if upper_bounds.shape[0] != objective.shape[0]:
            raise InvalidArgumentError(
                f"upper_bounds has {upper_bounds.shape[0]} entries but objective has {objective.shape[0]}"
            )
        if np.any(np.isnan(upper_bounds)) or np.any(upper_bounds < 0):
            raise InvalidArgumentError("upper bounds must be nonnegative")
        if not (np.all(np.isfinite(objective)) and np.all(np.isfinite(eq_matrix)) and np.all(np.isfinite(eq_rhs))):
            raise InvalidArgumentError("objective, eq_matrix and eq_rhs must be finite")

        for name, value in (
            ("objective", objective),
            ("eq_matrix", eq_matrix),
            ("eq_rhs", eq_rhs),
            ("upper_bounds", upper_bounds),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def variable_count(self) -> int:
        return int(self.objective.shape[0])

    @property
    def constraint_count(self) -> int:
        return int(self.eq_rhs.shape[0])


@dataclass
class LpSolution:
    """Result of solving a LinearProgram."""
    status: LpStatus
    values: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    iterations: int = 0
    wall_time: float = 0.0
    backend: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "status": self.status.value,
            "values": self.values.tolist() if self.values is not None else None,
            "objective_value": self.objective_value,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "backend": self.backend,
        }
