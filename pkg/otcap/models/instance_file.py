"""Pydantic schema for instance JSON files."""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Matrix = List[List[float]]
# null capacity entries mean "no bound"
CapacityMatrix = List[List[Optional[float]]]


class InstanceFile(BaseModel):
    """
    On-disk instance document.

    costs and capacities are either one n x m matrix (shared by every step)
    or a list of N such matrices. sparsity is either one budget per source or
    one such vector per step.
    """
    model_config = ConfigDict(extra="forbid")

    a: List[float]
    b: List[float]
    costs: Union[List[Matrix], Matrix]
    capacities: Optional[Union[List[CapacityMatrix], CapacityMatrix]] = None
    sparsity: Optional[Union[List[List[int]], List[int]]] = None
    steps: int = Field(default=1, ge=1)
    seed: Optional[int] = None
    kind: Optional[str] = None
    points_a: Optional[List[List[float]]] = None
    points_b: Optional[List[List[float]]] = None
    meta: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("a", "b")
    @classmethod
    def _nonnegative(cls, v: List[float]) -> List[float]:
        for i, w in enumerate(v):
            if w < 0:
                raise ValueError(f"entry {i} is negative ({w})")
        return v

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def m(self) -> int:
        return len(self.b)

    def cost_stack(self) -> List[Matrix]:
        """Per-step cost matrices, length N."""
        if _is_matrix(self.costs):
            return [self.costs] * self.steps  # type: ignore[list-item]
        return list(self.costs)  # type: ignore[arg-type]

    def capacity_stack(self) -> Optional[List[CapacityMatrix]]:
        """Per-step capacity matrices, length N, or None when absent."""
        if self.capacities is None:
            return None
        if _is_matrix(self.capacities):
            return [self.capacities] * self.steps  # type: ignore[list-item]
        return list(self.capacities)  # type: ignore[arg-type]

    def sparsity_stack(self) -> Optional[List[List[int]]]:
        """Per-step sparsity vectors, length N, or None when absent."""
        if self.sparsity is None:
            return None
        if self.sparsity and isinstance(self.sparsity[0], list):
            return list(self.sparsity)  # type: ignore[arg-type]
        return [list(self.sparsity)] * self.steps  # type: ignore[arg-type]

    @model_validator(mode="after")
    def _check_shapes(self) -> "InstanceFile":
        n, m, steps = self.n, self.m, self.steps

        costs = self.cost_stack()
        if len(costs) != steps:
            raise ValueError(f"costs: expected {steps} matrices, got {len(costs)}")
        for i, matrix in enumerate(costs):
            _check_matrix(matrix, n, m, f"costs[{i}]")

        capacities = self.capacity_stack()
        if capacities is not None:
            if len(capacities) != steps:
                raise ValueError(f"capacities: expected {steps} matrices, got {len(capacities)}")
            for i, matrix in enumerate(capacities):
                _check_matrix(matrix, n, m, f"capacities[{i}]")

        sparsity = self.sparsity_stack()
        if sparsity is not None:
            if len(sparsity) != steps:
                raise ValueError(f"sparsity: expected {steps} vectors, got {len(sparsity)}")
            for i, vector in enumerate(sparsity):
                if len(vector) != n:
                    raise ValueError(f"sparsity[{i}]: expected {n} entries, got {len(vector)}")
                for j, s in enumerate(vector):
                    if not 1 <= s <= m:
                        raise ValueError(f"sparsity[{i}][{j}]: {s} not in [1, {m}]")
        return self


def _is_matrix(value: Any) -> bool:
    """A list of rows of numbers, as opposed to a list of matrices."""
    return bool(value) and isinstance(value[0], list) and (
        not value[0] or not isinstance(value[0][0], list)
    )


def _check_matrix(matrix: List[List[Any]], n: int, m: int, name: str) -> None:
    if len(matrix) != n:
        raise ValueError(f"{name}: expected {n} rows, got {len(matrix)}")
    for j, row in enumerate(matrix):
        if len(row) != m:
            raise ValueError(f"{name}[{j}]: expected {m} columns, got {len(row)}")
        for k, value in enumerate(row):
            if value is not None and value < 0:
                raise ValueError(f"{name}[{j}][{k}]: negative entry {value}")
