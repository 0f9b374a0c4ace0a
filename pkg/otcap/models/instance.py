"""Problem instance and solution models."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidArgumentError
from .measure import CostMatrix, DiscreteMeasure, TransportPlan

MASS_TOL = 1e-9


def masses_match(a: DiscreteMeasure, b: DiscreteMeasure, tol: float = MASS_TOL) -> bool:
    """Equal total mass within tol, measured relative to the larger mass."""
    scale = max(a.mass, b.mass, 1.0)
    return abs(a.mass - b.mass) <= tol * scale


@dataclass(frozen=True)
class CapacityInstance:
    """Marginals, per-step costs C^i and per-step capacities M^i over N steps."""
    a: DiscreteMeasure
    b: DiscreteMeasure
    costs: Tuple[CostMatrix, ...]
    capacities: Tuple[np.ndarray, ...]

    def __post_init__(self):
        costs = tuple(c if isinstance(c, CostMatrix) else CostMatrix(c) for c in self.costs)
        shape = (self.a.size, self.b.size)
        if not costs:
            raise InvalidArgumentError("at least one time step is required")
        if len(self.capacities) != len(costs):
            raise InvalidArgumentError(
                f"got {len(costs)} cost matrices but {len(self.capacities)} capacity matrices"
            )

        capacities = []
        for i, (cost, cap) in enumerate(zip(costs, self.capacities), 1):
            if cost.shape != shape:
                raise InvalidArgumentError(f"cost matrix {i} has shape {cost.shape}, expected {shape}")
            cap = np.array(cap, dtype=float)
            if cap.shape != shape:
                raise InvalidArgumentError(f"capacity matrix {i} has shape {cap.shape}, expected {shape}")
            if np.any(np.isnan(cap)) or np.any(cap < 0):
                raise InvalidArgumentError(f"capacity matrix {i} must be nonnegative")
            cap.setflags(write=False)
            capacities.append(cap)

        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "capacities", tuple(capacities))

    @classmethod
    def constant(
        cls,
        a: DiscreteMeasure,
        b: DiscreteMeasure,
        cost: Any,
        capacity: Any,
        steps: int
    ) -> "CapacityInstance":
        """Instance whose cost and capacity are the same at every step."""
        if steps < 1:
            raise InvalidArgumentError("steps must be at least 1")
        cost = cost if isinstance(cost, CostMatrix) else CostMatrix(cost)
        capacity = np.array(capacity, dtype=float)
        return cls(a=a, b=b, costs=(cost,) * steps, capacities=(capacity,) * steps)

    @property
    def steps(self) -> int:
        return len(self.costs)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.a.size, self.b.size)

    @property
    def is_constant(self) -> bool:
        """True when every C^i and every M^i equal the first step's."""
        first_cost = self.costs[0].entries
        first_cap = self.capacities[0]
        return all(
            np.array_equal(c.entries, first_cost) and np.array_equal(m, first_cap)
            for c, m in zip(self.costs[1:], self.capacities[1:])
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "a": self.a.weights.tolist(),
            "b": self.b.weights.tolist(),
            "steps": self.steps,
            "costs": [c.to_list() for c in self.costs],
            "capacities": [m.tolist() for m in self.capacities],
        }


@dataclass(frozen=True)
class SparsityInstance:
    """Single-step transport with a nonzero budget s_j per source row."""
    a: DiscreteMeasure
    b: DiscreteMeasure
    cost: CostMatrix
    sparsity: Tuple[int, ...]

    def __post_init__(self):
        cost = self.cost if isinstance(self.cost, CostMatrix) else CostMatrix(self.cost)
        object.__setattr__(self, "cost", cost)
        if cost.shape != (self.a.size, self.b.size):
            raise InvalidArgumentError(
                f"cost matrix has shape {cost.shape}, expected {(self.a.size, self.b.size)}"
            )
        sparsity = tuple(int(s) for s in self.sparsity)
        if len(sparsity) != self.a.size:
            raise InvalidArgumentError(f"sparsity has {len(sparsity)} entries, expected {self.a.size}")
        m = self.b.size
        for j, s in enumerate(sparsity):
            if not 1 <= s <= m:
                raise InvalidArgumentError(f"sparsity[{j}] = {s} must lie in [1, {m}]")
        object.__setattr__(self, "sparsity", sparsity)
        if not masses_match(self.a, self.b):
            raise InvalidArgumentError(
                f"total masses differ: {self.a.mass} vs {self.b.mass}"
            )

    @classmethod
    def uniform(
        cls,
        a: DiscreteMeasure,
        b: DiscreteMeasure,
        cost: Any,
        s: int
    ) -> "SparsityInstance":
        """Same budget s for every source row."""
        return cls(a=a, b=b, cost=cost, sparsity=(s,) * a.size)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.a.size, self.b.size)


@dataclass(frozen=True)
class TimeExpandedPlan:
    """Per-step plans gamma^1..gamma^N, their aggregate F and total cost."""
    gammas: Tuple[TransportPlan, ...]
    aggregate: TransportPlan
    cost: float
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def from_steps(
        cls,
        gammas: Sequence[TransportPlan],
        costs: Sequence[CostMatrix],
        metadata: Optional[Dict[str, Any]] = None
    ) -> "TimeExpandedPlan":
        """Assemble from per-step plans, summing the aggregate and the cost."""
        gammas = tuple(gammas)
        aggregate = TransportPlan(np.sum([g.entries for g in gammas], axis=0))
        cost = float(sum(g.cost(c) for g, c in zip(gammas, costs)))
        return cls(gammas=gammas, aggregate=aggregate, cost=cost, metadata=metadata or {})

    @property
    def steps(self) -> int:
        return len(self.gammas)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "cost": self.cost,
            "aggregate": self.aggregate.to_list(),
            "gammas": [g.to_list() for g in self.gammas],
            "metadata": self.metadata,
        }


@dataclass
class FeasibilityReport:
    """Necessary-condition violations found by the capacity screen (1-based indices)."""
    row_violations: List[int] = field(default_factory=list)
    col_violations: List[int] = field(default_factory=list)
    capacity_shortfall: Dict[str, List[int]] = field(
        default_factory=lambda: {"sources": [], "sinks": []}
    )

    @property
    def is_empty(self) -> bool:
        return not (
            self.row_violations
            or self.col_violations
            or self.capacity_shortfall["sources"]
            or self.capacity_shortfall["sinks"]
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "row_violations": self.row_violations,
            "col_violations": self.col_violations,
            "capacity_shortfall": self.capacity_shortfall,
        }


@dataclass(frozen=True)
class ImportanceScore:
    """Entry scores where higher means more likely nonzero in the sparse optimum."""
    scores: np.ndarray
    surrogate_id: int = 0  # 0 for externally supplied scores
    lambda_: Optional[float] = None

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        if scores.ndim != 2:
            raise InvalidArgumentError("scores must be 2-dimensional")
        if not np.all(np.isfinite(scores)):
            raise InvalidArgumentError("scores must be finite")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)


@dataclass(frozen=True)
class SupportPattern:
    """Selected columns per row; entries outside the selection are forced to zero."""
    columns: Tuple[Tuple[int, ...], ...]
    m: int

    @property
    def mask(self) -> np.ndarray:
        mask = np.zeros((len(self.columns), self.m), dtype=bool)
        for j, cols in enumerate(self.columns):
            mask[j, list(cols)] = True
        return mask

    def score(self, importance: ImportanceScore) -> float:
        return float(sum(importance.scores[j, list(cols)].sum() for j, cols in enumerate(self.columns)))

    def to_dict(self) -> Dict[str, Any]:
        return {"columns": [list(c) for c in self.columns]}


@dataclass
class SparseResult:
    """Outcome of a sparse solve (heuristic or oracle)."""
    plan: TransportPlan
    cost: float
    attempts: int
    pattern: SupportPattern
    wall_time: float = 0.0
    method: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "method": self.method,
            "cost": self.cost,
            "attempts": self.attempts,
            "pattern": self.pattern.to_dict(),
            "plan": self.plan.to_list(),
            "wall_time": self.wall_time,
        }


@dataclass
class BaselineSample:
    """One random support pattern and its restricted-LP cost (None if infeasible)."""
    pattern: SupportPattern
    cost: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return self.cost is not None

    def to_dict(self) -> Dict[str, Any]:
        return {"pattern": self.pattern.to_dict(), "cost": self.cost, "feasible": self.feasible}
