"""Measure, cost and plan models."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..errors import InvalidArgumentError


def _frozen_array(values: Any, ndim: int, name: str) -> np.ndarray:
    """Copy values into a read-only float64 array of the given rank."""
    array = np.array(values, dtype=float)
    if array.size == 0:
        array = array.reshape((0,) * ndim) if ndim > 1 else array.reshape(0)
    if array.ndim != ndim:
        raise InvalidArgumentError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} must contain finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finite nonnegative measure, optionally carrying support points."""
    weights: np.ndarray
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        weights = _frozen_array(self.weights, 1, "weights")
        if np.any(weights < 0):
            raise InvalidArgumentError("weights must be nonnegative")
        object.__setattr__(self, "weights", weights)

        if self.points is not None:
            points = np.array(self.points, dtype=float)
            if points.ndim == 1:
                points = points.reshape(-1, 1)
            if points.shape[0] != weights.shape[0]:
                raise InvalidArgumentError(
                    f"points has {points.shape[0]} entries but weights has {weights.shape[0]}"
                )
            points.setflags(write=False)
            object.__setattr__(self, "points", points)

    @classmethod
    def from_points(
        cls,
        points: Sequence[Any],
        weights: Optional[Sequence[float]] = None
    ) -> "DiscreteMeasure":
        """Build a measure on points; uniform probability weights when omitted."""
        count = len(points)
        if weights is None:
            weights = np.full(count, 1.0 / count) if count else np.zeros(0)
        return cls(weights=np.asarray(weights, dtype=float), points=np.asarray(points, dtype=float))

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def is_probability(self, tol: float = 1e-9) -> bool:
        """Check whether the weights sum to one."""
        return abs(self.mass - 1.0) <= tol

    def normalized(self) -> "DiscreteMeasure":
        """Return the probability measure with the same shape."""
        if self.mass <= 0:
            raise InvalidArgumentError("cannot normalize a measure with zero mass")
        return DiscreteMeasure(weights=self.weights / self.mass, points=self.points)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        result: Dict[str, Any] = {"weights": self.weights.tolist()}
        if self.points is not None:
            result["points"] = self.points.tolist()
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteMeasure":
        """Create from dictionary representation."""
        return cls(weights=np.asarray(data.get("weights", []), dtype=float), points=data.get("points"))


@dataclass(frozen=True)
class CostMatrix:
    """Per-unit transport costs between n sources and m sinks."""
    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_array(self.entries, 2, "cost matrix")
        if np.any(entries < 0):
            raise InvalidArgumentError("cost entries must be nonnegative")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    def to_list(self) -> List[List[float]]:
        return self.entries.tolist()


@dataclass(frozen=True)
class TransportPlan:
    """A nonnegative n x m matrix of transported mass."""
    entries: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2:
            raise InvalidArgumentError(f"plan must be 2-dimensional, got shape {entries.shape}")
        # LP output may carry -1e-12 style noise; anything below that is a real error
        if np.any(entries < -1e-7):
            raise InvalidArgumentError("plan entries must be nonnegative")
        entries = np.maximum(entries, 0.0)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    @property
    def l1_row_norms(self) -> np.ndarray:
        return np.abs(self.entries).sum(axis=1)

    def cost(self, costs: "CostMatrix") -> float:
        """Frobenius inner product with a cost matrix."""
        return float(np.sum(costs.entries * self.entries))

    def nnz_per_row(self, tol: float = 1e-9) -> np.ndarray:
        """Count entries above tol in every row."""
        return (self.entries > tol).sum(axis=1)

    def to_list(self) -> List[List[float]]:
        return self.entries.tolist()
