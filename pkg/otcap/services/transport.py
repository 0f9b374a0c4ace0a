"""Kantorovich transport and discrete Wasserstein distances."""

import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import InfeasibleInstanceError, InvalidArgumentError, SolverError
from ..models.config import SolverConfig
from ..models.instance import masses_match
from ..models.lp import LinearProgram, LpSolution, LpStatus
from ..models.measure import CostMatrix, DiscreteMeasure, TransportPlan
from ..solvers import solve_lp
from .measures import scale

logger = logging.getLogger(__name__)

Metric = Union[str, Callable[[np.ndarray, np.ndarray], float]]


def marginal_constraints(n: int, m: int) -> np.ndarray:
    """
    Row-sum and column-sum equalities over a row-major n x m plan.

    Rows 0..n-1 fix source masses, rows n..n+m-1 fix sink masses.
    """
    rows = np.kron(np.eye(n), np.ones((1, m)))
    cols = np.kron(np.ones((1, n)), np.eye(m))
    return np.vstack([rows, cols])


def transport_lp(
    a: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    upper: Optional[np.ndarray] = None,
    name: str = "transport"
) -> LinearProgram:
    """LP for min <C, P> over couplings of a and b with optional entrywise bounds."""
    n, m = cost.shape
    if upper is None:
        upper = np.full((n, m), np.inf)
    return LinearProgram(
        objective=np.asarray(cost, dtype=float).reshape(-1),
        eq_matrix=marginal_constraints(n, m),
        eq_rhs=np.concatenate([a, b]),
        upper_bounds=np.asarray(upper, dtype=float).reshape(-1),
        name=name,
    )


def raise_for_status(solution: LpSolution, what: str) -> None:
    """Convert a non-optimal LP status into the matching exception."""
    if solution.status == LpStatus.OPTIMAL:
        return
    if solution.status == LpStatus.INFEASIBLE:
        raise InfeasibleInstanceError(f"{what} is infeasible")
    raise SolverError(f"{what}: LP solve ended with status {solution.status.value}", solution.status)


def solve_kantorovich(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    C: CostMatrix,
    config: Optional[SolverConfig] = None
) -> Tuple[TransportPlan, float]:
    """
    Unconstrained optimal coupling of a and b under cost C.

    Returns:
        (plan, cost) where cost is the LP optimum <C, plan>
    """
    if C.shape != (a.size, b.size):
        raise InvalidArgumentError(f"cost matrix has shape {C.shape}, expected {(a.size, b.size)}")
    if not masses_match(a, b):
        raise InvalidArgumentError(f"total masses differ: {a.mass} vs {b.mass}")

    lp = transport_lp(a.weights, b.weights, C.entries, name="kantorovich")
    solution = solve_lp(lp, config)
    raise_for_status(solution, "Kantorovich problem")

    plan = TransportPlan(solution.values.reshape(C.shape))
    logger.debug(f"Kantorovich {a.size}x{b.size}: cost {solution.objective_value:.9g}")
    return plan, float(solution.objective_value)


def ground_cost(x: np.ndarray, y: np.ndarray, p: float, metric: Metric = "euclidean") -> np.ndarray:
    """Matrix of d(x_j, y_k)^p."""
    if callable(metric):
        distances = np.array([[metric(xj, yk) for yk in y] for xj in x], dtype=float)
    else:
        distances = cdist(x, y, metric=metric)
    return distances ** p


def wasserstein_distance(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    p: float = 1.0,
    metric: Metric = "euclidean",
    config: Optional[SolverConfig] = None
) -> float:
    """
    p-Wasserstein distance between two probability measures with support points.

    Args:
        metric: scipy cdist metric name or a callable d(x, y)
    """
    if p < 1:
        raise InvalidArgumentError(f"p must be at least 1, got {p}")
    if mu.points is None or nu.points is None:
        raise InvalidArgumentError("both measures need support points")
    if mu.points.shape[1] != nu.points.shape[1]:
        raise InvalidArgumentError("support points live in different dimensions")
    if not (mu.is_probability() and nu.is_probability()):
        raise InvalidArgumentError(
            f"measures must have unit mass, got {mu.mass} and {nu.mass}"
        )

    cost = CostMatrix(ground_cost(mu.points, nu.points, p, metric))
    _, value = solve_kantorovich(mu, nu, cost, config)
    return float(max(value, 0.0) ** (1.0 / p))


def scaling_check(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    C: CostMatrix,
    c: float,
    config: Optional[SolverConfig] = None
) -> Tuple[float, float]:
    """
    Optimal cost of (a, b, C) and of (a/c, b/c, C).

    The second equals the first divided by c.
    """
    _, cost = solve_kantorovich(a, b, C, config)
    _, scaled_cost = solve_kantorovich(scale(a, c), scale(b, c), C, config)
    return cost, scaled_cost
