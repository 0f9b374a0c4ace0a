"""LP backend interface and registry."""

from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional
import logging

import numpy as np

from ..errors import InvalidArgumentError
from ..models.config import SolverConfig
from ..models.lp import LinearProgram, LpSolution, LpStatus

logger = logging.getLogger(__name__)


class BaseLpBackend(ABC):
    """
    Base class for LP backends.

    A backend turns a LinearProgram into an LpSolution. Infeasible,
    unbounded and iteration-capped outcomes are reported through the
    solution status; only malformed input raises.
    """

    name: str = ""

    def __init__(self, config: Optional[SolverConfig] = None):
        """
        Initialize the backend.

        Args:
            config: Solver tolerances and limits
        """
        self.config = config or SolverConfig()

    @abstractmethod
    def solve(self, lp: LinearProgram) -> LpSolution:
        """
        Solve the LP to optimality.

        Returns:
            LpSolution; values and objective_value are set iff status is OPTIMAL
        """
        pass

    def check_feasible(self, lp: LinearProgram) -> bool:
        """
        Decide whether the feasible set is nonempty.

        The default solves the LP with a zero objective.
        """
        zero_cost = LinearProgram(
            objective=np.zeros(lp.variable_count),
            eq_matrix=lp.eq_matrix,
            eq_rhs=lp.eq_rhs,
            upper_bounds=lp.upper_bounds,
            name=f"{lp.name}:feasibility",
        )
        return self.solve(zero_cost).status == LpStatus.OPTIMAL

    def verify(self, lp: LinearProgram, solution: LpSolution) -> List[str]:
        """
        Re-check an optimal solution against the LP.

        Returns:
            List of violation messages (empty when the solution checks out)
        """
        if not solution.is_optimal or solution.values is None:
            return []

        tol = self.config.feas_tol
        x = solution.values
        problems = []

        scale = max(1.0, float(np.max(np.abs(lp.eq_rhs), initial=0.0)))
        residual = np.max(np.abs(lp.eq_matrix @ x - lp.eq_rhs), initial=0.0)
        if residual > tol * scale:
            problems.append(f"equality residual {residual:.3e} exceeds {tol:.1e}")
        if np.any(x < -tol):
            problems.append(f"lower bound violated by {-x.min():.3e}")
        over = x - lp.upper_bounds
        if np.any(over > tol):
            problems.append(f"upper bound violated by {over.max():.3e}")
        recomputed = float(lp.objective @ x)
        if abs(recomputed - solution.objective_value) > 1e-9 * max(1.0, abs(recomputed)):
            problems.append(
                f"objective {solution.objective_value} does not match c.x = {recomputed}"
            )
        return problems


_BACKENDS: Dict[str, Callable[[SolverConfig], BaseLpBackend]] = {}


def register_backend(name: str, factory: Callable[[SolverConfig], BaseLpBackend]) -> None:
    """Register a backend factory under a name."""
    _BACKENDS[name] = factory


def available_backends() -> List[str]:
    return sorted(_BACKENDS)


def get_backend(config: Optional[SolverConfig] = None) -> BaseLpBackend:
    """Create the backend named by config.backend."""
    config = config or SolverConfig()
    factory = _BACKENDS.get(config.backend)
    if factory is None:
        raise InvalidArgumentError(
            f"unknown LP backend '{config.backend}'; available: {', '.join(available_backends())}"
        )
    return factory(config)


def solve_lp(lp: LinearProgram, config: Optional[SolverConfig] = None) -> LpSolution:
    """Solve an LP with the configured backend."""
    backend = get_backend(config)
    solution = backend.solve(lp)
    if solution.status == LpStatus.ITERATION_LIMIT:
        logger.warning(f"LP {lp.name or '<unnamed>'} hit the iteration limit after {solution.iterations} iterations")
    return solution


def check_feasible(lp: LinearProgram, config: Optional[SolverConfig] = None) -> bool:
    """True iff the LP's feasible set is nonempty."""
    return get_backend(config).check_feasible(lp)
