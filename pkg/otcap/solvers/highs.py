"""scipy HiGHS backends, for comparisons against external solvers."""

import logging
import time

import numpy as np

from ..errors import SolverError
from ..models.lp import LinearProgram, LpSolution, LpStatus
from .base import BaseLpBackend, register_backend

logger = logging.getLogger(__name__)

# scipy.optimize.linprog status codes; 4 (numerical difficulties) is not listed
_STATUS = {
    0: LpStatus.OPTIMAL,
    1: LpStatus.ITERATION_LIMIT,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
}


class HighsBackend(BaseLpBackend):
    """Adapter from LinearProgram to scipy.optimize.linprog; HiGHS picks the algorithm."""

    name = "highs"
    method = "highs"

    def solve(self, lp: LinearProgram) -> LpSolution:
        from scipy.optimize import linprog

        bounds = [
            (0.0, None if np.isinf(u) else float(u))
            for u in lp.upper_bounds
        ]
        options = {
            "primal_feasibility_tolerance": self.config.feas_tol,
            "dual_feasibility_tolerance": self.config.opt_tol,
        }
        if self.config.max_iterations is not None:
            options["maxiter"] = self.config.max_iterations

        started = time.perf_counter()
        result = linprog(
            c=lp.objective,
            A_eq=lp.eq_matrix if lp.constraint_count else None,
            b_eq=lp.eq_rhs if lp.constraint_count else None,
            bounds=bounds,
            method=self.method,
            options=options,
        )
        elapsed = time.perf_counter() - started

        if result.status not in _STATUS:
            logger.error(f"{self.name} {lp.name or '<lp>'}: status {result.status} ({result.message})")
            raise SolverError(f"{self.name} failed: {result.message}", status=result.status)

        status = _STATUS[result.status]
        solution = LpSolution(
            status=status,
            iterations=int(getattr(result, "nit", 0) or 0),
            wall_time=elapsed,
            backend=self.name,
            metadata={"message": result.message},
        )
        if status == LpStatus.OPTIMAL:
            values = np.clip(np.asarray(result.x, dtype=float), 0.0, lp.upper_bounds)
            solution.values = values
            solution.objective_value = float(lp.objective @ values)
        logger.debug(f"{self.name} {lp.name or '<lp>'}: {status.value} ({result.message})")
        return solution


class HighsDualSimplexBackend(HighsBackend):
    """HiGHS dual revised simplex."""

    name = "highs-ds"
    method = "highs-ds"


class HighsInteriorPointBackend(HighsBackend):
    """HiGHS interior point with crossover to a vertex."""

    name = "highs-ipm"
    method = "highs-ipm"


for _backend in (HighsBackend, HighsDualSimplexBackend, HighsInteriorPointBackend):
    register_backend(_backend.name, _backend)
