"""Time-parameterized transport under per-step capacity matrices."""

import logging
import math
from typing import Optional

import numpy as np

from ..errors import InfeasibleInstanceError, InvalidArgumentError, NotApplicableError
from ..models.config import SolverConfig
from ..models.instance import CapacityInstance, FeasibilityReport, TimeExpandedPlan, masses_match
from ..models.lp import LinearProgram, LpStatus
from ..models.measure import CostMatrix, DiscreteMeasure, TransportPlan
from ..solvers import check_feasible, solve_lp
from .transport import marginal_constraints, raise_for_status, solve_kantorovich, transport_lp

logger = logging.getLogger(__name__)


def screen_feasibility(inst: CapacityInstance) -> FeasibilityReport:
    """
    Cheap necessary conditions for feasibility.

    Flags sources (and sinks) with no capacity at any step, and those whose
    capacity summed over all steps falls short of their mass. An empty
    report does not certify feasibility; check_instance_feasible does.
    Indices in the report are 1-based.
    """
    report = FeasibilityReport()
    total = np.sum(inst.capacities, axis=0)
    row_capacity = total.sum(axis=1)
    col_capacity = total.sum(axis=0)
    a = inst.a.weights
    b = inst.b.weights

    for j in range(inst.a.size):
        if a[j] > 0 and row_capacity[j] == 0:
            report.row_violations.append(j + 1)
        if row_capacity[j] < a[j] - 1e-9 * max(1.0, a[j]):
            report.capacity_shortfall["sources"].append(j + 1)
    for k in range(inst.b.size):
        if b[k] > 0 and col_capacity[k] == 0:
            report.col_violations.append(k + 1)
        if col_capacity[k] < b[k] - 1e-9 * max(1.0, b[k]):
            report.capacity_shortfall["sinks"].append(k + 1)

    if not report.is_empty:
        logger.debug(f"feasibility screen flagged {report.to_dict()}")
    return report


def capacity_lp(inst: CapacityInstance) -> LinearProgram:
    """
    The N-step LP: one variable per gamma^i_{jk}, step-major then row-major.

    Upper bounds are M^i; the n + m equalities act on the aggregate.
    """
    n, m = inst.shape
    return LinearProgram(
        objective=np.concatenate([c.entries.reshape(-1) for c in inst.costs]),
        eq_matrix=np.tile(marginal_constraints(n, m), (1, inst.steps)),
        eq_rhs=np.concatenate([inst.a.weights, inst.b.weights]),
        upper_bounds=np.concatenate([cap.reshape(-1) for cap in inst.capacities]),
        name=f"capacity_general_N{inst.steps}",
    )


def check_instance_feasible(inst: CapacityInstance, config: Optional[SolverConfig] = None) -> bool:
    """Phase-one feasibility of the N-step LP."""
    if not masses_match(inst.a, inst.b):
        return False
    return check_feasible(capacity_lp(inst), config)


def _require_equal_mass(inst: CapacityInstance) -> None:
    if not masses_match(inst.a, inst.b):
        raise InvalidArgumentError(f"total masses differ: {inst.a.mass} vs {inst.b.mass}")


def _infeasible(inst: CapacityInstance, what: str) -> InfeasibleInstanceError:
    report = screen_feasibility(inst)
    logger.info(f"{what} infeasible (screen: {report.to_dict()})")
    return InfeasibleInstanceError(f"{what} is infeasible", report=report)


def solve_general(inst: CapacityInstance, config: Optional[SolverConfig] = None) -> TimeExpandedPlan:
    """Solve the full N-step LP; only the aggregate and the cost are unique."""
    _require_equal_mass(inst)
    n, m = inst.shape
    lp = capacity_lp(inst)
    solution = solve_lp(lp, config)
    if solution.status == LpStatus.INFEASIBLE:
        raise _infeasible(inst, "capacity-constrained instance")
    raise_for_status(solution, "capacity-constrained instance")

    blocks = solution.values.reshape(inst.steps, n, m)
    gammas = [TransportPlan(block) for block in blocks]
    return TimeExpandedPlan.from_steps(
        gammas,
        inst.costs,
        metadata={
            "method": "general",
            "variables": lp.variable_count,
            "iterations": solution.iterations,
            "lp_wall_time": solution.wall_time,
            "backend": solution.backend,
        },
    )


def solve_uniform_fast(inst: CapacityInstance, config: Optional[SolverConfig] = None) -> TimeExpandedPlan:
    """
    Uniform-plan reformulation for constant C and M.

    Solves the n*m-variable problem min <C, P> with 0 <= P <= N*M and returns
    gamma^i = P / N at every step. Its optimal cost equals solve_general's.
    """
    if not inst.is_constant:
        raise InvalidArgumentError("the fast path needs identical cost and capacity matrices at every step")
    _require_equal_mass(inst)

    steps = inst.steps
    cost = inst.costs[0]
    lp = transport_lp(
        inst.a.weights,
        inst.b.weights,
        cost.entries,
        upper=steps * inst.capacities[0],
        name=f"capacity_fast_N{steps}",
    )
    solution = solve_lp(lp, config)
    if solution.status == LpStatus.INFEASIBLE:
        raise _infeasible(inst, "capacity-constrained instance")
    raise_for_status(solution, "capacity-constrained instance")

    aggregate = solution.values.reshape(inst.shape)
    gamma = TransportPlan(aggregate / steps)
    return TimeExpandedPlan(
        gammas=(gamma,) * steps,
        aggregate=TransportPlan(aggregate),
        cost=float(solution.objective_value),
        metadata={
            "method": "fast",
            "variables": lp.variable_count,
            "iterations": solution.iterations,
            "lp_wall_time": solution.wall_time,
            "backend": solution.backend,
        },
    )


def solve_capacity(inst: CapacityInstance, config: Optional[SolverConfig] = None) -> TimeExpandedPlan:
    """Fast path when C and M are constant over time, general LP otherwise."""
    if inst.is_constant:
        return solve_uniform_fast(inst, config)
    return solve_general(inst, config)


def steps_for_plan(plan: TransportPlan, capacity: np.ndarray, zero_tol: float = 1e-9) -> int:
    """
    Smallest N with plan <= N * capacity entrywise.

    Entries where the plan is zero do not count; an all-zero plan needs N = 1.
    """
    capacity = np.asarray(capacity, dtype=float)
    used = plan.entries > zero_tol
    if np.any(used & (capacity <= 0)):
        j, k = np.argwhere(used & (capacity <= 0))[0]
        raise NotApplicableError(
            f"entry ({j + 1}, {k + 1}) carries mass {plan.entries[j, k]:.6g} but has zero capacity"
        )
    if not np.any(used):
        return 1
    ratios = plan.entries[used] / capacity[used]
    # absorb LP round-off so 2.0000000001 still means 2 steps
    return max(1, int(math.ceil(float(ratios.max()) - 1e-9)))


def minimal_steps_for_unconstrained(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    C: CostMatrix,
    M: np.ndarray,
    config: Optional[SolverConfig] = None
) -> int:
    """
    Number of steps at which capacity M no longer binds.

    Takes the Kantorovich plan the solver returns and the smallest N with
    F* <= N * M; with that N the fast path attains the unconstrained cost.
    """
    plan, _ = solve_kantorovich(a, b, C, config)
    return steps_for_plan(plan, M)
