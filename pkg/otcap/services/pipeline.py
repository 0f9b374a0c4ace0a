"""Capacity-then-sparsity composition over time steps."""

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    DegenerateScoreError,
    HeuristicExhaustedError,
    InfeasibleInstanceError,
    InvalidArgumentError,
    PipelineStepError,
)
from ..models.config import PipelineConfig
from ..models.instance import CapacityInstance, SparseResult, SparsityInstance, SupportPattern, TimeExpandedPlan
from ..models.measure import CostMatrix, DiscreteMeasure, TransportPlan
from .capacity import solve_capacity
from .sparse import heuristic_solve, importance, oracle_solve

logger = logging.getLogger(__name__)


def _step_sparsity(sparsity: Sequence, steps: int, n: int) -> List[List[int]]:
    """Accept one budget vector for all steps or one vector per step."""
    if len(sparsity) and np.ndim(sparsity[0]) == 0:
        vectors = [list(sparsity)] * steps
    else:
        vectors = [list(v) for v in sparsity]
    if len(vectors) != steps:
        raise InvalidArgumentError(f"expected {steps} sparsity vectors, got {len(vectors)}")
    for i, v in enumerate(vectors):
        if len(v) != n:
            raise InvalidArgumentError(f"sparsity vector {i + 1} has {len(v)} entries, expected {n}")
    return vectors


class CombinedSolver:
    """
    Solves the capacity problem, then sparsifies each step's plan.

    Each step's marginals are the row and column sums of that step's
    capacity plan, so the sparsified aggregate keeps the global marginals.
    """

    def __init__(self, config: Optional[PipelineConfig] = None, workers: int = 1):
        """
        Initialize the solver.

        Args:
            config: Pipeline options
            workers: Steps sparsified concurrently
        """
        self.config = config or PipelineConfig()
        self.workers = workers

    def solve(self, inst: CapacityInstance, sparsity: Sequence) -> TimeExpandedPlan:
        cfg = self.config
        n, _ = inst.shape
        vectors = _step_sparsity(sparsity, inst.steps, n)

        logger.info(f"pipeline: solving {inst.steps}-step capacity problem")
        capacity_plan = solve_capacity(inst, cfg.solver)

        logger.info("pipeline: sparsifying per-step plans")
        steps = list(range(inst.steps))
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(lambda i: self._sparsify_step(inst, capacity_plan, vectors, i), steps))
        else:
            results = [self._sparsify_step(inst, capacity_plan, vectors, i) for i in steps]

        return TimeExpandedPlan.from_steps(
            [r.plan for r in results],
            inst.costs,
            metadata={
                "method": "combined",
                "capacity_cost": capacity_plan.cost,
                "capacity_method": capacity_plan.metadata.get("method"),
                "attempts": [r.attempts for r in results],
                "step_methods": [r.method for r in results],
            },
        )

    def _sparsify_step(
        self,
        inst: CapacityInstance,
        capacity_plan: TimeExpandedPlan,
        vectors: List[List[int]],
        i: int
    ) -> SparseResult:
        cfg = self.config
        gamma = capacity_plan.gammas[i]
        n, m = inst.shape

        # zero-mass rows and columns are forced to 0 anyway; solve on the rest
        rows = np.flatnonzero(gamma.row_sums > cfg.zero_tol)
        cols = np.flatnonzero(gamma.col_sums > cfg.zero_tol)
        if rows.size == 0 or cols.size == 0:
            logger.debug(f"pipeline step {i + 1}: no mass moved, keeping the zero plan")
            return SparseResult(
                plan=TransportPlan(np.zeros((n, m))),
                cost=0.0,
                attempts=0,
                pattern=SupportPattern(((),) * n, m),
                method="empty",
            )

        block = np.ix_(rows, cols)
        sub = np.asarray(gamma.entries, dtype=float)[block]
        step_inst = SparsityInstance(
            a=DiscreteMeasure(sub.sum(axis=1)),
            b=DiscreteMeasure(sub.sum(axis=0)),
            cost=CostMatrix(inst.costs[i].entries[block]),
            sparsity=tuple(min(int(vectors[i][j]), cols.size) for j in rows),
        )
        capacity = inst.capacities[i][block] if cfg.enforce_capacity_in_sparse_step else None
        sparse_cfg = cfg.sparse_config()

        try:
            score = importance(step_inst.a, step_inst.b, step_inst.cost, cfg.surrogate_id, cfg.lambda_, cfg.solver)
            result = heuristic_solve(step_inst, score, cfg.attempt_cap, sparse_cfg, capacity)
        except DegenerateScoreError as e:
            logger.error(f"pipeline step {i + 1}: {e}")
            raise PipelineStepError(f"step {i + 1}: {e}", step=i + 1, cause=e) from e
        except HeuristicExhaustedError as e:
            if not cfg.oracle_fallback:
                logger.error(f"pipeline step {i + 1}: {e}")
                raise PipelineStepError(
                    f"step {i + 1}: heuristic found no feasible pattern in {e.attempts} attempt(s)",
                    step=i + 1,
                    cause=e,
                ) from e
            logger.warning(f"pipeline step {i + 1}: heuristic exhausted, trying the oracle")
            try:
                result = oracle_solve(step_inst, sparse_cfg, capacity)
            except InfeasibleInstanceError as oracle_error:
                raise PipelineStepError(
                    f"step {i + 1} has no feasible sparse plan", step=i + 1, cause=oracle_error
                ) from oracle_error
        return _embed(result, rows, cols, n, m)


def _embed(result: SparseResult, rows: np.ndarray, cols: np.ndarray, n: int, m: int) -> SparseResult:
    """Place a sub-problem result back into the full n x m grid."""
    entries = np.zeros((n, m))
    entries[np.ix_(rows, cols)] = result.plan.entries
    columns: List[Tuple[int, ...]] = [()] * n
    for r, picked in zip(rows, result.pattern.columns):
        columns[r] = tuple(int(cols[k]) for k in picked)
    return dataclasses.replace(
        result,
        plan=TransportPlan(entries),
        pattern=SupportPattern(tuple(columns), m),
    )


def solve_combined(
    inst: CapacityInstance,
    sparsity: Sequence,
    config: Optional[PipelineConfig] = None,
    workers: int = 1
) -> TimeExpandedPlan:
    """Capacity solve followed by per-step heuristic sparsification."""
    return CombinedSolver(config, workers).solve(inst, sparsity)
