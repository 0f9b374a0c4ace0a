"""Invariant checks for transport plans."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..models.instance import CapacityInstance, TimeExpandedPlan
from ..models.measure import CostMatrix, DiscreteMeasure, TransportPlan

logger = logging.getLogger(__name__)


@dataclass
class ValidationIssue:
    """A violated plan invariant."""
    field: str
    message: str
    severity: str = "error"  # error, warning
    value: Optional[Any] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "field": self.field,
            "message": self.message,
            "severity": self.severity,
            "value": self.value,
        }


class PlanValidator:
    """
    Validator for solver output.

    Supports:
    - Marginal (coupling) checks
    - Per-step capacity bounds
    - Aggregate consistency of time-expanded plans
    - Per-row l0 budgets
    - Cost re-evaluation
    """

    def __init__(self, tol: float = 1e-9, zero_tol: float = 1e-9):
        """
        Initialize the validator.

        Args:
            tol: Absolute tolerance for equalities and bounds, scaled by mass
            zero_tol: Entries at or below this count as zero
        """
        self.tol = tol
        self.zero_tol = zero_tol

    def _band(self, reference: np.ndarray) -> float:
        return self.tol * max(1.0, float(np.max(np.abs(reference), initial=0.0)))

    def validate_coupling(
        self,
        plan: TransportPlan,
        a: DiscreteMeasure,
        b: DiscreteMeasure,
        field: str = "plan"
    ) -> List[ValidationIssue]:
        """Row sums equal a and column sums equal b."""
        issues = []
        if plan.shape != (a.size, b.size):
            return [ValidationIssue(field, f"shape {plan.shape} does not match {(a.size, b.size)}")]

        row_gap = float(np.max(np.abs(plan.row_sums - a.weights), initial=0.0))
        if row_gap > self._band(a.weights):
            issues.append(ValidationIssue(f"{field}.row_sums", "row sums differ from source masses", value=row_gap))
        col_gap = float(np.max(np.abs(plan.col_sums - b.weights), initial=0.0))
        if col_gap > self._band(b.weights):
            issues.append(ValidationIssue(f"{field}.col_sums", "column sums differ from sink masses", value=col_gap))
        return issues

    def validate_capacity(
        self,
        plan: TransportPlan,
        capacity: np.ndarray,
        field: str = "plan"
    ) -> List[ValidationIssue]:
        """0 <= plan <= capacity entrywise."""
        excess = plan.entries - np.asarray(capacity, dtype=float)
        worst = float(np.max(excess, initial=-np.inf))
        if worst > self._band(plan.entries):
            j, k = np.unravel_index(int(np.argmax(excess)), excess.shape)
            return [ValidationIssue(
                field,
                f"entry ({j + 1}, {k + 1}) exceeds its capacity",
                value=worst,
            )]
        return []

    def validate_sparse(
        self,
        plan: TransportPlan,
        sparsity: Sequence[int],
        field: str = "plan"
    ) -> List[ValidationIssue]:
        """At most s_j entries above zero_tol in row j."""
        issues = []
        counts = plan.nnz_per_row(self.zero_tol)
        for j, (count, budget) in enumerate(zip(counts, sparsity)):
            if count > budget:
                issues.append(ValidationIssue(
                    f"{field}.row[{j + 1}]",
                    f"{int(count)} nonzero entries exceed the budget of {budget}",
                    value=int(count),
                ))
        return issues

    def validate_cost(
        self,
        plan: TransportPlan,
        costs: CostMatrix,
        reported: float,
        field: str = "cost"
    ) -> List[ValidationIssue]:
        """Reported cost matches <C, plan>."""
        recomputed = plan.cost(costs)
        if abs(recomputed - reported) > 1e-9 * max(1.0, abs(recomputed)):
            return [ValidationIssue(field, f"reported cost {reported} differs from <C, plan> = {recomputed}")]
        return []

    def validate_time_expanded(
        self,
        plan: TimeExpandedPlan,
        inst: CapacityInstance,
        check_capacity: bool = True
    ) -> List[ValidationIssue]:
        """Aggregate consistency, per-step capacities, marginals and cost."""
        issues = []
        if plan.steps != inst.steps:
            return [ValidationIssue("gammas", f"{plan.steps} steps, expected {inst.steps}")]

        summed = np.sum([g.entries for g in plan.gammas], axis=0)
        gap = float(np.max(np.abs(summed - plan.aggregate.entries), initial=0.0))
        if gap > self._band(plan.aggregate.entries):
            issues.append(ValidationIssue("aggregate", "aggregate differs from the sum of steps", value=gap))

        if check_capacity:
            for i, (gamma, cap) in enumerate(zip(plan.gammas, inst.capacities), 1):
                issues.extend(self.validate_capacity(gamma, cap, field=f"gammas[{i}]"))

        issues.extend(self.validate_coupling(plan.aggregate, inst.a, inst.b, field="aggregate"))

        recomputed = sum(g.cost(c) for g, c in zip(plan.gammas, inst.costs))
        if abs(recomputed - plan.cost) > 1e-9 * max(1.0, abs(recomputed)):
            issues.append(ValidationIssue("cost", f"reported cost {plan.cost} differs from {recomputed}"))

        if issues:
            logger.debug(f"time-expanded plan failed {len(issues)} check(s)")
        return issues

    def is_valid(self, issues: List[ValidationIssue]) -> bool:
        """No error-severity issues."""
        return not any(i.severity == "error" for i in issues)
