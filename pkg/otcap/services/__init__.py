"""Transport, capacity, sparsity and instance services."""

from .measures import total_mass, scale, scale_plan, product_plan
from .transport import (
    ground_cost,
    marginal_constraints,
    scaling_check,
    solve_kantorovich,
    transport_lp,
    wasserstein_distance,
)
from .capacity import (
    capacity_lp,
    check_instance_feasible,
    minimal_steps_for_unconstrained,
    screen_feasibility,
    solve_capacity,
    solve_general,
    solve_uniform_fast,
    steps_for_plan,
)
from .sparse import (
    PatternSearch,
    all_patterns,
    heuristic_solve,
    importance,
    least_significant_entries,
    oracle_solve,
    pattern_count,
    random_baseline,
    solve_pattern,
    sparsity_metrics,
)
from .pipeline import CombinedSolver, solve_combined
from .plan_validator import PlanValidator, ValidationIssue
from .generator import InstanceKind, generate_instance
from .instance_store import (
    dump_instance,
    load_instance_file,
    parse_instance,
    to_capacity_instance,
    to_measures,
    to_sparsity_instance,
    write_instance_file,
)

__all__ = [
    "total_mass",
    "scale",
    "scale_plan",
    "product_plan",
    "ground_cost",
    "marginal_constraints",
    "scaling_check",
    "solve_kantorovich",
    "transport_lp",
    "wasserstein_distance",
    "capacity_lp",
    "check_instance_feasible",
    "minimal_steps_for_unconstrained",
    "screen_feasibility",
    "solve_capacity",
    "solve_general",
    "solve_uniform_fast",
    "steps_for_plan",
    "PatternSearch",
    "all_patterns",
    "heuristic_solve",
    "importance",
    "least_significant_entries",
    "oracle_solve",
    "pattern_count",
    "random_baseline",
    "solve_pattern",
    "sparsity_metrics",
    "CombinedSolver",
    "solve_combined",
    "PlanValidator",
    "ValidationIssue",
    "InstanceKind",
    "generate_instance",
    "dump_instance",
    "load_instance_file",
    "parse_instance",
    "to_capacity_instance",
    "to_measures",
    "to_sparsity_instance",
    "write_instance_file",
]
