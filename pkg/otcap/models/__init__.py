"""Data models for otcap."""

from .measure import (
    DiscreteMeasure,
    CostMatrix,
    TransportPlan,
)
from .lp import (
    LinearProgram,
    LpSolution,
    LpStatus,
)
from .instance import (
    CapacityInstance,
    SparsityInstance,
    TimeExpandedPlan,
    FeasibilityReport,
    ImportanceScore,
    SupportPattern,
    SparseResult,
    BaselineSample,
    masses_match,
)
from .config import (
    SolverConfig,
    SparseConfig,
    PipelineConfig,
    BenchConfig,
    AppConfig,
)
from .report import (
    BenchRecord,
    BenchReport,
    SparsityMetrics,
)

__all__ = [
    "DiscreteMeasure",
    "CostMatrix",
    "TransportPlan",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "CapacityInstance",
    "SparsityInstance",
    "TimeExpandedPlan",
    "FeasibilityReport",
    "ImportanceScore",
    "SupportPattern",
    "SparseResult",
    "BaselineSample",
    "masses_match",
    "SolverConfig",
    "SparseConfig",
    "PipelineConfig",
    "BenchConfig",
    "AppConfig",
    "BenchRecord",
    "BenchReport",
    "SparsityMetrics",
]
