"""Configuration models for solvers, sparse search, the pipeline and benchmarks."""

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from ..errors import InvalidArgumentError


def _known(cls, data: Dict[str, Any]) -> Dict[str, Any]:
    """Keep only keys that are fields of cls; unknown keys are rejected."""
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise InvalidArgumentError(f"unknown {cls.__name__} option(s): {', '.join(unknown)}")
    return dict(data)


@dataclass
class SolverConfig:
    """Options for the LP engine."""
    backend: str = "simplex"
    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    pivot_tol: float = 1e-11
    max_iterations: Optional[int] = None  # None -> 50 * (variables + constraints)
    degenerate_threshold: int = 50  # consecutive degenerate pivots before Bland's rule

    def iteration_cap(self, variables: int, constraints: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 50 * (variables + constraints)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "backend": self.backend,
            "feas_tol": self.feas_tol,
            "opt_tol": self.opt_tol,
            "pivot_tol": self.pivot_tol,
            "max_iterations": self.max_iterations,
            "degenerate_threshold": self.degenerate_threshold,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        """Create from dictionary representation."""
        return cls(**_known(cls, data or {}))


@dataclass
class SparseConfig:
    """Options for the sparsity heuristic, oracle and baseline."""
    surrogate_id: int = 1
    lambda_: float = 0.7
    attempt_cap: int = 1000
    oracle_cap: int = 10 ** 6
    zero_tol: float = 1e-9
    parallel_workers: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.surrogate_id not in (1, 2, 3, 4):
            raise InvalidArgumentError(f"surrogate_id must be 1-4, got {self.surrogate_id}")
        if self.attempt_cap < 1:
            raise InvalidArgumentError("attempt_cap must be at least 1")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise InvalidArgumentError("lambda must lie in [0, 1]")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "surrogate_id": self.surrogate_id,
            "lambda_": self.lambda_,
            "attempt_cap": self.attempt_cap,
            "oracle_cap": self.oracle_cap,
            "zero_tol": self.zero_tol,
            "parallel_workers": self.parallel_workers,
            "solver": self.solver.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SparseConfig":
        """Create from dictionary representation."""
        data = _known(cls, data or {})
        data["solver"] = SolverConfig.from_dict(data.get("solver", {}))
        return cls(**data)


@dataclass
class PipelineConfig:
    """Options for the capacity-then-sparsity composition."""
    surrogate_id: int = 1
    lambda_: float = 0.7
    attempt_cap: int = 1000
    enforce_capacity_in_sparse_step: bool = True
    oracle_fallback: bool = False
    zero_tol: float = 1e-9
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.attempt_cap < 1:
            raise InvalidArgumentError("attempt_cap must be at least 1")

    def sparse_config(self) -> SparseConfig:
        """The SparseConfig each per-step heuristic runs with."""
        return SparseConfig(
            surrogate_id=self.surrogate_id,
            lambda_=self.lambda_,
            attempt_cap=self.attempt_cap,
            zero_tol=self.zero_tol,
            solver=self.solver,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "surrogate_id": self.surrogate_id,
            "lambda_": self.lambda_,
            "attempt_cap": self.attempt_cap,
            "enforce_capacity_in_sparse_step": self.enforce_capacity_in_sparse_step,
            "oracle_fallback": self.oracle_fallback,
            "zero_tol": self.zero_tol,
            "solver": self.solver.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PipelineConfig":
        """Create from dictionary representation."""
        data = _known(cls, data or {})
        data["solver"] = SolverConfig.from_dict(data.get("solver", {}))
        return cls(**data)


@dataclass
class BenchConfig:
    """Options for the two benchmark tables."""
    # capacity timings
    sizes: List[int] = field(default_factory=lambda: [10])
    step_counts: List[int] = field(default_factory=lambda: [10, 50, 100])
    repeats: int = 10
    fast_repeats: int = 100
    min_repeat_time: float = 1e-3  # seconds; faster runs are re-timed with fast_repeats
    backends: List[str] = field(default_factory=lambda: ["simplex"])
    equivalence_rtol: float = 1e-6

    # sparsity grid
    n: int = 4
    m: int = 4
    sparsity: int = 2
    instance_count: int = 100
    surrogates: List[int] = field(default_factory=lambda: [1, 2, 3, 4])
    lambda_: float = 0.7
    baseline_samples: int = 50

    seed: int = 0
    output_dir: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchConfig":
        """Create from dictionary representation."""
        return cls(**_known(cls, data or {}))


@dataclass
class AppConfig:
    """All configuration sections, as read from a config file."""
    solver: SolverConfig = field(default_factory=SolverConfig)
    sparse: SparseConfig = field(default_factory=SparseConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AppConfig":
        """Create from dictionary representation."""
        data = _known(cls, data or {})
        return cls(
            solver=SolverConfig.from_dict(data.get("solver", {})),
            sparse=SparseConfig.from_dict(data.get("sparse", {})),
            pipeline=PipelineConfig.from_dict(data.get("pipeline", {})),
            bench=BenchConfig.from_dict(data.get("bench", {})),
        )

    @classmethod
    def from_file(cls, path: str) -> "AppConfig":
        """Load from a YAML or JSON file."""
        with open(Path(path)) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise InvalidArgumentError(f"config file {path} must contain a mapping")
        return cls.from_dict(data)
