"""Benchmark runner: capacity solve timings and the sparsity metric grid."""

import logging
import time
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateScoreError, EquivalenceError, HeuristicExhaustedError, InfeasibleInstanceError
from .models.config import BenchConfig, SolverConfig, SparseConfig
from .models.instance import BaselineSample, CapacityInstance, SparseResult, SparsityInstance, TimeExpandedPlan
from .models.report import BenchRecord, BenchReport, SparsityMetrics
from .services.capacity import solve_general, solve_uniform_fast
from .services.generator import InstanceKind, generate_instance
from .services.instance_store import to_capacity_instance, to_sparsity_instance
from .services.plan_validator import PlanValidator
from .services.sparse import heuristic_solve, importance, oracle_solve, random_baseline, sparsity_metrics

logger = logging.getLogger(__name__)

METRICS = ("additional_cost_pct", "time_saved_pct", "solutions_beat_pct")


class BenchmarkRunner:
    """
    Runs the two benchmark suites.

    Handles:
    - Seeded instance generation
    - Timing general vs fast capacity solves per backend
    - Cost equivalence and plan re-validation
    - Heuristic vs oracle vs random-baseline comparison per surrogate
    """

    def __init__(
        self,
        config: Optional[BenchConfig] = None,
        solver: Optional[SolverConfig] = None
    ):
        """
        Initialize the runner.

        Args:
            config: Benchmark options
            solver: Base LP options; bench_capacity overrides the backend
        """
        self.config = config or BenchConfig()
        self.solver = solver or SolverConfig()
        self.validator = PlanValidator()

    # -- capacity: general vs fast ---------------------------------------------

    def bench_capacity(
        self,
        sizes: Optional[Sequence[int]] = None,
        step_counts: Optional[Sequence[int]] = None,
        repeats: Optional[int] = None,
        backends: Optional[Sequence[str]] = None
    ) -> BenchReport:
        """
        Time solve_general against solve_uniform_fast.

        One seeded instance per (n, N); each method is timed `repeats` times
        per backend. Methods whose mean time falls below min_repeat_time are
        re-timed with fast_repeats runs.

        Raises:
            EquivalenceError: the two optimal costs differ beyond equivalence_rtol,
                or a plan fails re-validation
        """
        cfg = self.config
        sizes = list(sizes or cfg.sizes)
        step_counts = list(step_counts or cfg.step_counts)
        repeats = repeats or cfg.repeats
        backends = list(backends or cfg.backends)

        report = BenchReport(
            name="capacity",
            metadata={
                "sizes": sizes,
                "step_counts": step_counts,
                "repeats": repeats,
                "backends": backends,
                "seed": cfg.seed,
                "retimed": [],
            },
        )

        logger.info("=== PHASE 1: INSTANCE GENERATION ===")
        instances: List[Tuple[int, int, CapacityInstance]] = []
        for n in sizes:
            for steps in step_counts:
                doc = generate_instance(n, n, steps, InstanceKind.CAPACITY, seed=cfg.seed + steps)
                instances.append((n, steps, to_capacity_instance(doc)))
        logger.info(f"Generated {len(instances)} capacity instance(s)")

        logger.info("=== PHASE 2: TIMING ===")
        for backend in backends:
            solver = replace(self.solver, backend=backend)
            for n, steps, inst in instances:
                costs = {}
                for method, solve in (("general", solve_general), ("fast", solve_uniform_fast)):
                    costs[method] = self._time_capacity(report, inst, method, solve, solver, repeats)
                logger.info(
                    f"[{backend}] n={n} N={steps}: general {costs['general']}, fast {costs['fast']}"
                )

                self._check_equivalent(costs, n, steps, backend)

        logger.info("=== BENCHMARK COMPLETED ===")
        return report

    def _time_capacity(
        self,
        report: BenchReport,
        inst: CapacityInstance,
        method: str,
        solve: Callable[[CapacityInstance, SolverConfig], TimeExpandedPlan],
        solver: SolverConfig,
        repeats: int
    ) -> Optional[float]:
        """Timed repeats of one method; returns its optimal cost, or None when infeasible."""
        n, m = inst.shape
        plan, times, status = self._timed_runs(inst, solve, solver, repeats)

        if status == "optimal" and float(np.mean(times)) < self.config.min_repeat_time:
            logger.debug(f"{method} N={inst.steps} under {self.config.min_repeat_time}s; re-timing")
            report.metadata["retimed"].append({"method": method, "n": n, "N": inst.steps, "backend": solver.backend})
            plan, times, status = self._timed_runs(inst, solve, solver, self.config.fast_repeats)

        if plan is not None:
            issues = self.validator.validate_time_expanded(plan, inst)
            if not self.validator.is_valid(issues):
                logger.error(f"{method} plan failed validation: {[i.message for i in issues]}")
                raise EquivalenceError(f"{method} plan for n={n}, N={inst.steps} failed validation: {issues[0].message}")

        cost = plan.cost if plan is not None else None
        iterations = int(plan.metadata.get("iterations", 0)) if plan is not None else 0
        for repeat, elapsed in enumerate(times):
            report.add(BenchRecord(
                method=method,
                n=n,
                m=m,
                N=inst.steps,
                repeat=repeat,
                status=status,
                cost=cost,
                wall_time_s=elapsed,
                iterations=iterations,
                backend=solver.backend,
            ))
        return cost

    @staticmethod
    def _timed_runs(
        inst: CapacityInstance,
        solve: Callable[[CapacityInstance, SolverConfig], TimeExpandedPlan],
        solver: SolverConfig,
        repeats: int
    ) -> Tuple[Optional[TimeExpandedPlan], List[float], str]:
        plan = None
        times = []
        for _ in range(repeats):
            started = time.perf_counter()
            try:
                plan = solve(inst, solver)
            except InfeasibleInstanceError:
                times.append(time.perf_counter() - started)
                return None, times, "infeasible"
            times.append(time.perf_counter() - started)
        return plan, times, "optimal"

    def _check_equivalent(self, costs: Dict[str, Optional[float]], n: int, steps: int, backend: str) -> None:
        general, fast = costs["general"], costs["fast"]
        if general is None and fast is None:
            return
        if general is None or fast is None:
            raise EquivalenceError(
                f"[{backend}] n={n} N={steps}: only one formulation is feasible (general {general}, fast {fast})"
            )
        if abs(general - fast) > self.config.equivalence_rtol * max(1.0, abs(general)):
            logger.error(f"[{backend}] n={n} N={steps}: general {general} != fast {fast}")
            raise EquivalenceError(
                f"[{backend}] n={n} N={steps}: general cost {general} differs from fast cost {fast}"
            )

    # -- sparsity: heuristic vs oracle -----------------------------------------

    def bench_sparse(
        self,
        n: Optional[int] = None,
        m: Optional[int] = None,
        s: Optional[int] = None,
        instance_count: Optional[int] = None,
        surrogates: Optional[Sequence[int]] = None,
        baseline_samples: Optional[int] = None,
        seed: Optional[int] = None
    ) -> BenchReport:
        """
        Heuristic against the exhaustive oracle on seeded instances.

        The grid maps "surrogate_K" to the mean of each metric over the
        instances that surrogate solved. Exhausted instances are counted in
        metadata["exhausted"], instances whose score is undefined in
        metadata["degenerate"]; both are left out of the means. Instances
        without any feasible pattern are listed in metadata["infeasible"] and
        skipped.

        Raises:
            EquivalenceError: a sparse plan fails re-validation, or a heuristic
                plan is cheaper than the oracle
        """
        cfg = self.config
        n = n or cfg.n
        m = m or cfg.m
        s = s or cfg.sparsity
        instance_count = instance_count or cfg.instance_count
        surrogates = list(surrogates or cfg.surrogates)
        baseline_samples = baseline_samples or cfg.baseline_samples
        seed = cfg.seed if seed is None else seed
        sparse_cfg = SparseConfig(lambda_=cfg.lambda_, solver=self.solver)

        report = BenchReport(
            name="sparse",
            metadata={
                "n": n,
                "m": m,
                "s": s,
                "instance_count": instance_count,
                "surrogates": surrogates,
                "lambda": cfg.lambda_,
                "baseline_samples": baseline_samples,
                "seed": seed,
                "exhausted": {f"surrogate_{k}": 0 for k in surrogates},
                "degenerate": {f"surrogate_{k}": 0 for k in surrogates},
                "infeasible": [],
            },
        )

        logger.info("=== PHASE 1: INSTANCE GENERATION ===")
        instances: List[SparsityInstance] = []
        for i in range(instance_count):
            doc = generate_instance(n, m, 1, InstanceKind.SPARSE, seed=seed + i, sparsity=s)
            instances.append(to_sparsity_instance(doc))

        logger.info("=== PHASE 2: ORACLE AND BASELINE ===")
        oracles: Dict[int, SparseResult] = {}
        baselines: Dict[int, List[BaselineSample]] = {}
        for i, inst in enumerate(instances):
            try:
                oracle = oracle_solve(inst, sparse_cfg)
            except InfeasibleInstanceError as e:
                # no pattern admits a coupling; nothing to compare against
                logger.warning(f"instance {i + 1}: {e}")
                report.metadata["infeasible"].append(i + 1)
                self._record_sparse(report, inst, i, "oracle", "infeasible", None, 0.0, 0)
                continue
            self._check_sparse(inst, oracle)
            oracles[i] = oracle
            baselines[i] = random_baseline(inst, baseline_samples, seed=seed + i, config=sparse_cfg)
            self._record_sparse(report, inst, i, oracle.method, "optimal", oracle.cost, oracle.wall_time, oracle.attempts)

        logger.info("=== PHASE 3: HEURISTIC ===")
        collected: Dict[int, List[SparsityMetrics]] = {k: [] for k in surrogates}
        for k in surrogates:
            method = f"heuristic-s{k}"
            for i, inst in enumerate(instances):
                if i not in oracles:
                    continue
                started = time.perf_counter()
                try:
                    score = importance(inst.a, inst.b, inst.cost, k, cfg.lambda_, self.solver)
                    result = heuristic_solve(inst, score, config=sparse_cfg)
                except DegenerateScoreError as e:
                    elapsed = time.perf_counter() - started
                    logger.warning(f"{method} instance {i + 1}: {e}")
                    report.metadata["degenerate"][f"surrogate_{k}"] += 1
                    self._record_sparse(report, inst, i, method, "degenerate", None, elapsed, 0)
                    continue
                except HeuristicExhaustedError as e:
                    elapsed = time.perf_counter() - started
                    logger.warning(f"{method} instance {i + 1}: {e}")
                    report.metadata["exhausted"][f"surrogate_{k}"] += 1
                    self._record_sparse(report, inst, i, method, "exhausted", None, elapsed, e.attempts)
                    continue
                elapsed = time.perf_counter() - started
                self._check_sparse(inst, result, oracles[i])

                collected[k].append(sparsity_metrics(
                    result,
                    oracles[i],
                    baselines[i],
                    timings={"heuristic": elapsed, "oracle": oracles[i].wall_time},
                ))
                self._record_sparse(report, inst, i, method, "optimal", result.cost, elapsed, result.attempts)
            logger.info(f"{method}: solved {len(collected[k])}/{len(oracles)} instance(s)")

        report.grid = {f"surrogate_{k}": _mean_metrics(collected[k]) for k in surrogates}
        logger.info("=== BENCHMARK COMPLETED ===")
        return report

    def _check_sparse(self, inst: SparsityInstance, result: SparseResult, oracle: Optional[SparseResult] = None) -> None:
        """Re-validate a sparse plan; with an oracle, the plan must not beat it."""
        issues = (
            self.validator.validate_coupling(result.plan, inst.a, inst.b, field=result.method)
            + self.validator.validate_sparse(result.plan, inst.sparsity, field=result.method)
            + self.validator.validate_cost(result.plan, inst.cost, result.cost, field=result.method)
        )
        if not self.validator.is_valid(issues):
            logger.error(f"{result.method} plan failed validation: {[i.message for i in issues]}")
            raise EquivalenceError(f"{result.method} plan failed validation: {issues[0].message}")
        if oracle is not None and result.cost < oracle.cost - 1e-9 * max(1.0, abs(oracle.cost)):
            logger.error(f"{result.method} cost {result.cost} below oracle cost {oracle.cost}")
            raise EquivalenceError(
                f"{result.method} cost {result.cost} is below the oracle optimum {oracle.cost}"
            )

    def _record_sparse(
        self,
        report: BenchReport,
        inst: SparsityInstance,
        index: int,
        method: str,
        status: str,
        cost: Optional[float],
        elapsed: float,
        attempts: int
    ) -> None:
        n, m = inst.shape
        report.add(BenchRecord(
            method=method,
            n=n,
            m=m,
            N=1,
            repeat=index,
            status=status,
            cost=cost,
            wall_time_s=elapsed,
            iterations=attempts,
            backend=self.solver.backend,
        ))


def _mean_metrics(samples: List[SparsityMetrics]) -> Dict[str, Optional[float]]:
    """Per-metric mean; None when no sample has a value."""
    means: Dict[str, Optional[float]] = {}
    for metric in METRICS:
        values = [getattr(sample, metric) for sample in samples if getattr(sample, metric) is not None]
        means[metric] = float(np.mean(values)) if values else None
    return means
