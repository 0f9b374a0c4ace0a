"""Sparsity-constrained transport: importance scores, pattern search, oracle and baseline."""

import heapq
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    DegenerateScoreError,
    HeuristicExhaustedError,
    InfeasibleInstanceError,
    InvalidArgumentError,
    OracleTooLargeError,
)
from ..models.config import SolverConfig, SparseConfig
from ..models.instance import (
    BaselineSample,
    ImportanceScore,
    SparseResult,
    SparsityInstance,
    SupportPattern,
)
from ..models.measure import CostMatrix, DiscreteMeasure, TransportPlan
from ..models.report import SparsityMetrics
from ..models.lp import LpStatus
from ..solvers import solve_lp
from .transport import raise_for_status, solve_kantorovich, transport_lp

logger = logging.getLogger(__name__)

SURROGATES = (1, 2, 3, 4)


# -- importance scores ---------------------------------------------------------

def importance(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    C: CostMatrix,
    surrogate_id: int,
    lambda_: float = 0.7,
    config: Optional[SolverConfig] = None
) -> ImportanceScore:
    """
    Importance of every plan entry; higher means more likely to be nonzero.

    1: (a x b) o C
    2: 1 / ((a x b) o C)
    3: the unconstrained Kantorovich plan
    4: lambda (a x b) + (1 - lambda) C
    """
    outer = np.outer(a.weights, b.weights)
    if surrogate_id == 1:
        scores = outer * C.entries
    elif surrogate_id == 2:
        weighted = outer * C.entries
        zeros = np.argwhere(weighted == 0)
        if zeros.size:
            j, k = (int(v) for v in zeros[0])
            raise DegenerateScoreError(
                f"surrogate 2 undefined: (a x b) o C is zero at entry ({j + 1}, {k + 1})",
                entry=(j + 1, k + 1),
            )
        scores = 1.0 / weighted
    elif surrogate_id == 3:
        plan, _ = solve_kantorovich(a, b, C, config)
        scores = plan.entries
    elif surrogate_id == 4:
        if not 0.0 <= lambda_ <= 1.0:
            raise InvalidArgumentError(f"lambda must lie in [0, 1], got {lambda_}")
        scores = lambda_ * outer + (1.0 - lambda_) * C.entries
    else:
        raise InvalidArgumentError(f"unknown surrogate {surrogate_id}; expected one of {SURROGATES}")

    return ImportanceScore(
        scores=scores,
        surrogate_id=surrogate_id,
        lambda_=lambda_ if surrogate_id == 4 else None,
    )


# -- pattern enumeration -------------------------------------------------------

class _RowSubsets:
    """Size-s column subsets of one row, materialized lazily in non-increasing score order."""

    def __init__(self, row_scores: np.ndarray, s: int):
        m = row_scores.shape[0]
        self.m = m
        self.s = s
        self.order = sorted(range(m), key=lambda k: (-row_scores[k], k))
        self.values = row_scores[self.order]
        self.items: List[Tuple[float, Tuple[int, ...]]] = []

        start = tuple(range(s))
        self._seen = {start}
        self._heap = [self._entry(start)]

    def _entry(self, positions: Tuple[int, ...]):
        score = float(np.sum(self.values[list(positions)]))
        columns = tuple(sorted(self.order[p] for p in positions))
        return (-score, columns, positions)

    def get(self, index: int) -> Optional[Tuple[float, Tuple[int, ...]]]:
        while len(self.items) <= index and self._heap:
            neg_score, columns, positions = heapq.heappop(self._heap)
            self.items.append((-neg_score, columns))
            # moving one selected position to the next rank never raises the score
            for i in range(self.s):
                nxt = positions[i] + 1
                if nxt >= self.m or (i + 1 < self.s and nxt == positions[i + 1]):
                    continue
                child = positions[:i] + (nxt,) + positions[i + 1:]
                if child not in self._seen:
                    self._seen.add(child)
                    heapq.heappush(self._heap, self._entry(child))
        if index < len(self.items):
            return self.items[index]
        return None


class PatternSearch:
    """
    Best-first enumeration of support patterns by total selected score.

    Every row keeps exactly s_j columns. Patterns come out with non-increasing
    total score; ties go to the lexicographically smallest (row, column)
    selection among the candidates in the frontier.
    """

    def __init__(self, score: ImportanceScore, sparsity: Sequence[int]):
        scores = score.scores
        n, m = scores.shape
        if len(sparsity) != n:
            raise InvalidArgumentError(f"sparsity has {len(sparsity)} entries, expected {n}")
        self.m = m
        self.rows = [_RowSubsets(scores[j], min(int(s), m)) for j, s in enumerate(sparsity)]

    def __iter__(self) -> Iterator[Tuple[SupportPattern, float]]:
        rows = self.rows
        start = (0,) * len(rows)
        heap = [self._entry(start)]
        seen = {start}
        while heap:
            neg_score, columns, state = heapq.heappop(heap)
            yield SupportPattern(columns=columns, m=self.m), -neg_score
            for j in range(len(rows)):
                child = state[:j] + (state[j] + 1,) + state[j + 1:]
                if child in seen or rows[j].get(child[j]) is None:
                    continue
                seen.add(child)
                heapq.heappush(heap, self._entry(child))

    def _entry(self, state: Tuple[int, ...]):
        picks = [row.get(i) for row, i in zip(self.rows, state)]
        total = float(sum(p[0] for p in picks))
        columns = tuple(p[1] for p in picks)
        return (-total, columns, state)


def least_significant_entries(score: ImportanceScore, sparsity: Sequence[int]) -> List[Tuple[int, int]]:
    """1-based entries forced to zero by the first (highest-score) pattern."""
    pattern, _ = next(iter(PatternSearch(score, sparsity)))
    mask = pattern.mask
    return [(int(j) + 1, int(k) + 1) for j, k in np.argwhere(~mask)]


def all_patterns(sparsity: Sequence[int], m: int) -> Iterator[SupportPattern]:
    """Every exactly-s_j-per-row pattern in lexicographic order."""
    per_row = [itertools.combinations(range(m), min(int(s), m)) for s in sparsity]
    for columns in itertools.product(*[list(r) for r in per_row]):
        yield SupportPattern(columns=tuple(columns), m=m)


def pattern_count(sparsity: Sequence[int], m: int) -> int:
    return math.prod(math.comb(m, min(int(s), m)) for s in sparsity)


# -- restricted solves ---------------------------------------------------------

def solve_pattern(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    C: CostMatrix,
    pattern: SupportPattern,
    config: Optional[SolverConfig] = None,
    capacity: Optional[np.ndarray] = None
) -> Optional[Tuple[TransportPlan, float]]:
    """
    Transport restricted to the pattern's support.

    Entries outside the pattern get upper bound 0; inside they are unbounded
    or bounded by capacity when given.

    Returns:
        (plan, cost), or None when the restricted problem is infeasible
    """
    inside = np.full(C.shape, np.inf) if capacity is None else np.asarray(capacity, dtype=float)
    upper = np.where(pattern.mask, inside, 0.0)
    lp = transport_lp(a.weights, b.weights, C.entries, upper=upper, name="restricted")
    solution = solve_lp(lp, config)
    if solution.status == LpStatus.INFEASIBLE:
        return None
    raise_for_status(solution, "restricted transport problem")
    return TransportPlan(solution.values.reshape(C.shape)), float(solution.objective_value)


def _evaluate(
    patterns: Sequence[SupportPattern],
    solve: Callable[[SupportPattern], Optional[Tuple[TransportPlan, float]]],
    workers: int
) -> List[Optional[Tuple[TransportPlan, float]]]:
    """Solve patterns, in parallel when workers > 1; results keep pattern order."""
    if workers > 1 and len(patterns) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(solve, patterns))
    return [solve(p) for p in patterns]


def heuristic_solve(
    inst: SparsityInstance,
    score: ImportanceScore,
    attempt_cap: Optional[int] = None,
    config: Optional[SparseConfig] = None,
    capacity: Optional[np.ndarray] = None
) -> SparseResult:
    """
    First feasible pattern in best-first score order.

    Raises:
        HeuristicExhaustedError: no feasible pattern within attempt_cap
    """
    config = config or SparseConfig()
    cap = attempt_cap if attempt_cap is not None else config.attempt_cap
    if cap < 1:
        raise InvalidArgumentError("attempt_cap must be at least 1")
    if score.scores.shape != inst.shape:
        raise InvalidArgumentError(f"score has shape {score.scores.shape}, expected {inst.shape}")

    started = time.perf_counter()
    attempts = 0
    for pattern, total in PatternSearch(score, inst.sparsity):
        if attempts >= cap:
            break
        attempts += 1
        result = solve_pattern(inst.a, inst.b, inst.cost, pattern, config.solver, capacity)
        if result is None:
            logger.debug(f"pattern {attempts} (score {total:.6g}) infeasible")
            continue
        plan, cost = result
        logger.debug(f"heuristic found a feasible pattern after {attempts} attempt(s), cost {cost:.9g}")
        return SparseResult(
            plan=plan,
            cost=cost,
            attempts=attempts,
            pattern=pattern,
            wall_time=time.perf_counter() - started,
            method=f"heuristic-s{score.surrogate_id}",
        )

    raise HeuristicExhaustedError(
        f"no feasible support pattern within {attempts} attempt(s)", attempts=attempts
    )


def oracle_solve(
    inst: SparsityInstance,
    config: Optional[SparseConfig] = None,
    capacity: Optional[np.ndarray] = None
) -> SparseResult:
    """
    Exact l0-constrained optimum by solving every exactly-s_j pattern.

    Ties keep the earliest pattern in lexicographic order.
    """
    config = config or SparseConfig()
    _, m = inst.shape
    count = pattern_count(inst.sparsity, m)
    if count > config.oracle_cap:
        raise OracleTooLargeError(
            f"{count} patterns exceed the oracle cap of {config.oracle_cap}",
            patterns=count,
            cap=config.oracle_cap,
        )

    started = time.perf_counter()
    patterns = list(all_patterns(inst.sparsity, m))
    results = _evaluate(
        patterns,
        lambda p: solve_pattern(inst.a, inst.b, inst.cost, p, config.solver, capacity),
        config.parallel_workers,
    )

    best: Optional[Tuple[TransportPlan, float, SupportPattern]] = None
    for pattern, result in zip(patterns, results):
        if result is None:
            continue
        if best is None or result[1] < best[1]:
            best = (result[0], result[1], pattern)

    if best is None:
        raise InfeasibleInstanceError(f"none of the {count} support patterns is feasible")

    plan, cost, pattern = best
    logger.debug(f"oracle solved {count} patterns, optimum {cost:.9g}")
    return SparseResult(
        plan=plan,
        cost=cost,
        attempts=count,
        pattern=pattern,
        wall_time=time.perf_counter() - started,
        method="oracle",
    )


def random_baseline(
    inst: SparsityInstance,
    samples: int,
    seed: Optional[int] = None,
    config: Optional[SparseConfig] = None
) -> List[BaselineSample]:
    """Costs of uniformly random exactly-s_j patterns; infeasible samples have cost None."""
    if samples < 1:
        raise InvalidArgumentError("samples must be at least 1")
    config = config or SparseConfig()
    rng = np.random.default_rng(seed)
    _, m = inst.shape

    patterns = []
    for _ in range(samples):
        columns = tuple(
            tuple(sorted(int(k) for k in rng.choice(m, size=min(s, m), replace=False)))
            for s in inst.sparsity
        )
        patterns.append(SupportPattern(columns=columns, m=m))

    results = _evaluate(
        patterns,
        lambda p: solve_pattern(inst.a, inst.b, inst.cost, p, config.solver),
        config.parallel_workers,
    )
    return [
        BaselineSample(pattern=p, cost=None if r is None else r[1])
        for p, r in zip(patterns, results)
    ]


def sparsity_metrics(
    heuristic_result: SparseResult,
    oracle_result: SparseResult,
    baseline_results: Iterable[BaselineSample],
    timings: Optional[Mapping[str, float]] = None
) -> SparsityMetrics:
    """
    Additional cost and time saved relative to the oracle, and the share of
    feasible random patterns the heuristic beats (None without any).
    """
    c_h, c_o = heuristic_result.cost, oracle_result.cost
    if not c_o > 0:
        raise InvalidArgumentError(f"oracle cost must be positive, got {c_o}")
    timings = timings or {}
    t_h = timings.get("heuristic", heuristic_result.wall_time)
    t_o = timings.get("oracle", oracle_result.wall_time)

    feasible = [s.cost for s in baseline_results if s.feasible]
    beat = None
    if feasible:
        beat = 100.0 * sum(1 for c in feasible if c > c_h) / len(feasible)

    return SparsityMetrics(
        additional_cost_pct=100.0 * (c_h - c_o) / c_o,
        time_saved_pct=100.0 * (t_o - t_h) / t_o if t_o > 0 else 0.0,
        solutions_beat_pct=beat,
    )
