"""Tests for sparsity-constrained transport."""

import itertools

import numpy as np
import pytest

from otcap.errors import (
    DegenerateScoreError,
    HeuristicExhaustedError,
    InfeasibleInstanceError,
    InvalidArgumentError,
    OracleTooLargeError,
)
from otcap.models import (
    BaselineSample,
    CostMatrix,
    DiscreteMeasure,
    ImportanceScore,
    SparseConfig,
    SparseResult,
    SparsityInstance,
    SupportPattern,
    TransportPlan,
)
from otcap.services import (
    PatternSearch,
    all_patterns,
    generate_instance,
    heuristic_solve,
    importance,
    least_significant_entries,
    oracle_solve,
    pattern_count,
    random_baseline,
    solve_kantorovich,
    sparsity_metrics,
    to_sparsity_instance,
)
from otcap.services.generator import InstanceKind
from otcap.services.plan_validator import PlanValidator

from .conftest import random_pair

HALF = DiscreteMeasure(np.array([0.5, 0.5]))


def diagonal_instance(s=(1, 1)) -> SparsityInstance:
    return SparsityInstance(a=HALF, b=HALF, cost=CostMatrix(np.array([[1.0, 10.0], [10.0, 1.0]])), sparsity=s)


def seeded(count: int, n: int = 4, m: int = 4, s: int = 2):
    for seed in range(count):
        yield to_sparsity_instance(generate_instance(n, m, 1, InstanceKind.SPARSE, seed=seed, sparsity=s))


def solvable(count: int, n: int = 4, m: int = 4, s: int = 2):
    """Seeded instances that admit a feasible pattern, with their oracle result."""
    for inst in seeded(count, n, m, s):
        try:
            yield inst, oracle_solve(inst)
        except InfeasibleInstanceError:
            continue


def result(cost: float, wall_time: float = 1.0) -> SparseResult:
    return SparseResult(
        plan=TransportPlan(np.zeros((1, 1))),
        cost=cost,
        attempts=1,
        pattern=SupportPattern(columns=((0,),), m=1),
        wall_time=wall_time,
    )


class TestSparsityInstance:
    @pytest.mark.parametrize("s", [(0, 1), (1, 3)])
    def test_budget_range(self, s):
        with pytest.raises(InvalidArgumentError):
            diagonal_instance(s)

    def test_mass_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            SparsityInstance.uniform(HALF, DiscreteMeasure(np.array([1.0, 1.0])), np.ones((2, 2)), 1)


class TestImportance:
    def test_one_by_one(self):
        one = DiscreteMeasure(np.array([1.0]))
        C = CostMatrix(np.array([[4.0]]))
        np.testing.assert_allclose(importance(one, one, C, 1).scores, [[4.0]])
        np.testing.assert_allclose(importance(one, one, C, 2).scores, [[0.25]])

    def test_convex_combination(self):
        score = importance(HALF, HALF, CostMatrix(np.array([[1.0, 2.0], [2.0, 1.0]])), 4, lambda_=0.7)
        np.testing.assert_allclose(score.scores, [[0.475, 0.775], [0.775, 0.475]])
        assert score.lambda_ == 0.7

    def test_kantorovich_plan(self):
        score = importance(HALF, HALF, CostMatrix(np.array([[1.0, 10.0], [10.0, 1.0]])), 3)
        np.testing.assert_allclose(score.scores, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)

    def test_reciprocal_needs_nonzero_entries(self):
        a = DiscreteMeasure(np.array([0.0, 1.0]))
        with pytest.raises(DegenerateScoreError) as excinfo:
            importance(a, DiscreteMeasure(np.array([0.5, 0.5])), CostMatrix(np.ones((2, 2))), 2)
        assert excinfo.value.entry == (1, 1)

    def test_lambda_range(self):
        with pytest.raises(InvalidArgumentError):
            importance(HALF, HALF, CostMatrix(np.ones((2, 2))), 4, lambda_=1.5)

    def test_unknown_surrogate(self):
        with pytest.raises(InvalidArgumentError):
            importance(HALF, HALF, CostMatrix(np.ones((2, 2))), 5)


class TestPatternSearch:
    def test_least_significant_entries(self):
        score = ImportanceScore(np.array([[0.2, 0.5, 0.3], [0.1, 0.6, 0.3], [0.4, 0.2, 0.4]]))
        assert least_significant_entries(score, [2, 2, 2]) == [(1, 1), (2, 1), (3, 2)]

    def test_scores_never_increase(self, rng):
        score = ImportanceScore(rng.random((4, 5)))
        totals = [total for _, total in itertools.islice(PatternSearch(score, [2, 3, 1, 2]), 200)]
        assert all(x >= y - 1e-12 for x, y in zip(totals, totals[1:]))

    def test_enumerates_every_pattern_once(self, rng):
        score = ImportanceScore(rng.random((3, 4)))
        sparsity = [2, 1, 3]
        emitted = [p.columns for p, _ in PatternSearch(score, sparsity)]
        assert len(emitted) == len(set(emitted)) == pattern_count(sparsity, 4)
        assert set(emitted) == {p.columns for p in all_patterns(sparsity, 4)}

    def test_full_budget_gives_one_pattern(self):
        score = ImportanceScore(np.ones((2, 3)))
        patterns = list(PatternSearch(score, [3, 3]))
        assert len(patterns) == 1
        assert patterns[0][0].mask.all()

    def test_reported_total_matches_pattern(self, rng):
        score = ImportanceScore(rng.random((3, 3)))
        for pattern, total in itertools.islice(PatternSearch(score, [2, 2, 2]), 10):
            assert pattern.score(score) == pytest.approx(total)


class TestHeuristic:
    def test_diagonal_first(self):
        inst = diagonal_instance()
        score = importance(inst.a, inst.b, inst.cost, 2)
        found = heuristic_solve(inst, score)
        np.testing.assert_allclose(found.plan.entries, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)
        assert found.cost == pytest.approx(1.0)
        assert found.attempts == 1
        assert found.method == "heuristic-s2"

    def test_skips_infeasible_patterns(self):
        a = DiscreteMeasure(np.array([0.3, 0.7]))
        b = DiscreteMeasure(np.array([0.7, 0.3]))
        inst = SparsityInstance.uniform(a, b, np.ones((2, 2)), 1)
        score = ImportanceScore(np.array([[1.0, 0.5], [0.5, 1.0]]))
        found = heuristic_solve(inst, score)
        np.testing.assert_allclose(found.plan.entries, [[0.0, 0.3], [0.7, 0.0]], atol=1e-12)
        assert found.attempts == 4

    def test_attempt_cap(self):
        a = DiscreteMeasure(np.array([0.3, 0.7]))
        b = DiscreteMeasure(np.array([0.7, 0.3]))
        inst = SparsityInstance.uniform(a, b, np.ones((2, 2)), 1)
        score = ImportanceScore(np.array([[1.0, 0.5], [0.5, 1.0]]))
        with pytest.raises(HeuristicExhaustedError) as excinfo:
            heuristic_solve(inst, score, attempt_cap=3)
        assert excinfo.value.attempts == 3

    def test_full_budget_equals_kantorovich(self, rng):
        for _ in range(10):
            a, b, C = random_pair(rng, 3, 4)
            inst = SparsityInstance.uniform(a, b, C, 4)
            _, unconstrained = solve_kantorovich(a, b, C)
            found = heuristic_solve(inst, importance(a, b, C, 1))
            assert found.attempts == 1
            assert found.cost == pytest.approx(unconstrained, abs=1e-9)
            assert oracle_solve(inst).cost == pytest.approx(unconstrained, abs=1e-9)

    def test_capacity_bounds_inside_pattern(self):
        inst = diagonal_instance(s=(2, 2))
        found = heuristic_solve(inst, ImportanceScore(np.ones((2, 2))), capacity=np.full((2, 2), 0.25))
        np.testing.assert_allclose(found.plan.entries, np.full((2, 2), 0.25), atol=1e-12)


class TestOracle:
    def test_diagonal(self):
        found = oracle_solve(diagonal_instance())
        assert found.cost == pytest.approx(1.0)
        assert found.attempts == 4
        assert found.method == "oracle"

    def test_cap(self):
        with pytest.raises(OracleTooLargeError) as excinfo:
            oracle_solve(diagonal_instance(), SparseConfig(oracle_cap=3))
        assert excinfo.value.patterns == 4

    def test_no_feasible_pattern(self):
        a = DiscreteMeasure(np.array([1.0, 1.0]))
        b = DiscreteMeasure(np.array([0.5, 0.5, 1.0]))
        inst = SparsityInstance.uniform(a, b, np.ones((2, 3)), 1)
        with pytest.raises(InfeasibleInstanceError):
            oracle_solve(inst)

    def test_parallel_matches_serial(self):
        inst, serial = next(solvable(20, n=3, m=4, s=2))
        parallel = oracle_solve(inst, SparseConfig(parallel_workers=4))
        assert parallel.cost == serial.cost
        assert parallel.pattern == serial.pattern

    @pytest.mark.parametrize("count", [10, pytest.param(100, marks=pytest.mark.slow)])
    def test_dominance_chain(self, count):
        validator = PlanValidator()
        checked = 0
        for inst, best in solvable(count):
            checked += 1
            _, unconstrained = solve_kantorovich(inst.a, inst.b, inst.cost)
            assert unconstrained <= best.cost + 1e-9
            for surrogate in (1, 2, 3, 4):
                try:
                    found = heuristic_solve(inst, importance(inst.a, inst.b, inst.cost, surrogate))
                except HeuristicExhaustedError:
                    continue
                assert best.cost <= found.cost + 1e-9
                assert validator.validate_sparse(found.plan, inst.sparsity) == []
                assert validator.validate_coupling(found.plan, inst.a, inst.b) == []
            assert validator.validate_sparse(best.plan, inst.sparsity) == []
        assert checked > 0


class TestRandomBaseline:
    def test_seeded(self):
        inst = next(seeded(1))
        first = random_baseline(inst, 15, seed=3)
        second = random_baseline(inst, 15, seed=3)
        assert [s.pattern for s in first] == [s.pattern for s in second]
        assert [s.cost for s in first] == [s.cost for s in second]

    def test_patterns_respect_budget(self):
        inst = next(seeded(1))
        for sample in random_baseline(inst, 20, seed=0):
            assert all(len(cols) == 2 for cols in sample.pattern.columns)

    def test_full_budget(self, rng):
        a, b, C = random_pair(rng, 3, 3)
        inst = SparsityInstance.uniform(a, b, C, 3)
        _, unconstrained = solve_kantorovich(a, b, C)
        for sample in random_baseline(inst, 5, seed=1):
            assert sample.cost == pytest.approx(unconstrained, abs=1e-9)

    def test_infeasible_samples_are_data(self):
        a = DiscreteMeasure(np.array([0.3, 0.7]))
        b = DiscreteMeasure(np.array([0.7, 0.3]))
        inst = SparsityInstance.uniform(a, b, np.ones((2, 2)), 1)
        samples = random_baseline(inst, 30, seed=0)
        assert any(not s.feasible for s in samples)
        assert all(s.cost is None for s in samples if not s.feasible)

    def test_samples_must_be_positive(self):
        with pytest.raises(InvalidArgumentError):
            random_baseline(diagonal_instance(), 0)


class TestSparsityMetrics:
    def test_equal_costs(self):
        metrics = sparsity_metrics(result(2.0), result(2.0), [])
        assert metrics.additional_cost_pct == 0.0
        assert metrics.solutions_beat_pct is None

    def test_additional_cost(self):
        metrics = sparsity_metrics(result(1.26), result(1.0), [])
        assert metrics.additional_cost_pct == pytest.approx(26.0)

    def test_time_saved(self):
        metrics = sparsity_metrics(result(1.0), result(1.0), [], timings={"heuristic": 0.1, "oracle": 1.0})
        assert metrics.time_saved_pct == pytest.approx(90.0)

    def test_solutions_beat(self):
        pattern = SupportPattern(columns=((0,),), m=1)
        baseline = [
            BaselineSample(pattern, 3.0),
            BaselineSample(pattern, 1.0),
            BaselineSample(pattern, None),
            BaselineSample(pattern, 2.5),
        ]
        metrics = sparsity_metrics(result(2.0), result(1.0), baseline)
        assert metrics.solutions_beat_pct == pytest.approx(200.0 / 3.0)

    def test_oracle_cost_must_be_positive(self):
        with pytest.raises(InvalidArgumentError):
            sparsity_metrics(result(1.0), result(0.0), [])
