"""Tests for the time-parameterized capacity-constrained problem."""

import numpy as np
import pytest

from otcap.errors import InfeasibleInstanceError, InvalidArgumentError, NotApplicableError
from otcap.models import CapacityInstance, CostMatrix, DiscreteMeasure, TransportPlan
from otcap.services import (
    check_instance_feasible,
    generate_instance,
    minimal_steps_for_unconstrained,
    screen_feasibility,
    solve_capacity,
    solve_general,
    solve_kantorovich,
    solve_uniform_fast,
    steps_for_plan,
    to_capacity_instance,
)
from otcap.services.generator import InstanceKind
from otcap.services.plan_validator import PlanValidator

from .conftest import TWO_MINES_CAPACITY, TWO_MINES_COST, random_pair


def seeded_instances(count: int, n: int = 10, steps: int = 10, offset: int = 0):
    for seed in range(offset, offset + count):
        yield to_capacity_instance(generate_instance(n, n, steps, InstanceKind.CAPACITY, seed=seed))


def single(a, b, capacity) -> CapacityInstance:
    a = DiscreteMeasure(np.array(a, dtype=float))
    b = DiscreteMeasure(np.array(b, dtype=float))
    capacity = np.array(capacity, dtype=float)
    return CapacityInstance.constant(a, b, np.ones(capacity.shape), capacity, steps=1)


class TestCapacityInstance:
    def test_requires_a_step(self, mines, warehouses):
        with pytest.raises(InvalidArgumentError):
            CapacityInstance(a=mines, b=warehouses, costs=(), capacities=())

    def test_shape_mismatch(self, mines, warehouses):
        with pytest.raises(InvalidArgumentError):
            CapacityInstance.constant(mines, warehouses, np.ones((2, 2)), np.ones((2, 3)), steps=2)

    def test_negative_capacity(self, mines, warehouses):
        with pytest.raises(InvalidArgumentError):
            CapacityInstance.constant(mines, warehouses, np.ones((2, 2)), -np.ones((2, 2)), steps=2)

    def test_is_constant(self, two_mines, mines, warehouses):
        assert two_mines.is_constant
        varying = CapacityInstance(
            a=mines,
            b=warehouses,
            costs=(CostMatrix(np.array(TWO_MINES_COST)), CostMatrix(np.array(TWO_MINES_COST) + 1)),
            capacities=(np.array(TWO_MINES_CAPACITY),) * 2,
        )
        assert not varying.is_constant


class TestScreenFeasibility:
    def test_two_mines_passes(self, two_mines):
        assert screen_feasibility(two_mines).is_empty

    def test_zero_capacity_row(self):
        inst = single([1.0, 1.0], [1.0, 1.0], [[0.0, 0.0], [5.0, 5.0]])
        report = screen_feasibility(inst)
        assert report.row_violations == [1]
        assert report.capacity_shortfall["sources"] == [1]

    def test_shortfall_is_one_based(self):
        report = screen_feasibility(single([2.0], [2.0], [[1.0]]))
        assert report.capacity_shortfall == {"sources": [1], "sinks": [1]}
        assert report.row_violations == []


class TestSolveGeneral:
    def test_two_mines(self, two_mines):
        plan = solve_general(two_mines)
        np.testing.assert_allclose(plan.aggregate.entries, [[2.0, 4.0], [2.0, 6.0]], atol=1e-6)
        assert plan.cost == pytest.approx(60.0, abs=1e-6)
        assert plan.metadata["method"] == "general"
        assert plan.metadata["variables"] == 8
        assert PlanValidator().validate_time_expanded(plan, two_mines) == []

    def test_inactive_capacity_matches_kantorovich(self, rng):
        for _ in range(10):
            a, b, C = random_pair(rng, 3, 4)
            huge = np.full(C.shape, a.mass)
            inst = CapacityInstance.constant(a, b, C, huge, steps=1)
            _, unconstrained = solve_kantorovich(a, b, C)
            assert solve_general(inst).cost == pytest.approx(unconstrained, rel=1e-9, abs=1e-12)

    def test_infeasible_carries_report(self):
        with pytest.raises(InfeasibleInstanceError) as excinfo:
            solve_general(single([1.0], [1.0], [[0.4]]))
        assert excinfo.value.report.capacity_shortfall["sources"] == [1]

    def test_time_varying_instance(self, mines, warehouses):
        inst = CapacityInstance(
            a=mines,
            b=warehouses,
            costs=(CostMatrix(np.array([[1.0, 4.0], [3.0, 6.0]])), CostMatrix(np.array([[5.0, 1.0], [1.0, 5.0]]))),
            capacities=(np.full((2, 2), 3.0), np.full((2, 2), 3.0)),
        )
        plan = solve_capacity(inst)
        assert plan.metadata["method"] == "general"
        assert PlanValidator().validate_time_expanded(plan, inst) == []

    def test_mass_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            solve_general(single([1.0], [2.0], [[5.0]]))


class TestSolveUniformFast:
    def test_two_mines(self, two_mines):
        plan = solve_uniform_fast(two_mines)
        np.testing.assert_allclose(plan.aggregate.entries, [[2.0, 4.0], [2.0, 6.0]], atol=1e-6)
        assert plan.cost == pytest.approx(60.0, abs=1e-6)
        for gamma in plan.gammas:
            np.testing.assert_allclose(gamma.entries, [[1.0, 2.0], [1.0, 3.0]], atol=1e-9)
        assert PlanValidator().validate_time_expanded(plan, two_mines) == []

    def test_rejects_time_varying(self, mines, warehouses):
        inst = CapacityInstance(
            a=mines,
            b=warehouses,
            costs=(CostMatrix(np.ones((2, 2))), CostMatrix(np.full((2, 2), 2.0))),
            capacities=(np.full((2, 2), 10.0),) * 2,
        )
        with pytest.raises(InvalidArgumentError):
            solve_uniform_fast(inst)

    def test_single_step_is_bounded_transport(self):
        inst = single([1.0, 1.0], [1.0, 1.0], [[0.5, 1.0], [1.0, 1.0]])
        plan = solve_uniform_fast(inst)
        assert plan.steps == 1
        np.testing.assert_array_equal(plan.gammas[0].entries, plan.aggregate.entries)

    def test_infeasible(self):
        with pytest.raises(InfeasibleInstanceError):
            solve_uniform_fast(single([1.0], [1.0], [[0.4]]))


class TestReformulation:
    @pytest.mark.parametrize("count", [20, pytest.param(100, marks=pytest.mark.slow)])
    def test_restriction_inequality(self, count):
        for inst in seeded_instances(count):
            _, unconstrained = solve_kantorovich(inst.a, inst.b, inst.costs[0])
            assert unconstrained <= solve_uniform_fast(inst).cost + 1e-9

    @pytest.mark.parametrize("count", [10, pytest.param(100, marks=pytest.mark.slow)])
    def test_general_equals_fast(self, count):
        validator = PlanValidator()
        for inst in seeded_instances(count):
            general = solve_general(inst)
            fast = solve_uniform_fast(inst)
            assert abs(general.cost - fast.cost) <= 1e-6 * max(1.0, general.cost)
            assert validator.validate_time_expanded(general, inst) == []
            assert validator.validate_time_expanded(fast, inst) == []

    @pytest.mark.slow
    @pytest.mark.parametrize("steps", [50, 100])
    def test_general_equals_fast_many_steps(self, steps):
        for inst in seeded_instances(100, steps=steps):
            general = solve_general(inst)
            fast = solve_uniform_fast(inst)
            assert abs(general.cost - fast.cost) <= 1e-6 * max(1.0, general.cost)

    def test_solve_capacity_dispatch(self, two_mines):
        assert solve_capacity(two_mines).metadata["method"] == "fast"


class TestFeasibility:
    def test_two_mines(self, two_mines):
        assert check_instance_feasible(two_mines)

    def test_bound_conflict(self):
        assert not check_instance_feasible(single([1.0], [1.0], [[0.4]]))

    def test_generated_instances_are_feasible(self):
        for inst in seeded_instances(30):
            assert screen_feasibility(inst).is_empty
            assert check_instance_feasible(inst)


class TestMinimalSteps:
    def test_steps_for_two_mines_plan(self):
        plan = TransportPlan(np.array([[2.0, 4.0], [2.0, 6.0]]))
        assert steps_for_plan(plan, np.array(TWO_MINES_CAPACITY)) == 2

    def test_inactive_capacity(self):
        plan = TransportPlan(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert steps_for_plan(plan, np.full((2, 2), 5.0)) == 1

    def test_zero_plan(self):
        assert steps_for_plan(TransportPlan(np.zeros((2, 2))), np.ones((2, 2))) == 1

    def test_zero_capacity_under_mass(self):
        plan = TransportPlan(np.array([[1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(NotApplicableError):
            steps_for_plan(plan, np.array([[0.0, 1.0], [1.0, 1.0]]))

    def test_free_steps_attain_kantorovich(self, rng):
        for _ in range(50):
            a, b, C = random_pair(rng, 4, 4)
            M = (1.0 - rng.random((4, 4))) * 0.2
            steps = minimal_steps_for_unconstrained(a, b, C, M)
            _, unconstrained = solve_kantorovich(a, b, C)
            fast = solve_uniform_fast(CapacityInstance.constant(a, b, C, M, steps))
            assert fast.cost == pytest.approx(unconstrained, rel=1e-9)
