"""Tests for Kantorovich transport and Wasserstein distances."""

import numpy as np
import pytest

from otcap.errors import InvalidArgumentError
from otcap.models import CostMatrix, DiscreteMeasure
from otcap.services import scale, scale_plan, scaling_check, solve_kantorovich, wasserstein_distance
from otcap.services.plan_validator import PlanValidator

from .conftest import random_pair


class TestSolveKantorovich:
    def test_single_atom(self):
        one = DiscreteMeasure(np.array([1.0]))
        plan, cost = solve_kantorovich(one, one, CostMatrix(np.array([[5.0]])))
        np.testing.assert_allclose(plan.entries, [[1.0]])
        assert cost == pytest.approx(5.0)

    def test_two_mines_every_coupling_costs_sixty(self, mines, warehouses, two_mines_cost):
        # C is additive (u = (0, 2), v = (1, 4)) so the cost does not depend on the coupling
        plan, cost = solve_kantorovich(mines, warehouses, two_mines_cost)
        assert cost == pytest.approx(60.0, abs=1e-9)
        for t in np.linspace(0.0, 4.0, 9):
            family = np.array([[t, 6.0 - t], [4.0 - t, 4.0 + t]])
            assert float(np.sum(family * two_mines_cost.entries)) == pytest.approx(60.0)

    def test_zero_cost_matching(self):
        half = DiscreteMeasure(np.array([0.5, 0.5]))
        plan, cost = solve_kantorovich(half, half, CostMatrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
        np.testing.assert_allclose(plan.entries, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_mass_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            solve_kantorovich(
                DiscreteMeasure(np.array([1.0])),
                DiscreteMeasure(np.array([2.0])),
                CostMatrix(np.array([[1.0]])),
            )

    def test_shape_mismatch(self, mines, warehouses):
        with pytest.raises(InvalidArgumentError):
            solve_kantorovich(mines, warehouses, CostMatrix(np.ones((3, 2))))

    def test_marginal_conservation(self, rng):
        validator = PlanValidator()
        for _ in range(20):
            a, b, C = random_pair(rng, 4, 5)
            plan, cost = solve_kantorovich(a, b, C)
            assert validator.validate_coupling(plan, a, b) == []
            assert validator.validate_cost(plan, C, cost) == []

    def test_l1_rows_are_fixed_by_the_marginal(self, rng):
        # an l1 row budget can never bind: every feasible row has norm a_j
        for _ in range(20):
            a, b, C = random_pair(rng, 4, 4)
            plan, _ = solve_kantorovich(a, b, C)
            np.testing.assert_allclose(plan.l1_row_norms, a.weights, atol=1e-9)


class TestScaling:
    @pytest.mark.parametrize("c", [2.0, 10.0])
    def test_scaled_cost(self, rng, c):
        for _ in range(50):
            a, b, C = random_pair(rng, 3, 4)
            cost, scaled_cost = scaling_check(a, b, C, c)
            assert scaled_cost == pytest.approx(cost / c, rel=1e-9)

    def test_scaled_plan_is_feasible(self, rng):
        validator = PlanValidator()
        a, b, C = random_pair(rng, 3, 3)
        plan, _ = solve_kantorovich(a, b, C)
        assert validator.validate_coupling(scale_plan(plan, 4.0), scale(a, 4.0), scale(b, 4.0)) == []


def random_measure(rng, atoms: int, dim: int = 2) -> DiscreteMeasure:
    return DiscreteMeasure.from_points(rng.random((atoms, dim)), weights=rng.dirichlet(np.ones(atoms)))


class TestWasserstein:
    def test_translation_on_the_line(self):
        mu = DiscreteMeasure(np.array([1.0]), points=[0.0])
        nu = DiscreteMeasure(np.array([1.0]), points=[3.0])
        assert wasserstein_distance(mu, nu, p=1) == pytest.approx(3.0)

    def test_shift_beats_crossing(self):
        mu = DiscreteMeasure(np.array([0.5, 0.5]), points=[0.0, 1.0])
        nu = DiscreteMeasure(np.array([0.5, 0.5]), points=[1.0, 2.0])
        assert wasserstein_distance(mu, nu, p=2) == pytest.approx(1.0)

    def test_missing_points(self):
        mu = DiscreteMeasure(np.array([1.0]))
        with pytest.raises(InvalidArgumentError):
            wasserstein_distance(mu, mu)

    def test_order_below_one(self):
        mu = DiscreteMeasure(np.array([1.0]), points=[0.0])
        with pytest.raises(InvalidArgumentError):
            wasserstein_distance(mu, mu, p=0.5)

    def test_requires_probability_measures(self):
        mu = DiscreteMeasure(np.array([2.0]), points=[0.0])
        with pytest.raises(InvalidArgumentError):
            wasserstein_distance(mu, mu)

    def test_callable_metric(self):
        mu = DiscreteMeasure(np.array([1.0]), points=[[0.0, 0.0]])
        nu = DiscreteMeasure(np.array([1.0]), points=[[3.0, 4.0]])
        manhattan = lambda x, y: float(np.abs(x - y).sum())  # noqa: E731
        assert wasserstein_distance(mu, nu, metric=manhattan) == pytest.approx(7.0)
        assert wasserstein_distance(mu, nu) == pytest.approx(5.0)

    @pytest.mark.parametrize("p", [1, 2])
    def test_metric_axioms(self, rng, p):
        for _ in range(50):
            sizes = rng.integers(1, 5, size=3)
            mu, nu, rho = (random_measure(rng, int(k)) for k in sizes)
            assert wasserstein_distance(mu, mu, p=p) == pytest.approx(0.0, abs=1e-9)
            d_mn = wasserstein_distance(mu, nu, p=p)
            assert d_mn == pytest.approx(wasserstein_distance(nu, mu, p=p), abs=1e-9)
            d_nr = wasserstein_distance(nu, rho, p=p)
            d_mr = wasserstein_distance(mu, rho, p=p)
            assert d_mr <= d_mn + d_nr + 1e-7
