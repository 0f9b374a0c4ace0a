"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from otcap.models import CapacityInstance, CostMatrix, DiscreteMeasure, SolverConfig
from otcap.services import load_instance_file, to_capacity_instance

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TWO_MINES_COST = [[1.0, 4.0], [3.0, 6.0]]
TWO_MINES_CAPACITY = [[1.0, 2.0], [2.0, 4.0]]


@pytest.fixture
def two_mines_path() -> Path:
    return FIXTURES / "two_mines.json"


@pytest.fixture
def two_mines(two_mines_path) -> CapacityInstance:
    return to_capacity_instance(load_instance_file(two_mines_path))


@pytest.fixture
def mines() -> DiscreteMeasure:
    return DiscreteMeasure(np.array([6.0, 8.0]))


@pytest.fixture
def warehouses() -> DiscreteMeasure:
    return DiscreteMeasure(np.array([4.0, 10.0]))


@pytest.fixture
def two_mines_cost() -> CostMatrix:
    return CostMatrix(np.array(TWO_MINES_COST))


@pytest.fixture
def solver_config() -> SolverConfig:
    return SolverConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


def random_pair(rng: np.random.Generator, n: int, m: int):
    """Strictly positive a, b with equal mass and a cost matrix in (0, 1]."""
    a = 1.0 - rng.random(n)
    b = 1.0 - rng.random(m)
    b = b * (a.sum() / b.sum())
    C = 1.0 - rng.random((n, m))
    return DiscreteMeasure(a), DiscreteMeasure(b), CostMatrix(C)
