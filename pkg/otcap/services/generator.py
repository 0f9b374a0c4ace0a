"""Seeded random instance generation."""

import logging
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import InvalidArgumentError
from ..models.instance_file import InstanceFile

logger = logging.getLogger(__name__)


class InstanceKind(str, Enum):
    """What an instance is generated for."""
    CAPACITY = "capacity"
    SPARSE = "sparse"
    COMBINED = "combined"


def _unit_interval(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on (0, 1]."""
    return 1.0 - rng.random(size)


def generate_instance(
    n: int,
    m: int,
    N: int = 1,
    kind: InstanceKind = InstanceKind.CAPACITY,
    seed: int = 0,
    sparsity: Optional[int] = None
) -> InstanceFile:
    """
    Random instance: weights and costs uniform on (0, 1], b rescaled to a's mass.

    Capacities satisfy M >= a b^T / mass(a) entrywise, so the fractioned
    product plan is feasible for every N >= 1. Same arguments, same document.

    Args:
        sparsity: Uniform per-source budget; defaults to max(1, m // 2)
    """
    kind = InstanceKind(kind)
    if n < 1 or m < 1 or N < 1:
        raise InvalidArgumentError(f"n, m and N must be positive, got {n}, {m}, {N}")

    rng = np.random.default_rng(seed)
    a = _unit_interval(rng, n)
    b = _unit_interval(rng, m)
    b = b * (a.sum() / b.sum())
    cost = _unit_interval(rng, (n, m))

    doc = {
        "a": a.tolist(),
        "b": b.tolist(),
        "costs": cost.tolist(),
        "steps": 1 if kind == InstanceKind.SPARSE else N,
        "seed": seed,
        "kind": kind.value,
        "meta": {"generator": "uniform", "n": n, "m": m},
    }

    if kind in (InstanceKind.CAPACITY, InstanceKind.COMBINED):
        witness = np.outer(a, b) / a.sum()
        capacity = witness * (1.0 + _unit_interval(rng, (n, m)))
        doc["capacities"] = capacity.tolist()

    if kind in (InstanceKind.SPARSE, InstanceKind.COMBINED):
        s = sparsity if sparsity is not None else max(1, m // 2)
        if not 1 <= s <= m:
            raise InvalidArgumentError(f"sparsity must lie in [1, {m}], got {s}")
        budgets = [s] * n
        doc["sparsity"] = budgets if kind == InstanceKind.SPARSE else [budgets] * N

    logger.debug(f"generated {kind.value} instance n={n} m={m} N={N} seed={seed}")
    return InstanceFile.model_validate(doc)
