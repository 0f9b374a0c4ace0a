"""Operations on discrete measures."""

import numpy as np

from ..errors import DegenerateMeasureError, InvalidArgumentError
from ..models.measure import DiscreteMeasure, TransportPlan


def total_mass(m: DiscreteMeasure) -> float:
    """Sum of weights."""
    return float(np.sum(m.weights))


def scale(m: DiscreteMeasure, c: float) -> DiscreteMeasure:
    """Divide every weight by c > 0."""
    if not c > 0:
        raise InvalidArgumentError(f"scale factor must be positive, got {c}")
    return DiscreteMeasure(weights=m.weights / c, points=m.points)


def scale_plan(plan: TransportPlan, c: float) -> TransportPlan:
    """Divide every plan entry by c > 0 (plan-level counterpart of scale)."""
    if not c > 0:
        raise InvalidArgumentError(f"scale factor must be positive, got {c}")
    return TransportPlan(plan.entries / c)


def product_plan(a: DiscreteMeasure, b: DiscreteMeasure) -> TransportPlan:
    """
    Outer-product coupling a_j * b_k / total_mass(a).

    Its marginals are a and b whenever both measures carry the same mass.
    """
    mass = total_mass(a)
    if mass <= 0:
        raise DegenerateMeasureError("product plan needs a source measure with positive mass")
    return TransportPlan(np.outer(a.weights, b.weights) / mass)
