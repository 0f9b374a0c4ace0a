"""Reading and writing instance files."""

import json
import logging
import re
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..errors import InstanceFormatError
from ..models.instance import CapacityInstance, SparsityInstance
from ..models.instance_file import InstanceFile
from ..models.measure import CostMatrix, DiscreteMeasure

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _line_of(text: str, key: str) -> Optional[int]:
    """1-based line of the first occurrence of a JSON key."""
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not match:
        return None
    return text.count("\n", 0, match.start()) + 1


def parse_instance(text: str, source: str = "<string>") -> InstanceFile:
    """Parse and shape-check an instance document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{source}: invalid JSON: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise InstanceFormatError(f"{source}: top level must be an object", line=1)

    try:
        return InstanceFile.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = [str(part) for part in error.get("loc", ())]
        # model-level shape errors name the field at the start of the message
        message = error.get("msg", "invalid value")
        field = ".".join(loc)
        if not field:
            match = re.search(r"(?:Value error, )?([a-z_]+)(?:\[|:)", message)
            field = match.group(1) if match else ""
        line = _line_of(text, field.split(".")[0]) if field else None
        raise InstanceFormatError(f"{source}: {message}", field=field, line=line) from e


def load_instance_file(path: PathLike) -> InstanceFile:
    """Read an instance file from disk."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InstanceFormatError(f"cannot read {path}: {e.strerror}") from e
    doc = parse_instance(text, source=str(path))
    logger.info(f"Loaded instance {path.name}: n={doc.n}, m={doc.m}, N={doc.steps}")
    return doc


def dump_instance(doc: InstanceFile) -> str:
    """Serialize with fixed key order so equal documents give equal bytes."""
    return json.dumps(doc.model_dump(exclude_none=True), indent=2) + "\n"


def write_instance_file(doc: InstanceFile, path: PathLike) -> Path:
    """Write an instance file to disk."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_instance(doc))
    logger.info(f"Wrote instance {path}")
    return path


def to_measures(doc: InstanceFile) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    """Source and sink measures, with support points when the file has them."""
    if doc.points_a is not None and len(doc.points_a) != doc.n:
        raise InstanceFormatError("points_a must have one point per source", field="points_a")
    if doc.points_b is not None and len(doc.points_b) != doc.m:
        raise InstanceFormatError("points_b must have one point per sink", field="points_b")
    return (
        DiscreteMeasure(weights=np.asarray(doc.a, dtype=float), points=doc.points_a),
        DiscreteMeasure(weights=np.asarray(doc.b, dtype=float), points=doc.points_b),
    )


def to_capacity_instance(doc: InstanceFile) -> CapacityInstance:
    """CapacityInstance; missing capacities (or null entries) mean no bound."""
    a, b = to_measures(doc)
    costs = [CostMatrix(np.asarray(c, dtype=float)) for c in doc.cost_stack()]
    stack = doc.capacity_stack()
    if stack is None:
        capacities = [np.full((doc.n, doc.m), np.inf)] * doc.steps
    else:
        capacities = [
            np.array([[np.inf if v is None else v for v in row] for row in matrix], dtype=float)
            for matrix in stack
        ]
    return CapacityInstance(a=a, b=b, costs=tuple(costs), capacities=tuple(capacities))


def to_sparsity_instance(
    doc: InstanceFile,
    step: int = 0,
    sparsity: Optional[int] = None
) -> SparsityInstance:
    """
    SparsityInstance for one step's cost matrix.

    Args:
        sparsity: Uniform budget overriding the file's sparsity field
    """
    a, b = to_measures(doc)
    cost = CostMatrix(np.asarray(doc.cost_stack()[step], dtype=float))
    if sparsity is not None:
        budgets = (int(sparsity),) * doc.n
    else:
        stack = doc.sparsity_stack()
        if stack is None:
            raise InstanceFormatError("a sparsity budget is required for sparse solves", field="sparsity")
        budgets = tuple(stack[step])
    return SparsityInstance(a=a, b=b, cost=cost, sparsity=budgets)
