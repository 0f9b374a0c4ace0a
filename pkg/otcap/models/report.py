"""Benchmark report models."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

CSV_COLUMNS = ["method", "n", "m", "N", "repeat", "status", "cost", "wall_time_s", "iterations"]

# grid rows derived from wall-clock measurements
TIMING_METRICS = ("time_saved_pct",)


@dataclass
class BenchRecord:
    """A single timed solve."""
    method: str
    n: int
    m: int
    N: int
    repeat: int
    status: str
    cost: Optional[float]
    wall_time_s: float
    iterations: int = 0
    backend: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "method": self.method,
            "n": self.n,
            "m": self.m,
            "N": self.N,
            "repeat": self.repeat,
            "status": self.status,
            "cost": self.cost,
            "wall_time_s": self.wall_time_s,
            "iterations": self.iterations,
            "backend": self.backend,
        }


@dataclass
class SparsityMetrics:
    """Heuristic-vs-oracle metrics for one instance or averaged over many."""
    additional_cost_pct: float
    time_saved_pct: float
    solutions_beat_pct: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "additional_cost_pct": self.additional_cost_pct,
            "time_saved_pct": self.time_saved_pct,
            "solutions_beat_pct": self.solutions_beat_pct,
        }


@dataclass
class BenchReport:
    """Per-run records plus aggregates over repeats."""
    name: str
    records: List[BenchRecord] = field(default_factory=list)
    grid: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(self, record: BenchRecord) -> None:
        self.records.append(record)

    def to_dataframe(self) -> pd.DataFrame:
        """Records as a DataFrame with the CSV column order first."""
        frame = pd.DataFrame([r.to_dict() for r in self.records])
        if frame.empty:
            return pd.DataFrame(columns=CSV_COLUMNS + ["backend"])
        return frame[CSV_COLUMNS + ["backend"]]

    def aggregates(self) -> pd.DataFrame:
        """mean / min / max wall time and mean cost per (backend, method, n, m, N)."""
        frame = self.to_dataframe()
        if frame.empty:
            return frame
        grouped = frame.groupby(["backend", "method", "n", "m", "N"], sort=False)
        summary = grouped["wall_time_s"].agg(["mean", "min", "max", "count"]).reset_index()
        summary["cost"] = grouped["cost"].mean().values
        return summary

    def grid_frame(self) -> pd.DataFrame:
        """The metric x surrogate grid as a DataFrame."""
        return pd.DataFrame(self.grid)

    def to_csv(self, path: Optional[str] = None) -> str:
        """Emit the records, or the metric grid when there is one, as CSV."""
        if self.grid:
            text = self.grid_frame().to_csv(index_label="metric", float_format="%.6g")
        else:
            text = self.to_dataframe().to_csv(index=False, float_format="%.10g")
        if path:
            with open(path, "w") as f:
                f.write(text)
        return text

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        records = [r.to_dict() for r in self.records]
        grid = self.grid
        if not include_timings:
            for r in records:
                r.pop("wall_time_s", None)
            grid = {
                column: {k: v for k, v in values.items() if k not in TIMING_METRICS}
                for column, values in grid.items()
            }
        return {
            "name": self.name,
            "records": records,
            "grid": grid,
            "metadata": self.metadata,
        }
