"""Bounded-variable primal simplex backend."""

import logging
import time
from typing import Optional, Tuple

import numpy as np

from ..models.config import SolverConfig
from ..models.lp import LinearProgram, LpSolution, LpStatus
from .base import BaseLpBackend, register_backend

logger = logging.getLogger(__name__)


class _SimplexRun:
    """
    Dense-tableau state for one solve.

    Variables 0..n-1 are structural, n..n+p-1 are phase-one artificials.
    Nonbasic variables sit at their lower bound (0) or, when at_upper is set,
    at their upper bound. The tableau T holds B^-1 [A | I]; d holds the
    reduced costs of the current phase.
    """

    def __init__(self, lp: LinearProgram, config: SolverConfig):
        self.lp = lp
        self.config = config
        self.n = lp.variable_count
        p = lp.constraint_count

        A = np.array(lp.eq_matrix, dtype=float)
        r = np.array(lp.eq_rhs, dtype=float)
        negative = r < 0
        A[negative] *= -1.0
        r[negative] *= -1.0
        self.A = A
        self.r = r

        self.T = np.hstack([A, np.eye(p)])
        self.upper = np.concatenate([lp.upper_bounds, np.full(p, np.inf)])
        self.basis = np.arange(self.n, self.n + p)
        self.xB = r.copy()
        self.at_upper = np.zeros(self.n + p, dtype=bool)
        self.is_basic = np.zeros(self.n + p, dtype=bool)
        self.is_basic[self.basis] = True
        self.rows = np.arange(p)  # original indices of rows still in the tableau

        # artificials never re-enter; fixed variables (u = 0) never move
        self.enterable = np.concatenate([lp.upper_bounds > 0, np.zeros(p, dtype=bool)])

        self.iterations = 0
        self.cap = config.iteration_cap(self.n, p)
        self.bland_switches = 0

    # -- pricing and ratio test -------------------------------------------------

    def _entering(self, d: np.ndarray, bland: bool) -> Tuple[Optional[int], int]:
        tol = self.config.opt_tol
        free = self.enterable[: d.shape[0]] & ~self.is_basic[: d.shape[0]]
        at_upper = self.at_upper[: d.shape[0]]
        improving = free & ((~at_upper & (d < -tol)) | (at_upper & (d > tol)))
        candidates = np.flatnonzero(improving)
        if candidates.size == 0:
            return None, 0
        if bland:
            q = int(candidates[0])
        else:
            # argmax returns the lowest index among equal magnitudes
            q = int(candidates[np.argmax(np.abs(d[candidates]))])
        return q, (-1 if at_upper[q] else 1)

    def _ratio_test(self, q: int, direction: int) -> Tuple[float, int]:
        """
        Largest feasible step along the entering direction.

        Returns:
            (step, leaving row) with row -1 for a bound flip of the entering
            variable and -2 for an unbounded ray
        """
        pivot_tol = self.config.pivot_tol
        alpha = direction * self.T[:, q]
        upper_b = self.upper[self.basis]

        ratios = np.full(alpha.shape[0], np.inf)
        down = alpha > pivot_tol
        ratios[down] = np.maximum(self.xB[down], 0.0) / alpha[down]
        up = (alpha < -pivot_tol) & np.isfinite(upper_b)
        ratios[up] = np.maximum(upper_b[up] - self.xB[up], 0.0) / -alpha[up]

        flip = self.upper[q]
        if ratios.size:
            best = float(ratios.min())
        else:
            best = np.inf

        if flip <= best:
            if np.isinf(flip):
                return np.inf, -2
            return float(flip), -1

        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, best))
        # lowest variable index among tied rows
        row = int(ties[np.argmin(self.basis[ties])])
        return best, row

    def _pivot(self, row: int, q: int, d: np.ndarray) -> None:
        T = self.T
        prow = T[row] / T[row, q]
        col = T[:, q].copy()
        T -= np.outer(col, prow)
        T[row] = prow
        d -= d[q] * prow

    # -- phases -----------------------------------------------------------------

    def _iterate(self, d: np.ndarray) -> LpStatus:
        degenerate_run = 0
        threshold = self.config.degenerate_threshold
        bland = False
        while True:
            if not bland and degenerate_run >= threshold:
                bland = True
                self.bland_switches += 1
            q, direction = self._entering(d, bland)
            if q is None:
                return LpStatus.OPTIMAL
            if self.iterations >= self.cap:
                return LpStatus.ITERATION_LIMIT
            self.iterations += 1

            step, row = self._ratio_test(q, direction)
            if row == -2:
                return LpStatus.UNBOUNDED

            if step > 0:
                self.xB -= step * direction * self.T[:, q]
                degenerate_run = 0
                bland = False
            else:
                degenerate_run += 1

            if row == -1:
                self.at_upper[q] = not self.at_upper[q]
                continue

            entering_value = step if direction > 0 else self.upper[q] - step
            leaving = self.basis[row]
            leaves_at_upper = direction * self.T[row, q] < 0

            self._pivot(row, q, d)
            self.xB[row] = entering_value
            self.basis[row] = q
            self.is_basic[leaving] = False
            self.is_basic[q] = True
            self.at_upper[leaving] = bool(leaves_at_upper)
            self.at_upper[q] = False

    def phase_one(self) -> LpStatus:
        """Minimize the sum of artificials; OPTIMAL means the LP is feasible."""
        cost = np.concatenate([np.zeros(self.n), np.ones(self.T.shape[0])])
        d = cost - cost[self.basis] @ self.T
        status = self._iterate(d)
        if status != LpStatus.OPTIMAL:
            return status

        artificial = self.basis >= self.n
        infeasibility = float(np.sum(self.xB[artificial]))
        scale = max(1.0, float(np.max(self.r, initial=0.0)))
        if infeasibility > self.config.feas_tol * scale:
            logger.debug(f"phase one ended with infeasibility {infeasibility:.3e}")
            return LpStatus.INFEASIBLE
        return LpStatus.OPTIMAL

    def _drive_out_artificials(self) -> None:
        """Pivot zero-valued artificials out of the basis; drop redundant rows."""
        n = self.n
        keep = np.ones(self.T.shape[0], dtype=bool)
        for row in range(self.T.shape[0]):
            if self.basis[row] < n:
                continue
            structural = self.T[row, :n]
            candidates = np.flatnonzero(~self.is_basic[:n] & (np.abs(structural) > 1e-9))
            if candidates.size == 0:
                keep[row] = False
                continue
            q = int(candidates[np.argmax(np.abs(structural[candidates]))])
            value = self.upper[q] if self.at_upper[q] else 0.0
            leaving = self.basis[row]
            self._pivot(row, q, np.zeros(self.T.shape[1]))
            self.xB[row] = value
            self.basis[row] = q
            self.is_basic[leaving] = False
            self.is_basic[q] = True
            self.at_upper[q] = False

        self.T = self.T[keep][:, :n]
        self.xB = self.xB[keep]
        self.basis = self.basis[keep]
        self.rows = self.rows[keep]
        self.upper = self.upper[:n]
        self.at_upper = self.at_upper[:n]
        self.is_basic = self.is_basic[:n]
        self.enterable = self.enterable[:n]

    def phase_two(self) -> LpStatus:
        """Optimize the real objective from the phase-one basis."""
        self._drive_out_artificials()
        cost = np.array(self.lp.objective, dtype=float)
        d = cost - cost[self.basis] @ self.T
        return self._iterate(d)

    def values(self) -> np.ndarray:
        """Current primal point, re-solved from the basis for accuracy."""
        x = np.zeros(self.n)
        nonbasic_upper = self.at_upper & ~self.is_basic
        x[nonbasic_upper] = self.upper[nonbasic_upper]
        x[self.basis] = self.xB

        if self.basis.size:
            A = self.A[self.rows]
            rhs = self.r[self.rows] - A[:, ~self.is_basic] @ x[~self.is_basic]
            try:
                polished = np.linalg.solve(A[:, self.basis], rhs)
            except np.linalg.LinAlgError:
                polished = None
            if polished is not None and np.all(np.isfinite(polished)):
                if np.max(np.abs(polished - self.xB)) < 1e-6:
                    x[self.basis] = polished

        x = np.clip(x, 0.0, self.upper)
        # round-off left on degenerate basics
        x[x < self.config.pivot_tol * max(1.0, float(np.max(np.abs(self.r), initial=0.0)))] = 0.0
        return x


class BoundedSimplexBackend(BaseLpBackend):
    """
    Primal simplex with native variable bounds.

    Pricing is Dantzig's most-negative reduced cost; after
    config.degenerate_threshold consecutive degenerate pivots it switches to
    Bland's lowest-index rule until progress resumes. Ratio-test ties go to
    the lowest variable index. The run is a deterministic function of the LP
    and the config.
    """

    name = "simplex"

    def solve(self, lp: LinearProgram) -> LpSolution:
        started = time.perf_counter()
        run = _SimplexRun(lp, self.config)

        status = run.phase_one()
        phase_one_iterations = run.iterations
        if status == LpStatus.OPTIMAL:
            status = run.phase_two()

        solution = LpSolution(
            status=status,
            iterations=run.iterations,
            backend=self.name,
            metadata={
                "phase_one_iterations": phase_one_iterations,
                "bland_switches": run.bland_switches,
            },
        )
        if status == LpStatus.OPTIMAL:
            values = run.values()
            solution.values = values
            solution.objective_value = float(lp.objective @ values)
        solution.wall_time = time.perf_counter() - started

        logger.debug(
            f"simplex {lp.name or '<lp>'}: {status.value} after {run.iterations} iterations "
            f"({lp.variable_count} vars, {lp.constraint_count} rows)"
        )
        return solution

    def check_feasible(self, lp: LinearProgram) -> bool:
        return _SimplexRun(lp, self.config).phase_one() == LpStatus.OPTIMAL


register_backend(BoundedSimplexBackend.name, BoundedSimplexBackend)
