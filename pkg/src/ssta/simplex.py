"""Dense simplex solver for  min c'x  s.t.  Ax <= b, x >= 0.

Two entry paths:

* when c >= 0 (the minimax decomposition LPs), the all-slack basis is
  dual feasible and the problem is solved by the dual simplex method
  directly, with no artificial variables;
* otherwise a standard two-phase primal simplex runs.

Pivot rules are fixed (Dantzig with lowest-index tie breaking, Bland
after a run of degenerate pivots) so identical inputs give bit-identical
solutions.  Problem sizes here are a few hundred rows by a few dozen
columns; dense numpy tableaus are ample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = 1e-9
DEGENERATE_PIVOT_LIMIT = 1000


class LpInfeasibleError(Exception):
    """The constraint set Ax <= b, x >= 0 is empty."""


class LpUnboundedError(Exception):
    """The objective is unbounded below on the feasible set."""


class PivotLimitError(Exception):
    """The iteration cap was exceeded (numerical trouble)."""


@dataclass
class LpProblem:
    """min c'x  s.t.  A x <= b,  x >= 0, all arrays dense."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,):
            raise ValueError(
                f"inconsistent LP dimensions: A {self.A.shape}, "
                f"c {self.c.shape}, b {self.b.shape}"
            )


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    iterations: int


def lp_solve(p: LpProblem, max_iter: int = 100_000) -> LpSolution:
    """Solve the LP to a certified optimal basic solution.

    At termination all reduced costs are nonnegative (primal optimality)
    and all basic values are nonnegative (feasibility).
    """
    if _is_minimax_form(p):
        return _minimax_primal(p, max_iter)
    return _two_phase(p, max_iter)


def _is_minimax_form(p: LpProblem) -> bool:
    """True for  min t  s.t.  +-(Mw) - t <= +-y  (sup-norm fit LPs).

    For these, pivoting t into the most violated row yields a feasible
    basis immediately, so no phase-1 artificials are needed.
    """
    n = p.c.size
    return (
        n >= 1
        and p.c[-1] == 1.0
        and not np.any(p.c[:-1])
        and np.all(p.A[:, -1] == -1.0)
    )


def _minimax_primal(p: LpProblem, max_iter: int) -> LpSolution:
    m, n = p.A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = p.A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = p.b
    T[m, :n] = p.c
    basis = list(range(n, n + m))
    iters = 0
    row = int(np.argmin(p.b))
    if p.b[row] < 0.0:
        _pivot(T, basis, row, n - 1)  # t enters; all rhs become b_i - b_row >= 0
        iters = 1
    iters += _primal_iterate(T, basis, m, n + m, max_iter)
    return _solution(p, T, basis, iters)


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _solution(p: LpProblem, T, basis, iterations) -> LpSolution:
    n = p.c.size
    x = np.zeros(n)
    for r, col in enumerate(basis):
        if col < n:
            x[col] = max(T[r, -1], 0.0)
    return LpSolution(x=x, objective=float(np.dot(p.c, x)), iterations=iterations)


def _dual_simplex(p: LpProblem, max_iter: int) -> LpSolution:
    m, n = p.A.shape
    # Columns: n structural, m slacks, last column = rhs.  Bottom row
    # holds the reduced costs, which stay nonnegative throughout.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = p.A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = p.b
    T[m, :n] = p.c
    basis = list(range(n, n + m))
    for it in range(max_iter):
        rhs = T[:m, -1]
        row = int(np.argmin(rhs))
        if rhs[row] >= -EPS:
            return _solution(p, T, basis, it)
        arow = T[row, : n + m]
        candidates = np.where(arow < -EPS)[0]
        if candidates.size == 0:
            raise LpInfeasibleError("dual simplex found an infeasible row")
        ratios = T[m, candidates] / (-arow[candidates])
        col = int(candidates[np.argmin(ratios)])
        _pivot(T, basis, row, col)
    raise PivotLimitError(f"dual simplex exceeded {max_iter} pivots")


def _primal_iterate(T, basis, m, n_cols, max_iter):
    degenerate_run = 0
    for it in range(max_iter):
        costs = T[-1, :n_cols]
        if degenerate_run > DEGENERATE_PIVOT_LIMIT:
            negative = np.where(costs < -EPS)[0]  # Bland: lowest index
            if negative.size == 0:
                return it
            col = int(negative[0])
        else:
            col = int(np.argmin(costs))
            if costs[col] >= -EPS:
                return it
        column = T[:m, col]
        eligible = np.where(column > EPS)[0]
        if eligible.size == 0:
            raise LpUnboundedError("objective unbounded below")
        ratios = T[eligible, -1] / column[eligible]
        row = int(eligible[np.argmin(ratios)])
        if ratios[np.argmin(ratios)] < EPS:
            degenerate_run += 1
        else:
            degenerate_run = 0
        _pivot(T, basis, row, col)
    raise PivotLimitError(f"primal simplex exceeded {max_iter} pivots")


def _two_phase(p: LpProblem, max_iter: int) -> LpSolution:
    m, n = p.A.shape
    A = p.A.copy()
    b = p.b.copy()
    flip = b < 0
    A[flip] *= -1.0
    slack_sign = np.where(flip, -1.0, 1.0)
    b[flip] *= -1.0
    art_rows = np.where(flip)[0]
    n_art = art_rows.size

    total = n + m + n_art
    T = np.zeros((m + 2, total + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.diag(slack_sign)
    for k, r in enumerate(art_rows):
        T[r, n + m + k] = 1.0
    T[:m, -1] = b
    T[-2, :n] = p.c  # phase-2 cost row, updated by every pivot
    # Phase-1 cost row (sum of artificials), expressed through the basis.
    T[-1, : n + m] = -T[art_rows, : n + m].sum(axis=0)
    T[-1, -1] = -b[art_rows].sum()

    basis = [n + i for i in range(m)]
    for k, r in enumerate(art_rows):
        basis[r] = n + m + k

    iters = _primal_iterate(T, basis, m, total, max_iter)
    if T[-1, -1] < -1e-7:
        raise LpInfeasibleError(
            f"phase 1 ended with residual infeasibility {-T[-1, -1]:.3e}"
        )
    # Drive lingering degenerate artificials out of the basis.
    for r in range(m):
        if basis[r] >= n + m:
            pivots = np.where(np.abs(T[r, : n + m]) > EPS)[0]
            if pivots.size:
                _pivot(T, basis, r, int(pivots[0]))
    # Phase 2: drop the phase-1 row and the artificial columns.
    T2 = np.hstack([T[:-1, : n + m], T[:-1, -1:]])
    iters += _primal_iterate(T2, basis, m, n + m, max_iter)
    return _solution(p, T2, basis, iters)
