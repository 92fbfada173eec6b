"""Dense dual simplex for covering LPs.

Solves  minimize c.x  subject to  A x >= b,  x >= 0  with c >= 0.
The all-slack basis is dual feasible for such problems, so no phase 1 is
needed: the dual simplex pivots until the basis is primal feasible.
Pivoting follows the least-index rule in both the leaving and the entering
choice, which makes the run deterministic and rules out cycling.
"""
import logging
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import IterationLimitExceeded, LpInfeasible, Unbounded

logger = logging.getLogger('mapredsched')
PIVOT_TOL = 1e-11
PRIMAL_TOL = 1e-9

class LinearConstraint(NamedTuple):
    """sum(coefficients[i] * x[i]) >= rhs, variables by index."""
    coefficients: Mapping[int, float]
    rhs: float

@dataclass(frozen=True)
class LpVertex:
    """An optimal basic solution."""
    x: Tuple[float, ...]
    objective: float
    pivots: int

def _tableau(constraints: Sequence[LinearConstraint], n: int):
    k = len(constraints)
    A = np.zeros((k, n))
    b = np.empty(k)
    for i, con in enumerate(constraints):
        for var, coef in con.coefficients.items():
            A[i, var] += coef
        b[i] = con.rhs
    # rows read  s_i - A_i x = -b_i,  the slacks s form the starting basis
    return np.hstack([-A, np.eye(k)]), -b

def _pivot(T: np.ndarray, beta: np.ndarray, d: np.ndarray, r: int, e: int) -> None:
    """Brings column e into the basis at row r, in place."""
    pivot = T[r, e]
    T[r] /= pivot
    beta[r] /= pivot
    col = T[:, e].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    beta -= col * beta[r]
    T[:, e] = 0.0
    T[r, e] = 1.0
    d -= d[e] * T[r]
    d[e] = 0.0

def lp_core_solve(constraints: Sequence[LinearConstraint], objective: Sequence[float],
                  max_pivots: Optional[int]=None) -> LpVertex:
    """Returns an optimal vertex of min objective.x over the constraints and x >= 0.

    Raises Unbounded for a negative objective coefficient (the covering form
    cannot bound it) and LpInfeasible when some row can never be satisfied.
    """
    c = np.asarray(objective, dtype=float)
    n = c.size
    if (c < 0).any():
        raise Unbounded(f'Objective has negative coefficients at {np.flatnonzero(c < 0).tolist()}.')
    k = len(constraints)
    if k == 0:
        return LpVertex(tuple(0.0 for _ in range(n)), 0.0, 0)

    T, beta = _tableau(constraints, n)
    d = np.concatenate([c, np.zeros(k)]) # reduced costs
    basis = np.arange(n, n+k)
    scale = max(1.0, float(np.abs(beta).max()))
    primal_tol = PRIMAL_TOL * scale
    max_pivots = max_pivots or 50 * (n+k)

    pivots = 0
    while True:
        infeasible = np.flatnonzero(beta < -primal_tol)
        if infeasible.size == 0:
            break
        if pivots >= max_pivots:
            raise IterationLimitExceeded(f'Dual simplex did not converge in {max_pivots} pivots.')
        r = infeasible[np.argmin(basis[infeasible])]
        row = T[r]
        candidates = np.flatnonzero(row < -PIVOT_TOL)
        if candidates.size == 0:
            raise LpInfeasible(f'Constraint row {r} cannot be satisfied.', details=int(r))
        ratios = np.maximum(d[candidates], 0.0) / -row[candidates]
        best = ratios.min()
        e = candidates[np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, best))[0]]

        _pivot(T, beta, d, r, e)
        basis[r] = e
        pivots += 1

    x = np.zeros(n+k)
    x[basis] = np.maximum(beta, 0.0)
    x = x[:n]
    logger.debug(f'Dual simplex solved {k} rows x {n} columns in {pivots} pivots.')
    return LpVertex(tuple(float(v) for v in x), float(c @ x), pivots)
