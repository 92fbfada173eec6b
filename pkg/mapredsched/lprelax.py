"""LP relaxation of weighted completion time for map/reduce jobs.

Variables are the job completion times C_j and map-phase completion times C_j^M.
Each job gets two phase rows (release plus map work, then reduce work), and
every job set S gets the subset cut

    sum_{j in S} p_j C_j >= P(S)^2 / (2 mu) + sum_{j in S} p_j^2 / (2 mu_j)

There are 2^N - 1 subset cuts, so the LP is solved by row generation: the
separation oracle finds the most violated cut in O(N log N) by scanning
prefixes of the jobs sorted by C_j - p_j / (2 mu_j).
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import *
from .lpcore import LinearConstraint, lp_core_solve
from .model import DerivedStats, Workload
from .utils import FEASIBILITY_TOL, VIOLATION_TOL

logger = logging.getLogger('mapredsched')
MAX_ENUMERATED_JOBS = 20
MAX_EXHAUSTIVE_LP_JOBS = 12

@dataclass(frozen=True)
class LpSolution:
    """Optimal LP point, C and C_M keyed by job id."""
    C: Mapping[int, float]
    C_M: Mapping[int, float]
    objective: float
    generated_sets: Tuple[FrozenSet[int], ...]
    iterations: int

@dataclass(frozen=True)
class ViolationReport:
    """A job set and its violation V(S) at the candidate point."""
    subset: FrozenSet[int]
    value: float

# variable layout: C_j at j-1, C_j^M at N+j-1
def _c(job_id: int) -> int:
    return job_id - 1

def _cm(job_id: int, n: int) -> int:
    return n + job_id - 1

def base_constraints(w: Workload, s: DerivedStats) -> List[LinearConstraint]:
    """Phase rows of every job, in their tightest combined form.

    C_j^M >= r_j + max(p_j^M / mu_j, p^M_{j,1} / v_1)
    C_j - C_j^M >= max(p_j^R / mu_j, p^R_{j,1} / v_1)
    """
    n = w.n
    v1 = w.cluster.speeds[0]
    rows = []
    for job in w.jobs:
        mu_j = s.mu_job[job.id]
        map_time = max(s.p_map[job.id] / mu_j, job.largest_map / v1)
        reduce_time = max(s.p_reduce[job.id] / mu_j, job.largest_reduce / v1)
        rows.append(LinearConstraint({_cm(job.id, n): 1.0}, job.release + map_time))
        rows.append(LinearConstraint({_c(job.id): 1.0, _cm(job.id, n): -1.0}, reduce_time))
    return rows

def _subset_rhs(subset: Iterable[int], s: DerivedStats) -> Tuple[float, float]:
    """P(S) and the right-hand side of the subset cut."""
    ps = [s.p[j] for j in subset]
    total = math.fsum(ps)
    rhs = total * total / (2 * s.mu) + math.fsum(s.p[j] ** 2 / (2 * s.mu_job[j]) for j in subset)
    return total, rhs

def violation(subset: Iterable[int], C: Mapping[int, float], s: DerivedStats) -> float:
    """V(S): how far the subset cut of S is from holding at C (positive means violated)."""
    subset = list(subset)
    if not subset:
        raise EmptySubset('Violation is only defined for nonempty job sets.')
    _, rhs = _subset_rhs(subset, s)
    return rhs - math.fsum(s.p[j] * C[j] for j in subset)

def queyranne_cut(subset: Iterable[int], s: DerivedStats) -> LinearConstraint:
    """The subset cut of S, divided by P(S) so the row is measured in seconds."""
    subset = sorted(subset)
    if not subset:
        raise EmptySubset('Cannot build a cut for an empty job set.')
    total, rhs = _subset_rhs(subset, s)
    if total == 0:
        return LinearConstraint({}, 0.0)
    return LinearConstraint({_c(j): s.p[j] / total for j in subset}, rhs / total)

def oracle_key(job_id: int, C: Mapping[int, float], s: DerivedStats) -> float:
    """Scan key, every most violated set is a prefix of the jobs sorted by it."""
    return C[job_id] - s.p[job_id] / (2 * s.mu_job[job_id])

def separation_oracle(C: Mapping[int, float], s: DerivedStats,
                      tol: float=VIOLATION_TOL) -> Optional[ViolationReport]:
    """Finds the most violated subset cut, None when nothing exceeds tol.

    Only prefixes of the jobs in ascending oracle_key order (ties by id) are
    scanned, V is updated incrementally along the scan.
    """
    order = sorted(C, key=lambda j: (oracle_key(j, C, s), j))
    best_value, best_len = -math.inf, 0
    total = weighted = separable = 0.0
    for i, j in enumerate(order, 1):
        total += s.p[j]
        weighted += s.p[j] * C[j]
        separable += s.p[j] ** 2 / (2 * s.mu_job[j])
        value = total * total / (2 * s.mu) + separable - weighted
        if value > best_value:
            best_value, best_len = value, i
    if best_value <= tol:
        return None
    subset = frozenset(order[:best_len])
    # report the exact V of the chosen set, not the running sum
    return ViolationReport(subset, violation(subset, C, s))

def brute_force_oracle(C: Mapping[int, float], s: DerivedStats,
                       tol: float=VIOLATION_TOL) -> Optional[ViolationReport]:
    """Most violated subset cut by enumerating all nonempty job sets.

    Ties go to the lexicographically smallest sorted id tuple.
    """
    ids = sorted(C)
    if len(ids) > MAX_ENUMERATED_JOBS:
        raise TooManyJobs(f'Cannot enumerate subsets of {len(ids)} jobs, limit is {MAX_ENUMERATED_JOBS}.')
    best: Optional[Tuple[float, Tuple[int, ...]]] = None
    for size in range(1, len(ids)+1):
        for subset in itertools.combinations(ids, size):
            value = violation(subset, C, s)
            if best is None or value > best[0] or (value == best[0] and subset < best[1]):
                best = (value, subset)
    if best is None or best[0] <= tol:
        return None
    return ViolationReport(frozenset(best[1]), best[0])

def _objective(w: Workload) -> List[float]:
    return [job.weight for job in w.jobs] + [0.0] * w.n

def _solution(w: Workload, x: Sequence[float], objective: float,
              sets: Sequence[FrozenSet[int]], iterations: int) -> LpSolution:
    n = w.n
    return LpSolution(
        C={job.id: x[_c(job.id)] for job in w.jobs},
        C_M={job.id: x[_cm(job.id, n)] for job in w.jobs},
        objective=objective,
        generated_sets=tuple(sets),
        iterations=iterations,
    )

def solve_lp(w: Workload, s: DerivedStats, max_cuts: Optional[int]=None,
             tol: float=VIOLATION_TOL) -> LpSolution:
    """Solves the relaxation by row generation.

    Solves the restricted LP, asks the separation oracle for the most
    violated subset cut, adds it and repeats until no cut is violated.
    The objective is a lower bound on the optimal weighted completion time.
    """
    max_cuts = 50 * w.n if max_cuts is None else max_cuts
    objective = _objective(w)
    rows = base_constraints(w, s)
    sets: List[FrozenSet[int]] = []
    iterations = 0
    while True:
        iterations += 1
        vertex = lp_core_solve(rows, objective)
        C = {job.id: vertex.x[_c(job.id)] for job in w.jobs}
        report = separation_oracle(C, s, tol)
        if report is None:
            break
        if report.subset in sets:
            logger.debug(f'Cut for {sorted(report.subset)} is already enforced (V={report.value:.3g}), stopping.')
            break
        if len(sets) >= max_cuts:
            raise IterationLimitExceeded(f'Row generation added {max_cuts} cuts without converging.')
        logger.debug(f'Iteration {iterations}: adding cut for {sorted(report.subset)} with V={report.value:.6g}.')
        sets.append(report.subset)
        rows.append(queyranne_cut(report.subset, s))

    logger.debug(f'LP solved with {len(sets)} cuts in {iterations} iterations, objective {vertex.objective:.6f}.')
    return _solution(w, vertex.x, vertex.objective, sets, iterations)

def solve_lp_exhaustive(w: Workload, s: DerivedStats) -> LpSolution:
    """Solves the relaxation with every subset cut written out up front."""
    if w.n > MAX_EXHAUSTIVE_LP_JOBS:
        raise TooManyJobs(f'Cannot write out subset cuts for {w.n} jobs, limit is {MAX_EXHAUSTIVE_LP_JOBS}.')
    ids = list(w.job_ids)
    sets = [
        frozenset(subset)
        for size in range(1, w.n+1)
        for subset in itertools.combinations(ids, size)
    ]
    rows = base_constraints(w, s) + [queyranne_cut(subset, s) for subset in sets]
    vertex = lp_core_solve(rows, _objective(w))
    return _solution(w, vertex.x, vertex.objective, sets, 1)

def check_lp_solution(w: Workload, s: DerivedStats, lp: LpSolution,
                      tol: float=FEASIBILITY_TOL) -> List[str]:
    """Re-verifies an LpSolution, returns a description of every failed invariant."""
    problems = []
    x = [lp.C[job.id] for job in w.jobs] + [lp.C_M[job.id] for job in w.jobs]
    for i, row in enumerate(base_constraints(w, s)):
        lhs = math.fsum(coef * x[var] for var, coef in row.coefficients.items())
        if lhs < row.rhs - tol:
            problems.append(f'phase row {i} violated by {row.rhs - lhs:.3g}')
    for subset in lp.generated_sets:
        value = violation(subset, lp.C, s)
        if value > tol * max(1.0, math.fsum(s.p[j] for j in subset)):
            problems.append(f'cut {sorted(subset)} violated by {value:.3g}')
    report = separation_oracle(lp.C, s, tol)
    if report is not None and report.subset not in lp.generated_sets:
        problems.append(f'oracle finds violated cut {sorted(report.subset)} (V={report.value:.3g})')
    return problems
