"""LP-guided list scheduling of map/reduce jobs on machines of different speeds.

Jobs are ordered by their LP completion times, then every task is placed on
the machine that finishes it earliest, maps before reduces, largest task first.
Also holds the guarantees of that scheduler: the per-job completion time bound
and the approximation ratio against the optimal weighted completion time.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidOrder
from .lprelax import LpSolution, solve_lp
from .model import Cluster, DerivedStats, Job, Workload, derive_stats
from .utils import argmin_index

logger = logging.getLogger('mapredsched')

class Phase(str, Enum):
    MAP = 'map'
    REDUCE = 'reduce'

# (job id, phase, 1-based task index)
TaskKey = Tuple[int, Phase, int]

def job_tasks(job: Job) -> List[Tuple[TaskKey, float]]:
    """Tasks of a job in dispatch order: maps then reduces, largest first."""
    return (
        [((job.id, Phase.MAP, t), size) for t, size in enumerate(job.map_sizes, 1)] +
        [((job.id, Phase.REDUCE, t), size) for t, size in enumerate(job.reduce_sizes, 1)]
    )

def task_sizes(w: Workload) -> Dict[TaskKey, float]:
    """Every task of the workload and its size, in job id order."""
    return {key: size for job in w.jobs for key, size in job_tasks(job)}

@dataclass(frozen=True)
class Placement:
    """A task on a machine (0 = fastest) with its start and end time."""
    job: int
    phase: Phase
    task: int
    machine: int
    start: float
    end: float

    @property
    def key(self) -> TaskKey:
        return (self.job, self.phase, self.task)

@dataclass(frozen=True)
class Schedule:
    """Placements in the order they were made, plus per-job completions."""
    placements: Tuple[Placement, ...]
    order: Tuple[int, ...]
    job_completion: Mapping[int, float]
    map_completion: Mapping[int, float]
    twct: float
    per_machine: Tuple[Tuple[Placement, ...], ...] = field(repr=False, compare=False)

    def machine_of(self) -> Dict[TaskKey, int]:
        return {p.key: p.machine for p in self.placements}

def make_schedule(w: Workload, placements: Iterable[Placement], order: Sequence[int]) -> Schedule:
    """Builds a Schedule and its derived completion times from placements."""
    placements = tuple(placements)
    job_completion: Dict[int, float] = {}
    map_completion = {job.id: job.release for job in w.jobs}
    for p in placements:
        job_completion[p.job] = max(job_completion.get(p.job, p.end), p.end)
        if p.phase is Phase.MAP:
            map_completion[p.job] = max(map_completion.get(p.job, p.end), p.end)
    for job in w.jobs:
        # a job without placements (only in partial schedules) completes at release
        job_completion.setdefault(job.id, job.release)
    per_machine = tuple(
        tuple(sorted((p for p in placements if p.machine == l), key=lambda p: (p.start, p.end)))
        for l in range(w.cluster.m)
    )
    twct = math.fsum(job.weight * job_completion[job.id] for job in w.jobs)
    return Schedule(placements, tuple(order), job_completion, map_completion, twct, per_machine)

class SchedulerState:
    """Per-machine frontier times of a list scheduler.

    A frontier only ever moves forward.
    """
    def __init__(self, cluster: Cluster, frontier: Optional[Sequence[float]]=None):
        self.speeds = cluster.speeds
        self.frontier = list(frontier) if frontier is not None else [0.0] * cluster.m

    def finish_times(self, size: float, ready: float) -> List[float]:
        return [max(t, ready) + size / v for t, v in zip(self.frontier, self.speeds)]

    def earliest_finish(self, size: float, ready: float) -> int:
        """Machine finishing the task first, ties to the lowest index."""
        return argmin_index(self.finish_times(size, ready))

    def first_available(self, ready: float) -> int:
        """Machine that can start a task first, ties to the lowest index."""
        return argmin_index([max(t, ready) for t in self.frontier])

    def assign(self, machine: int, size: float, ready: float) -> Tuple[float, float]:
        """Runs a task on machine as soon as possible, returns its start and end."""
        start = max(self.frontier[machine], ready)
        end = start + size / self.speeds[machine]
        self.frontier[machine] = end
        return start, end

def check_order(w: Workload, order: Sequence[int]) -> None:
    if sorted(order) != list(w.job_ids):
        raise InvalidOrder(f'Job order {list(order)} is not a permutation of {list(w.job_ids)}.')

def job_order(lp: LpSolution, s: DerivedStats) -> Tuple[int, ...]:
    """Jobs ascending by C_j - p_j / (2 mu_j), ties by id."""
    return tuple(sorted(lp.C, key=lambda j: (lp.C[j] - s.p[j] / (2 * s.mu_job[j]), j)))

def schedule_dmrs(w: Workload, order: Sequence[int]) -> Schedule:
    """List-schedules every job in order on the earliest-finishing machines.

    Map tasks are ready at the job's release, reduce tasks once all of the
    job's maps have finished.
    """
    check_order(w, order)
    state = SchedulerState(w.cluster)
    placements = []
    for job_id in order:
        job = w.job(job_id)
        map_done = job.release
        for t, size in enumerate(job.map_sizes, 1):
            l = state.earliest_finish(size, job.release)
            start, end = state.assign(l, size, job.release)
            placements.append(Placement(job.id, Phase.MAP, t, l, start, end))
            map_done = max(map_done, end)
        for t, size in enumerate(job.reduce_sizes, 1):
            l = state.earliest_finish(size, map_done)
            start, end = state.assign(l, size, map_done)
            placements.append(Placement(job.id, Phase.REDUCE, t, l, start, end))
    return make_schedule(w, placements, order)

def plan_dmrs(w: Workload, s: Optional[DerivedStats]=None, lp: Optional[LpSolution]=None) -> Schedule:
    """Solves the LP, orders the jobs and schedules them."""
    s = s or derive_stats(w)
    lp = lp or solve_lp(w, s)
    order = job_order(lp, s)
    logger.debug(f'DMRS job order {order}.')
    return schedule_dmrs(w, order)

def lemma2_bound(w: Workload, s: DerivedStats, order: Sequence[int], j: int) -> float:
    """Upper bound on the completion time of the j-th job (1-based) in order.

    max release among the first j jobs
      + ((m-1)(p^R_{j,1} + sum_k p^M_{k,1}) + sum_k p_k) / mu
    """
    head = [w.job(job_id) for job_id in order[:j]]
    m = w.cluster.m
    release = max(job.release for job in head)
    largest = head[-1].largest_reduce + math.fsum(job.largest_map for job in head)
    work = math.fsum(s.p[job.id] for job in head)
    return release + ((m - 1) * largest + work) / s.mu

def lemma2_bounds(w: Workload, s: DerivedStats, order: Sequence[int]) -> Dict[int, float]:
    """Completion time bound of every job, keyed by job id."""
    return {job_id: lemma2_bound(w, s, order, j) for j, job_id in enumerate(order, 1)}

def theoretical_ratio(w: Workload, s: DerivedStats, zero_release: Optional[bool]=None) -> float:
    """Approximation ratio of DMRS against the optimal weighted completion time.

    2(1 + (m-1)/D) when every job is released at 0, 3 + 2(m-1)/D otherwise.
    zero_release defaults to what the workload says.
    """
    if zero_release is None:
        zero_release = w.zero_release
    skew = (w.cluster.m - 1) / s.D
    return 2 * (1 + skew) if zero_release else 3 + 2 * skew
