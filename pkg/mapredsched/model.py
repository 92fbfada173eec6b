"""System model: machines, map/reduce jobs and their derived quantities.

Machines are sorted fastest first and each job's task lists largest first,
so index 0 is the fastest machine and task 1 is the largest task.
Sizes are data units, speeds data units per second, times seconds.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterable, Mapping, Tuple

from .errors import *
from .utils import largest, load_json

logger = logging.getLogger('mapredsched')

@dataclass(frozen=True)
class Cluster:
    """Machine speeds v_1 >= ... >= v_m."""
    speeds: Tuple[float, ...]

    @property
    def m(self) -> int:
        return len(self.speeds)

    @property
    def mu(self) -> float:
        """Total processing rate of the cluster."""
        return math.fsum(self.speeds)

@dataclass(frozen=True)
class Job:
    """A map/reduce job, task sizes sorted descending."""
    id: int
    weight: float
    release: float
    map_sizes: Tuple[float, ...]
    reduce_sizes: Tuple[float, ...]

    @property
    def map_total(self) -> float:
        return math.fsum(self.map_sizes)

    @property
    def reduce_total(self) -> float:
        return math.fsum(self.reduce_sizes)

    @property
    def size(self) -> float:
        """Total data size p_j of all tasks."""
        return self.map_total + self.reduce_total

    @property
    def largest_map(self) -> float:
        return largest(self.map_sizes)

    @property
    def largest_reduce(self) -> float:
        return largest(self.reduce_sizes)

    @property
    def task_count(self) -> int:
        return len(self.map_sizes) + len(self.reduce_sizes)

@dataclass(frozen=True)
class Workload:
    """A cluster plus jobs with ids 1..N, stored in id order."""
    cluster: Cluster
    jobs: Tuple[Job, ...]

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def job_ids(self) -> Tuple[int, ...]:
        return tuple(job.id for job in self.jobs)

    def job(self, job_id: int) -> Job:
        return self.jobs[job_id-1]

    @property
    def zero_release(self) -> bool:
        return all(job.release == 0 for job in self.jobs)

@dataclass(frozen=True)
class DerivedStats:
    """Quantities derived from a workload, per-job values keyed by job id."""
    mu: float
    q: Mapping[int, int]
    mu_job: Mapping[int, float]
    p_map: Mapping[int, float]
    p_reduce: Mapping[int, float]
    p: Mapping[int, float]
    D: float


def _number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidWorkload(f'{what} must be a number, got {value!r}')
    value = float(value)
    if not math.isfinite(value):
        raise InvalidWorkload(f'{what} must be finite, got {value!r}')
    return value

def _sizes(raw: Any, job_id: int, phase: str) -> Tuple[float, ...]:
    if not isinstance(raw, (list, tuple)):
        raise InvalidWorkload(f'job {job_id} {phase} tasks must be a list')
    sizes = [_number(x, f'job {job_id} {phase} task size') for x in raw]
    for size in sizes:
        if size <= 0:
            raise NonPositiveTaskSize(f'job {job_id} has a {phase} task of size {size}.', details=job_id)
    return tuple(sorted(sizes, reverse=True))

def validate_workload(raw: Mapping[str, Any]) -> Workload:
    """Validates a workload record and returns it in canonical form.

    The record has the shape of the workload JSON file:
    `{"machines": [v1, ...], "jobs": [{"id", "weight", "release", "map", "reduce"}]}`.
    Speeds and task lists get sorted descending, jobs get sorted by id.
    """
    if not isinstance(raw, Mapping) or 'machines' not in raw or 'jobs' not in raw:
        raise InvalidWorkload('Workload needs "machines" and "jobs".')
    if not isinstance(raw['machines'], (list, tuple)) or not raw['machines']:
        raise InvalidWorkload('Workload needs at least one machine.')
    speeds = [_number(v, 'machine speed') for v in raw['machines']]
    for v in speeds:
        if v <= 0:
            raise NonPositiveSpeed(f'Machine speed must be positive, got {v}.')
    if not isinstance(raw['jobs'], (list, tuple)) or not raw['jobs']:
        raise InvalidWorkload('Workload needs at least one job.')

    jobs: Dict[int, Job] = {}
    for record in raw['jobs']:
        if not isinstance(record, Mapping) or 'id' not in record:
            raise InvalidWorkload(f'Job record {record!r} has no id.')
        job_id = record['id']
        if isinstance(job_id, bool) or not isinstance(job_id, int):
            raise InvalidJobId(f'Job id must be an integer, got {job_id!r}.')
        if job_id in jobs:
            raise DuplicateJobId(f'Job id {job_id} appears more than once.', details=job_id)
        weight = _number(record.get('weight', 1), f'job {job_id} weight')
        if weight < 0:
            raise NegativeWeight(f'Job {job_id} has negative weight {weight}.', details=job_id)
        release = _number(record.get('release', 0), f'job {job_id} release')
        if release < 0:
            raise NegativeRelease(f'Job {job_id} is released at {release} < 0.', details=job_id)
        map_sizes = _sizes(record.get('map', []), job_id, 'map')
        reduce_sizes = _sizes(record.get('reduce', []), job_id, 'reduce')
        if not map_sizes and not reduce_sizes:
            raise EmptyJob(f'Job {job_id} has no map and no reduce tasks.', details=job_id)
        jobs[job_id] = Job(job_id, weight, release, map_sizes, reduce_sizes)

    n = len(jobs)
    if sorted(jobs) != list(range(1, n+1)):
        raise InvalidJobId(f'Job ids must be 1..{n}, got {sorted(jobs)}.')

    logger.debug(f'Validated workload with {n} jobs on {len(speeds)} machines.')
    return Workload(
        Cluster(tuple(sorted(speeds, reverse=True))),
        tuple(jobs[i] for i in range(1, n+1)),
    )

def load_workload(path: str) -> Workload:
    """Reads and validates a workload JSON file."""
    return validate_workload(load_json(path))

def task_skewness(w: Workload) -> float:
    """Task-skewness product D.

    The largest D such that the largest map plus largest reduce task
    of every job is at most p_j / D. Jobs without tasks are skipped,
    inf when no job has any.
    """
    ratios = [
        job.size / (job.largest_map + job.largest_reduce)
        for job in w.jobs if job.task_count
    ]
    return min(ratios, default=math.inf)

def derive_stats(w: Workload) -> DerivedStats:
    """Computes mu, q_j, mu_j, p_j^M, p_j^R, p_j and D for a workload."""
    speeds = w.cluster.speeds
    q, mu_job, p_map, p_reduce, p = {}, {}, {}, {}, {}
    for job in w.jobs:
        q[job.id] = min(job.task_count, w.cluster.m)
        # a taskless planning job contributes nothing, any positive speed keeps it finite
        mu_job[job.id] = math.fsum(speeds[:q[job.id]]) if q[job.id] else speeds[0]
        p_map[job.id] = job.map_total
        p_reduce[job.id] = job.reduce_total
        p[job.id] = p_map[job.id] + p_reduce[job.id]
    return DerivedStats(
        mu=w.cluster.mu,
        q=q,
        mu_job=mu_job,
        p_map=p_map,
        p_reduce=p_reduce,
        p=p,
        D=task_skewness(w),
    )

def replace_speeds(w: Workload, speeds: Iterable[float]) -> Workload:
    """Same jobs on a different cluster."""
    return replace(w, cluster=Cluster(tuple(sorted(speeds, reverse=True))))

def drop_reduce_phase(w: Workload) -> Workload:
    """Same cluster, every job stripped of its reduce tasks."""
    return replace(w, jobs=tuple(replace(job, reduce_sizes=()) for job in w.jobs))
