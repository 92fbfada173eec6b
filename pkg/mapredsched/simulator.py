"""Execution of schedules with realized task durations.

Static mode keeps the planned assignment and per-machine order and only
recomputes times. Dynamic mode re-places every task that has not started yet
whenever something happens on the cluster, using what is known at that moment.
Also validates schedules and finds the optimum of tiny instances by search.
"""
import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .dmrs import (Phase, Placement, Schedule, SchedulerState, TaskKey, check_order,
                   job_tasks, make_schedule, schedule_dmrs, task_sizes)
from .errors import *
from .model import Workload
from .utils import COMPARE_TOL, make_rng

logger = logging.getLogger('mapredsched')
PERTURB_MODES = ('none', 'multiplicative')
PERTURB_SCOPES = ('task', 'machine')
MAX_SEARCH_TASKS = 6
MAX_SEARCH_MACHINES = 3

@dataclass(frozen=True)
class PerturbationModel:
    """Multiplicative noise on task durations, factors uniform in [lo, hi].

    Scope `task` draws one factor per task, scope `machine` one per machine
    that applies to every task it runs.
    """
    mode: str = 'none'
    lo: float = 1.0
    hi: float = 1.0
    seed: int = 0
    scope: str = 'task'

    def __post_init__(self):
        if self.mode not in PERTURB_MODES:
            raise InvalidPerturbation(f'Unknown perturbation mode "{self.mode}", use one of {PERTURB_MODES}.')
        if self.scope not in PERTURB_SCOPES:
            raise InvalidPerturbation(f'Unknown perturbation scope "{self.scope}", use one of {PERTURB_SCOPES}.')
        if not 0 < self.lo <= self.hi:
            raise InvalidPerturbation(f'Perturbation range needs 0 < lo <= hi, got [{self.lo}, {self.hi}].')

    def draw(self, w: Workload) -> 'DurationFactors':
        """Draws every factor up front, in job id and task order."""
        if self.mode == 'none':
            return DurationFactors()
        rng = make_rng(self.seed)
        if self.scope == 'machine':
            return DurationFactors(machine={l: float(f) for l, f in enumerate(rng.uniform(self.lo, self.hi, w.cluster.m))})
        keys = list(task_sizes(w))
        return DurationFactors(task={key: float(f) for key, f in zip(keys, rng.uniform(self.lo, self.hi, len(keys)))})

@dataclass(frozen=True)
class DurationFactors:
    """Realized duration = size / speed * factor, missing factors are 1."""
    task: Mapping[TaskKey, float] = field(default_factory=dict)
    machine: Mapping[int, float] = field(default_factory=dict)

    def __call__(self, key: TaskKey, machine: int) -> float:
        return self.task.get(key, 1.0) * self.machine.get(machine, 1.0)

@dataclass(frozen=True)
class ExecutionTrace:
    """Realized placements and completion times of one run."""
    placements: Tuple[Placement, ...]
    job_completion: Mapping[int, float]
    map_completion: Mapping[int, float]
    twct: float
    replan_count: int
    factors: DurationFactors
    moved: Tuple[TaskKey, ...] = ()

def _trace(w: Workload, placements: Sequence[Placement], order: Sequence[int],
           factors: DurationFactors, replan_count: int=0, moved: Sequence[TaskKey]=()) -> ExecutionTrace:
    sch = make_schedule(w, placements, order)
    return ExecutionTrace(sch.placements, sch.job_completion, sch.map_completion, sch.twct,
                          replan_count, factors, tuple(moved))

class Violation(NamedTuple):
    kind: str
    detail: str

def validate_schedule(w: Workload, sch, factors: Optional[DurationFactors]=None,
                      tol: float=COMPARE_TOL) -> List[Violation]:
    """Checks a Schedule or an ExecutionTrace against the workload.

    Every task exactly once, one task at a time per machine, nothing before
    its job's release, reduces after all of their job's maps and durations
    equal size / speed (times the factors of a perturbed run).
    Returns every violation found, an empty list means the schedule is legal.
    """
    factors = factors or getattr(sch, 'factors', None) or DurationFactors()
    sizes = task_sizes(w)
    violations = []
    seen: Dict[TaskKey, Placement] = {}
    for p in sch.placements:
        if p.key not in sizes:
            violations.append(Violation('UnknownTask', f'{p.key} is not a task of the workload'))
            continue
        if p.key in seen:
            violations.append(Violation('DuplicateTask', f'{p.key} is placed more than once'))
            continue
        seen[p.key] = p
        if not 0 <= p.machine < w.cluster.m:
            violations.append(Violation('UnknownMachine', f'{p.key} runs on machine {p.machine}'))
            continue
        job = w.job(p.job)
        if p.start < job.release - tol:
            violations.append(Violation('ReleaseViolation', f'{p.key} starts at {p.start} before release {job.release}'))
        expected = sizes[p.key] / w.cluster.speeds[p.machine] * factors(p.key, p.machine)
        if abs((p.end - p.start) - expected) > tol * max(1.0, expected):
            violations.append(Violation('DurationMismatch', f'{p.key} lasts {p.end - p.start}, expected {expected}'))
    for key in sizes:
        if key not in seen:
            violations.append(Violation('MissingTask', f'{key} is never placed'))

    map_end: Dict[int, float] = {}
    for p in seen.values():
        if p.phase is Phase.MAP:
            map_end[p.job] = max(map_end.get(p.job, -math.inf), p.end)
    for p in seen.values():
        if p.phase is Phase.REDUCE and p.start < map_end.get(p.job, -math.inf) - tol:
            violations.append(Violation('PrecedenceViolation', f'{p.key} starts at {p.start} before its maps end at {map_end[p.job]}'))

    by_machine: Dict[int, List[Placement]] = {}
    for p in seen.values():
        by_machine.setdefault(p.machine, []).append(p)
    for machine, ps in sorted(by_machine.items()):
        ps.sort(key=lambda p: (p.start, p.end))
        for a, b in zip(ps, ps[1:]):
            if b.start < a.end - tol:
                violations.append(Violation('Overlap', f'{a.key} and {b.key} overlap on machine {machine}'))
    return violations

def replay_order(w: Workload, queues: Sequence[Sequence[TaskKey]],
                 duration=None) -> List[Placement]:
    """Times a fixed assignment and per-machine order as early as possible.

    queues[l] lists the tasks of machine l in execution order. A queue head
    starts once its machine is free, its job is released and, for a reduce,
    all maps of its job have ended. Raises ScheduleDeadlock when some head can
    never become ready. duration(key, machine) defaults to size / speed.
    """
    sizes = task_sizes(w)
    speeds = w.cluster.speeds
    if duration is None:
        duration = lambda key, l: sizes[key] / speeds[l]
    maps_left = {job.id: len(job.map_sizes) for job in w.jobs}
    map_end = {job.id: job.release for job in w.jobs}
    frontier = [0.0] * len(queues)
    heads = [0] * len(queues)
    placements = []
    remaining = sum(len(q) for q in queues)
    while remaining:
        progressed = False
        for l, queue in enumerate(queues):
            while heads[l] < len(queue):
                key = queue[heads[l]]
                job_id, phase, _ = key
                if phase is Phase.REDUCE and maps_left[job_id]:
                    break
                ready = map_end[job_id] if phase is Phase.REDUCE else w.job(job_id).release
                start = max(frontier[l], ready)
                end = start + duration(key, l)
                frontier[l] = end
                placements.append(Placement(job_id, phase, key[2], l, start, end))
                if phase is Phase.MAP:
                    maps_left[job_id] -= 1
                    map_end[job_id] = max(map_end[job_id], end)
                heads[l] += 1
                remaining -= 1
                progressed = True
        if remaining and not progressed:
            stuck = [queue[heads[l]] for l, queue in enumerate(queues) if heads[l] < len(queue)]
            raise ScheduleDeadlock(f'Tasks {stuck} wait on maps queued behind them.', details=stuck)
    return placements

def execute_static(w: Workload, sch: Schedule, perturb: Optional[PerturbationModel]=None,
                   factors: Optional[DurationFactors]=None) -> ExecutionTrace:
    """Runs a schedule with realized durations, assignment and order unchanged."""
    factors = factors or (perturb or PerturbationModel()).draw(w)
    sizes = task_sizes(w)
    speeds = w.cluster.speeds
    queues = [[p.key for p in ps] for ps in sch.per_machine]
    placements = replay_order(w, queues, lambda key, l: sizes[key] / speeds[l] * factors(key, l))
    return _trace(w, placements, sch.order, factors)

class _Running(NamedTuple):
    key: TaskKey
    start: float
    end: float # realized, unknown to the scheduler

def execute_dynamic(w: Workload, order: Sequence[int], perturb: Optional[PerturbationModel]=None,
                    factors: Optional[DurationFactors]=None) -> ExecutionTrace:
    """Runs DMRS with the machine of every task chosen at runtime.

    At time 0, at every task completion and at every release the tasks that
    have not started are placed again in the static dispatch order, each on
    the machine with the earliest estimated finish. Busy machines are
    estimated free after the running task's remaining data at nominal speed,
    where the remaining data follows from its observed progress. An idle
    machine then starts its first planned task if that task may start now.
    The job order never changes.
    """
    check_order(w, order)
    factors = factors or (perturb or PerturbationModel()).draw(w)
    static = schedule_dmrs(w, order).machine_of()
    sizes = task_sizes(w)
    speeds = w.cluster.speeds
    m = w.cluster.m

    pending = [key for job_id in order for key, _ in job_tasks(w.job(job_id))]
    running: Dict[int, _Running] = {}
    maps_left = {job.id: len(job.map_sizes) for job in w.jobs}
    map_end = {job.id: job.release for job in w.jobs}
    placements: List[Placement] = []
    moved: List[TaskKey] = []
    events = sorted({job.release for job in w.jobs} | {0.0})
    heapq.heapify(events)
    now = 0.0

    while pending or running:
        # completions at this instant, machine index order
        for l in sorted(running):
            task = running[l]
            if task.end <= now + COMPARE_TOL:
                del running[l]
                job_id, phase, t = task.key
                placements.append(Placement(job_id, phase, t, l, task.start, task.end))
                if phase is Phase.MAP:
                    maps_left[job_id] -= 1
                    map_end[job_id] = max(map_end[job_id], task.end)

        plan = _replan(w, pending, running, maps_left, map_end, now, sizes)
        launched = set()
        for l in range(m):
            if l in running or not plan[l]:
                continue
            key, start = plan[l][0]
            if start > now + COMPARE_TOL:
                continue
            end = now + sizes[key] / speeds[l] * factors(key, l)
            running[l] = _Running(key, now, end)
            heapq.heappush(events, end)
            launched.add(key)
            if static[key] != l:
                moved.append(key)
                logger.debug(f'Dynamic replan at {now:.3f}: {key} runs on machine {l} instead of {static[key]}.')
        if launched:
            pending = [key for key in pending if key not in launched]
            continue

        while events and events[0] <= now + COMPARE_TOL:
            heapq.heappop(events)
        if not events:
            if pending or running:
                raise ScheduleDeadlock(f'Dynamic execution stalled at {now} with {len(pending)} tasks pending.')
            break
        now = heapq.heappop(events)

    return _trace(w, placements, order, factors, len(moved), moved)

def _replan(w: Workload, pending: Sequence[TaskKey], running: Mapping[int, _Running],
            maps_left: Mapping[int, int], map_end: Mapping[int, float], now: float,
            sizes: Mapping[TaskKey, float]) -> List[List[Tuple[TaskKey, float]]]:
    """Places the pending tasks from the current estimates, per machine in start order."""
    speeds = w.cluster.speeds
    frontier = []
    est_map_end = dict(map_end)
    for l, v in enumerate(speeds):
        task = running.get(l)
        if task is None:
            frontier.append(now)
            continue
        progress = (now - task.start) / (task.end - task.start) if task.end > task.start else 1.0
        estimate = now + sizes[task.key] * (1.0 - min(progress, 1.0)) / v
        frontier.append(estimate)
        if task.key[1] is Phase.MAP:
            est_map_end[task.key[0]] = max(est_map_end[task.key[0]], estimate)

    state = SchedulerState(w.cluster, frontier)
    plan: List[List[Tuple[TaskKey, float]]] = [[] for _ in speeds]
    for key in pending:
        job_id, phase, _ = key
        ready = max(w.job(job_id).release, now)
        if phase is Phase.REDUCE:
            ready = max(ready, est_map_end[job_id])
        l = state.earliest_finish(sizes[key], ready)
        start, end = state.assign(l, sizes[key], ready)
        if phase is Phase.MAP:
            est_map_end[job_id] = max(est_map_end[job_id], end)
        plan[l].append((key, start))
    return plan

def brute_force_optimal(w: Workload) -> Tuple[float, Schedule]:
    """Minimum weighted completion time by trying every assignment and order.

    Only for tiny instances: at most 6 tasks on at most 3 machines.
    Timing is forced once assignment and per-machine order are fixed, so each
    arrangement is timed as early as possible and infeasible orders are skipped.
    """
    keys = list(task_sizes(w))
    m = w.cluster.m
    if len(keys) > MAX_SEARCH_TASKS or m > MAX_SEARCH_MACHINES:
        raise TooLarge(f'Exhaustive search is limited to {MAX_SEARCH_TASKS} tasks on '
                       f'{MAX_SEARCH_MACHINES} machines, got {len(keys)} on {m}.')
    weights = {job.id: job.weight for job in w.jobs}
    best_twct, best_placements = math.inf, None
    for perm in itertools.permutations(keys):
        # m-1 cut points split the permutation into the machines' queues
        for cuts in itertools.combinations_with_replacement(range(len(keys)+1), m-1):
            bounds = (0,) + cuts + (len(keys),)
            queues = [perm[bounds[l]:bounds[l+1]] for l in range(m)]
            try:
                placements = replay_order(w, queues)
            except ScheduleDeadlock:
                continue
            completion: Dict[int, float] = {}
            for p in placements:
                completion[p.job] = max(completion.get(p.job, p.end), p.end)
            twct = math.fsum(weights[j] * c for j, c in completion.items())
            if twct < best_twct - COMPARE_TOL:
                best_twct, best_placements = twct, placements
    sch = make_schedule(w, best_placements, w.job_ids)
    logger.debug(f'Exhaustive search optimum {sch.twct:.6f}.')
    return sch.twct, sch
