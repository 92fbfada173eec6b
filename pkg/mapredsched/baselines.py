"""Comparison schedulers: FIFO, Identical-machine and Map-only.

All three return the same Schedule type as DMRS and produce legal schedules,
they only differ in quality.
"""
import logging
from typing import Callable, Optional

import numpy as np

from .errors import InvalidSpec
from .dmrs import (Phase, Placement, Schedule, SchedulerState, job_order, make_schedule,
                   plan_dmrs, schedule_dmrs)
from .lprelax import LpSolution, solve_lp
from .model import DerivedStats, Workload, derive_stats, drop_reduce_phase, replace_speeds
from .simulator import replay_order
from .utils import make_rng

logger = logging.getLogger('mapredsched')
LpSolver = Callable[[Workload, DerivedStats], LpSolution]

def schedule_fifo(w: Workload, early_reduce: bool=True) -> Schedule:
    """Jobs in release order, every task on the first available machine.

    With early_reduce the reduce tasks take their machine right after the
    job's maps were handed out, and hold it idle until the maps are done.
    Without it, reduces go to the first machine available once the maps end.
    """
    order = tuple(job.id for job in sorted(w.jobs, key=lambda job: (job.release, job.id)))
    state = SchedulerState(w.cluster)
    placements = []
    for job_id in order:
        job = w.job(job_id)
        map_done = job.release
        for t, size in enumerate(job.map_sizes, 1):
            l = state.first_available(job.release)
            start, end = state.assign(l, size, job.release)
            placements.append(Placement(job.id, Phase.MAP, t, l, start, end))
            map_done = max(map_done, end)
        for t, size in enumerate(job.reduce_sizes, 1):
            l = state.first_available(job.release if early_reduce else map_done)
            start, end = state.assign(l, size, map_done)
            placements.append(Placement(job.id, Phase.REDUCE, t, l, start, end))
    return make_schedule(w, placements, order)

def schedule_identical(w: Workload, lp_solver: LpSolver=solve_lp) -> Schedule:
    """DMRS planned as if every machine ran at the mean speed, executed at true speeds.

    The planning run fixes the job order, the machine of every task and each
    machine's task sequence; the times are then recomputed on the real cluster.
    """
    m = w.cluster.m
    planning = replace_speeds(w, [w.cluster.mu / m] * m)
    s = derive_stats(planning)
    order = job_order(lp_solver(planning, s), s)
    planned = schedule_dmrs(planning, order)
    queues = [[p.key for p in ps] for ps in planned.per_machine]
    return make_schedule(w, replay_order(w, queues), order)

def schedule_maponly(w: Workload, lp_solver: LpSolver=solve_lp, seed: int=0,
                     rng: Optional[np.random.Generator]=None) -> Schedule:
    """DMRS that ignores the reduce phase.

    Jobs are ordered by the LP of the map-only workload and maps are placed as
    DMRS does; each reduce goes to a machine drawn uniformly at random and
    starts once the machine is free and the job's maps are done.
    """
    rng = rng or make_rng(seed)
    planning = drop_reduce_phase(w)
    s = derive_stats(planning)
    order = job_order(lp_solver(planning, s), s)
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
            l = int(rng.integers(w.cluster.m))
            start, end = state.assign(l, size, map_done)
            placements.append(Placement(job.id, Phase.REDUCE, t, l, start, end))
    logger.debug(f'Map-only job order {order}.')
    return make_schedule(w, placements, order)

SCHEDULERS = ('dmrs', 'fifo', 'identical', 'maponly')

def run_scheduler(name: str, w: Workload, s: Optional[DerivedStats]=None, lp: Optional[LpSolution]=None,
                  seed: int=0, early_reduce: bool=True) -> Schedule:
    """Runs a scheduler by name. s and lp are reused by dmrs when given."""
    if name == 'dmrs':
        return plan_dmrs(w, s, lp)
    if name == 'fifo':
        return schedule_fifo(w, early_reduce)
    if name == 'identical':
        return schedule_identical(w)
    if name == 'maponly':
        return schedule_maponly(w, seed=seed)
    raise InvalidSpec(f'Unknown scheduler "{name}", use one of {SCHEDULERS}.')
