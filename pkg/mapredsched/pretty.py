"""Prettifiers for mapredsched results.

Turns the frozen result types into plain JSON-ready dicts, per-job lists in job id order.
"""
from typing import Any, List, Mapping

from .dmrs import Phase, Placement, Schedule, make_schedule
from .errors import InvalidSchedule
from .lprelax import LpSolution
from .model import Workload
from .simulator import ExecutionTrace, Violation


def _by_id(values: Mapping[int, float]) -> List[float]:
    return [values[j] for j in sorted(values)]

def _placement(p: Placement) -> dict:
    return {
        "job": p.job,
        "phase": p.phase.value,
        "task": p.task,
        "machine": p.machine,
        "start": p.start,
        "end": p.end,
    }

def prettify_workload(w: Workload) -> dict:
    """Returns a workload in its file format."""
    return {
        "machines": list(w.cluster.speeds),
        "jobs": [{
            "id": job.id,
            "weight": job.weight,
            "release": job.release,
            "map": list(job.map_sizes),
            "reduce": list(job.reduce_sizes),
        } for job in w.jobs]
    }

def prettify_lp(lp: LpSolution) -> dict:
    """Returns a prettified version of solve_lp."""
    return {
        "objective": lp.objective,
        "C": _by_id(lp.C),
        "C_M": _by_id(lp.C_M),
        "cuts": len(lp.generated_sets),
        "iterations": lp.iterations,
    }

def prettify_schedule(sch: Schedule) -> dict:
    """Returns a prettified version of a schedule, placements in the order they were made."""
    return {
        "order": list(sch.order),
        "placements": [_placement(p) for p in sch.placements],
        "twct": sch.twct,
    }

def prettify_trace(trace: ExecutionTrace) -> dict:
    """Returns a prettified version of an execution, placements by start time."""
    placements = sorted(trace.placements, key=lambda p: (p.start, p.machine, p.job))
    return {
        "placements": [_placement(p) for p in placements],
        "completion": _by_id(trace.job_completion),
        "map_completion": _by_id(trace.map_completion),
        "twct": trace.twct,
        "replan_count": trace.replan_count,
        "moved": [[job, phase.value, task] for job, phase, task in trace.moved],
    }

def prettify_violations(violations: List[Violation]) -> List[dict]:
    return [{"kind": v.kind, "detail": v.detail} for v in violations]

def parse_schedule(w: Workload, data: Mapping[str, Any]) -> Schedule:
    """Reads a schedule in the format of prettify_schedule back."""
    try:
        placements = [Placement(
            int(p["job"]), Phase(p["phase"]), int(p["task"]), int(p["machine"]),
            float(p["start"]), float(p["end"]),
        ) for p in data["placements"]]
        order = [int(j) for j in data.get("order", w.job_ids)]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidSchedule(f'Schedule record is malformed ({e}).')
    return make_schedule(w, placements, order)
