from typing import Optional

import numpy as np
import pytest

from mapredsched import Workload, make_rng, validate_workload


def job(id: int, map=(), reduce=(), weight: float=1, release: float=0) -> dict:
    return {"id": id, "weight": weight, "release": release, "map": list(map), "reduce": list(reduce)}

def workload(speeds, *jobs: dict) -> Workload:
    return validate_workload({"machines": list(speeds), "jobs": list(jobs)})

def _size(rng: np.random.Generator) -> float:
    # uniform in (0, 10]
    return float(10.0 - rng.uniform(0, 10))

def random_workload(rng: np.random.Generator, n_max: int=8, m_max: int=4, tasks_max: int=4,
                    releases: Optional[bool]=None) -> Workload:
    """A random instance: 1..n_max jobs with 1..tasks_max tasks on 1..m_max machines."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    if releases is None:
        releases = bool(rng.integers(2))
    speeds = [float(rng.choice([1.0, 2.0, 4.0, 8.0])) for _ in range(m)]
    jobs = []
    for j in range(1, n + 1):
        count = int(rng.integers(1, tasks_max + 1))
        maps = int(rng.integers(0, count + 1))
        jobs.append(job(
            j,
            map=[_size(rng) for _ in range(maps)],
            reduce=[_size(rng) for _ in range(count - maps)],
            weight=int(rng.integers(1, 6)),
            release=float(rng.integers(0, 4)) * 2.5 if releases else 0,
        ))
    return workload(speeds, *jobs)

def tiny_workload(rng: np.random.Generator) -> Workload:
    """At most 6 tasks in total on at most 3 machines."""
    m = int(rng.integers(1, 4))
    speeds = [float(rng.choice([1.0, 2.0, 3.0])) for _ in range(m)]
    budget = int(rng.integers(1, 7))
    jobs = []
    while budget:
        count = int(rng.integers(1, min(budget, 3) + 1))
        budget -= count
        maps = int(rng.integers(0, count + 1))
        jobs.append(job(
            len(jobs) + 1,
            map=[_size(rng) for _ in range(maps)],
            reduce=[_size(rng) for _ in range(count - maps)],
            weight=int(rng.integers(1, 6)),
            release=float(rng.integers(0, 3)),
        ))
    return workload(speeds, *jobs)


@pytest.fixture
def single_job():
    """speeds [1], map [2], reduce [3], released at 0."""
    return workload([1], job(1, map=[2], reduce=[3]))

@pytest.fixture
def two_speed_job():
    """speeds [2, 1], maps [4, 4], reduce [2], released at 0."""
    return workload([2, 1], job(1, map=[4, 4], reduce=[2]))

@pytest.fixture
def rng():
    return make_rng(20240601)
