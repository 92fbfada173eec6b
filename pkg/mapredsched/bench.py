"""Workload generators and the experiment runner.

Scenarios model a cluster with fast and slow machines running WordCount, Sort
or TeraSort-like jobs. Sizes are in MB-sized data units on a cluster whose slow
machines process 1 unit per second, so a 64 MB task is 64 units.
"""
import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .baselines import SCHEDULERS, run_scheduler
from .dmrs import Schedule, theoretical_ratio
from .errors import *
from .lprelax import solve_lp
from .model import Workload, derive_stats, validate_workload
from .simulator import PerturbationModel, execute_dynamic, execute_static, validate_schedule
from .utils import BOUND_TOL, COMPARE_TOL, make_rng

logger = logging.getLogger('mapredsched')
GB = 1024 # data units
SECONDS_PER_HOUR = 3600

# reduce task count and reduce/map data ratio, the ratios are assumed defaults
BENCHMARKS = {
    'wordcount': (1, 0.1),
    'sort': (4, 1.0),
    'terasort': (4, 1.5),
}

@dataclass(frozen=True)
class JobClass:
    """count jobs, each with `total` units of map data split into `task_size` tasks."""
    count: int
    total: float
    task_size: float
    reduce_tasks: int
    reduce_ratio: float

@dataclass(frozen=True)
class ScenarioSpec:
    machines: int = 12
    speed_ratio: float = 8.0
    fast_machines: Optional[int] = None # half of the machines when unset
    slow_speed: float = 1.0
    job_mix: Tuple[JobClass, ...] = ()
    weight_range: Tuple[int, int] = (1, 5)
    release_groups: int = 2
    release_gap: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if self.machines < 1:
            raise InvalidSpec(f'Need at least one machine, got {self.machines}.')
        if not self.speed_ratio > 0 or not self.slow_speed > 0:
            raise InvalidSpec('Speed ratio and slow machine speed must be positive.')
        if self.fast_machines is not None and not 0 <= self.fast_machines <= self.machines:
            raise InvalidSpec(f'Fast machine count {self.fast_machines} is not within 0..{self.machines}.')
        lo, hi = self.weight_range
        if not 0 <= lo <= hi:
            raise InvalidSpec(f'Weight range [{lo}, {hi}] is not valid.')
        if self.release_groups < 1 or self.release_gap < 0:
            raise InvalidSpec('Need at least one release group and a non-negative gap.')
        for jc in self.job_mix:
            if jc.count < 0 or jc.reduce_tasks < 0 or jc.reduce_ratio < 0:
                raise InvalidSpec(f'Job class {jc} has negative counts or ratio.')
            if not jc.total > 0 or not jc.task_size > 0:
                raise InvalidSpec(f'Job class {jc} needs positive map data and task size.')
        if sum(jc.count for jc in self.job_mix) == 0:
            raise InvalidSpec('Scenario has no jobs.')

    @property
    def fast_count(self) -> int:
        return self.machines // 2 if self.fast_machines is None else self.fast_machines

def job_class(count: int, total: float, task_size: float, benchmark: str='terasort') -> JobClass:
    """A job class with the reduce profile of a benchmark."""
    if benchmark not in BENCHMARKS:
        raise InvalidSpec(f'Unknown benchmark "{benchmark}", use one of {sorted(BENCHMARKS)}.')
    reduce_tasks, reduce_ratio = BENCHMARKS[benchmark]
    return JobClass(count, total, task_size, reduce_tasks, reduce_ratio)

def uniform_scenario(benchmark: str='wordcount', seed: int=0) -> ScenarioSpec:
    """20 jobs of 1 GB with 64 MB tasks."""
    return ScenarioSpec(job_mix=(job_class(20, GB, 64, benchmark),), seed=seed)

def mixed_scenario(benchmark: str='wordcount', seed: int=0) -> ScenarioSpec:
    """20 jobs: 12 of 1 GB (64 MB tasks), 4 of 0.5 GB (32 MB), 4 of 2 GB (128 MB)."""
    return ScenarioSpec(job_mix=(
        job_class(12, GB, 64, benchmark),
        job_class(4, GB/2, 32, benchmark),
        job_class(4, 2*GB, 128, benchmark),
    ), seed=seed)

def large_small_scenario(benchmark: str='terasort', large: int=6, seed: int=0) -> ScenarioSpec:
    """18 jobs: `large` of 2 GB and as many of 0.5 GB, the rest 1 GB."""
    if not 0 <= large <= 9:
        raise InvalidSpec(f'18 jobs hold at most 9 large and 9 small jobs, got {large}.')
    return ScenarioSpec(job_mix=(
        job_class(18 - 2*large, GB, 64, benchmark),
        job_class(large, GB/2, 32, benchmark),
        job_class(large, 2*GB, 128, benchmark),
    ), seed=seed)

def elephant_scenario(elephants: int=6, seed: int=0) -> ScenarioSpec:
    """18 TeraSort jobs with 64 MB tasks: elephants of 2 GB, mice of 0.5 GB."""
    if not 0 <= elephants <= 18:
        raise InvalidSpec(f'Elephant count must be within 0..18, got {elephants}.')
    return ScenarioSpec(job_mix=(
        job_class(18 - elephants, GB/2, 64, 'terasort'),
        job_class(elephants, 2*GB, 64, 'terasort'),
    ), seed=seed)

PRESETS = ('uniform', 'mixed', 'large-small', 'elephant')

def preset_scenario(name: str, benchmark: Optional[str]=None, count: Optional[int]=None,
                    seed: int=0) -> ScenarioSpec:
    """Builds a named preset; count is the large job count or the elephant count."""
    if name == 'uniform' or name == 'mixed':
        if count is not None:
            raise InvalidSpec(f'Preset "{name}" takes no count.')
        factory = uniform_scenario if name == 'uniform' else mixed_scenario
        return factory(benchmark or 'wordcount', seed=seed)
    if name == 'large-small':
        return large_small_scenario(benchmark or 'terasort', 6 if count is None else count, seed=seed)
    if name == 'elephant':
        if benchmark not in (None, 'terasort'):
            raise InvalidSpec('The elephant preset only runs TeraSort jobs.')
        return elephant_scenario(6 if count is None else count, seed=seed)
    raise InvalidSpec(f'Unknown preset "{name}", use one of {PRESETS}.')

def scenario_from_dict(data: Mapping[str, Any]) -> ScenarioSpec:
    """Reads a scenario JSON record.

    Job classes give either `reduce_tasks` and `reduce_ratio` or a `benchmark` name.
    """
    try:
        data = dict(data)
        jobs = data.pop('jobs', [])
        mix = []
        for record in jobs:
            record = dict(record)
            if 'benchmark' in record:
                mix.append(job_class(int(record['count']), float(record['total']),
                                     float(record['task_size']), record['benchmark']))
            else:
                mix.append(JobClass(int(record['count']), float(record['total']), float(record['task_size']),
                                    int(record.get('reduce_tasks', 0)), float(record.get('reduce_ratio', 0))))
        if 'weights' in data:
            data['weight_range'] = tuple(int(x) for x in data.pop('weights'))
        known = {f.name for f in fields(ScenarioSpec)} - {'job_mix'}
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(f'Unknown scenario fields {sorted(unknown)}.')
        return ScenarioSpec(job_mix=tuple(mix), **data)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidSpec(f'Scenario record is malformed ({e}).')

def _map_sizes(total: float, task_size: float) -> List[float]:
    count = max(1, math.ceil(total / task_size - COMPARE_TOL))
    return [task_size] * (count - 1) + [total - (count - 1) * task_size]

def generate_scenario(spec: ScenarioSpec, seed: Optional[int]=None) -> Workload:
    """Draws a workload from a scenario.

    Jobs are shuffled, numbered 1..N and split into consecutive release groups
    spaced by the gap; weights are uniform integers from the weight range.
    The same spec and seed always give the same workload.
    """
    rng = make_rng(spec.seed if seed is None else seed)
    classes = [jc for jc in spec.job_mix for _ in range(jc.count)]
    n = len(classes)
    shuffled = [classes[i] for i in rng.permutation(n)]
    lo, hi = spec.weight_range
    weights = rng.integers(lo, hi + 1, size=n)
    fast = spec.slow_speed * spec.speed_ratio
    machines = [fast] * spec.fast_count + [spec.slow_speed] * (spec.machines - spec.fast_count)
    jobs = []
    for i, jc in enumerate(shuffled):
        group = i * spec.release_groups // n
        reduce = [jc.reduce_ratio * jc.total / jc.reduce_tasks] * jc.reduce_tasks if jc.reduce_tasks and jc.reduce_ratio > 0 else []
        jobs.append({
            "id": i + 1,
            "weight": float(weights[i]),
            "release": group * spec.release_gap,
            "map": _map_sizes(jc.total, jc.task_size),
            "reduce": reduce,
        })
    logger.debug(f'Generated {n} jobs on {spec.machines} machines ({spec.fast_count} fast).')
    return validate_workload({"machines": machines, "jobs": jobs})

@dataclass(frozen=True)
class ResultRow:
    seed: int
    scheduler: str
    twct_seconds: float
    twct_hours: float
    lp_bound: float
    emp_ratio: float
    theo_ratio: float
    D: float
    improvement_vs_dmrs: float

COLUMNS = tuple(f.name for f in fields(ResultRow))

@dataclass(frozen=True)
class ExperimentResult:
    """One row per (seed, scheduler), seeds ascending, schedulers in SCHEDULERS order."""
    rows: Tuple[ResultRow, ...]

    def twct(self, seed: int, scheduler: str) -> float:
        for row in self.rows:
            if row.seed == seed and row.scheduler == scheduler:
                return row.twct_seconds
        raise KeyError((seed, scheduler))

    @property
    def seeds(self) -> List[int]:
        return sorted({row.seed for row in self.rows})

    @property
    def schedulers(self) -> List[str]:
        present = {row.scheduler for row in self.rows}
        return [name for name in SCHEDULERS if name in present]

def _ratio(twct: float, lp: float) -> float:
    if lp > 0:
        return twct / lp
    return 1.0 if twct == 0 else math.inf

def _improvement(dmrs: float, other: float) -> float:
    return 1 - dmrs / other if other > 0 else 0.0

def _execute(name: str, w: Workload, sch: Schedule, mode: str, perturb: Optional[PerturbationModel]):
    # runtime machine choice only exists for DMRS, the baselines replay their plan
    if mode == 'dynamic' and name == 'dmrs':
        return execute_dynamic(w, sch.order, perturb)
    return execute_static(w, sch, perturb)

def run_experiment(w: Workload, seeds: Iterable[int], schedulers: Sequence[str]=SCHEDULERS,
                   mode: str='static', perturb: Optional[Tuple[float, float]]=None,
                   perturb_scope: str='task', early_reduce: bool=True) -> ExperimentResult:
    """Plans, validates and executes every scheduler on one workload for every seed.

    The seed drives Map-only's reduce placement and the duration perturbation.
    DMRS always runs since improvements are measured against it. Raises
    InvariantViolation when a schedule or trace is illegal, when a planned
    schedule beats the LP lower bound or when DMRS exceeds its proven ratio.
    """
    if mode not in ('static', 'dynamic'):
        raise InvalidSpec(f'Unknown execution mode "{mode}", use static or dynamic.')
    names = [name for name in SCHEDULERS if name == 'dmrs' or name in schedulers]
    s = derive_stats(w)
    lp = solve_lp(w, s)
    ratio = theoretical_ratio(w, s)
    fixed: Dict[str, Schedule] = {}
    rows = []
    for seed in sorted(set(seeds)):
        perturbation = None
        if perturb is not None:
            perturbation = PerturbationModel('multiplicative', perturb[0], perturb[1], seed, perturb_scope)
        twcts = {}
        for name in names:
            sch = fixed.get(name)
            if sch is None:
                sch = run_scheduler(name, w, s, lp, seed=seed, early_reduce=early_reduce)
                _check(w, name, sch, lp.objective, ratio)
                if name != 'maponly':
                    fixed[name] = sch
            trace = _execute(name, w, sch, mode, perturbation)
            violations = validate_schedule(w, trace)
            if violations:
                raise InvariantViolation(f'{name} execution is not legal: {violations[0].detail}.', details=violations)
            twcts[name] = trace.twct
        for name in names:
            rows.append(ResultRow(
                seed=seed,
                scheduler=name,
                twct_seconds=twcts[name],
                twct_hours=twcts[name] / SECONDS_PER_HOUR,
                lp_bound=lp.objective,
                emp_ratio=_ratio(twcts[name], lp.objective),
                theo_ratio=ratio,
                D=s.D,
                improvement_vs_dmrs=_improvement(twcts['dmrs'], twcts[name]),
            ))
        logger.info(f'Seed {seed}: ' + ', '.join(f'{name} {twcts[name]:.1f}s' for name in names))
    return ExperimentResult(tuple(rows))

def _check(w: Workload, name: str, sch: Schedule, lp_bound: float, ratio: float) -> None:
    violations = validate_schedule(w, sch)
    if violations:
        raise InvariantViolation(f'{name} schedule is not legal: {violations[0].detail}.', details=violations)
    if sch.twct < lp_bound - BOUND_TOL:
        raise InvariantViolation(f'{name} schedule ({sch.twct}) beats the LP lower bound ({lp_bound}).')
    if name == 'dmrs' and sch.twct > ratio * lp_bound + BOUND_TOL:
        raise InvariantViolation(f'DMRS ({sch.twct}) exceeds {ratio} times the LP bound ({lp_bound}).')

def run_scenario(spec: ScenarioSpec, seeds: Iterable[int], **options) -> ExperimentResult:
    """Draws one workload per seed and runs the experiment on it with that seed."""
    rows = []
    for seed in sorted(set(seeds)):
        w = generate_scenario(spec, seed)
        rows.extend(run_experiment(w, [seed], **options).rows)
    return ExperimentResult(tuple(rows))

def elephant_sweep(counts: Sequence[int]=(2, 6, 10, 14), seeds: Iterable[int]=range(20),
                   **options) -> Dict[int, ExperimentResult]:
    """Runs the elephant scenario for every elephant count."""
    seeds = list(seeds)
    return {count: run_scenario(elephant_scenario(count), seeds, **options) for count in counts}

def summarize(res: ExperimentResult) -> Dict[str, Dict[str, float]]:
    """Per scheduler: mean TWCT, mean improvement of DMRS and how often DMRS is at least as good."""
    summary = {}
    for name in res.schedulers:
        rows = [row for row in res.rows if row.scheduler == name]
        wins = [res.twct(row.seed, 'dmrs') <= row.twct_seconds + COMPARE_TOL for row in rows]
        summary[name] = {
            "mean_twct_seconds": math.fsum(row.twct_seconds for row in rows) / len(rows),
            "mean_twct_hours": math.fsum(row.twct_hours for row in rows) / len(rows),
            "mean_improvement_vs_dmrs": math.fsum(row.improvement_vs_dmrs for row in rows) / len(rows),
            "dmrs_win_rate": sum(wins) / len(wins),
        }
    return summary

def dmrs_best_rate(res: ExperimentResult, tol: float=COMPARE_TOL) -> float:
    """Share of seeds on which DMRS has the lowest TWCT of all schedulers."""
    best = [
        res.twct(seed, 'dmrs') <= min(res.twct(seed, name) for name in res.schedulers) + tol
        for seed in res.seeds
    ]
    return sum(best) / len(best)

def emit_results(res: ExperimentResult, fmt: str='csv') -> bytes:
    """Serializes results as CSV or JSON, floats at full precision."""
    if fmt == 'json':
        return (json.dumps([asdict(row) for row in res.rows], indent=2) + '\n').encode()
    if fmt != 'csv':
        raise InvalidSpec(f'Unknown results format "{fmt}", use csv or json.')
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(COLUMNS)
    for row in res.rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in _row_values(row)])
    return out.getvalue().encode()

def _row_values(row: ResultRow) -> Tuple:
    return tuple(getattr(row, name) for name in COLUMNS)

def parse_results(data: bytes, fmt: str='csv') -> ExperimentResult:
    """Reads results written by emit_results."""
    try:
        if fmt == 'json':
            records = json.loads(data.decode())
        elif fmt == 'csv':
            reader = csv.DictReader(io.StringIO(data.decode()))
            if tuple(reader.fieldnames or ()) != COLUMNS:
                raise InvalidResults(f'Results header {reader.fieldnames} does not match {list(COLUMNS)}.')
            records = list(reader)
        else:
            raise InvalidSpec(f'Unknown results format "{fmt}", use csv or json.')
        return ExperimentResult(tuple(ResultRow(
            seed=int(r['seed']),
            scheduler=str(r['scheduler']),
            **{name: float(r[name]) for name in COLUMNS[2:]},
        ) for r in records))
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidResults(f'Results are malformed ({e}).')
