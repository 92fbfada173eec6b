import math

import pytest

from mapredsched import *
from conftest import job, workload


def test_uniform_scenario_shape():
    w = generate_scenario(uniform_scenario('wordcount'), seed=1)
    assert w.n == 20
    assert w.cluster.speeds == (8.0,) * 6 + (1.0,) * 6
    for j in w.jobs:
        assert j.map_sizes == (64.0,) * 16
        assert j.reduce_sizes == (pytest.approx(102.4),)
        assert j.weight in {1, 2, 3, 4, 5}
    assert sorted({j.release for j in w.jobs}) == [0.0, 60.0]
    assert sum(j.release == 0 for j in w.jobs) == 10

def test_sort_like_reduces():
    w = generate_scenario(uniform_scenario('sort'), seed=0)
    assert all(j.reduce_sizes == (256.0,) * 4 for j in w.jobs)

def test_mixed_scenario_classes():
    w = generate_scenario(mixed_scenario(), seed=4)
    sizes = sorted((j.map_total, len(j.map_sizes)) for j in w.jobs)
    assert sizes == [(512.0, 16)] * 4 + [(1024.0, 16)] * 12 + [(2048.0, 16)] * 4

def test_large_small_scenario():
    w = generate_scenario(large_small_scenario(large=3), seed=2)
    totals = sorted(j.map_total for j in w.jobs)
    assert totals == [512.0] * 3 + [1024.0] * 12 + [2048.0] * 3
    with pytest.raises(InvalidSpec):
        large_small_scenario(large=10)

def test_elephant_scenario():
    w = generate_scenario(elephant_scenario(elephants=10), seed=9)
    assert w.n == 18
    assert sum(len(j.map_sizes) == 32 for j in w.jobs) == 10
    assert sum(len(j.map_sizes) == 8 for j in w.jobs) == 8
    assert all(len(j.reduce_sizes) == 4 for j in w.jobs)

def test_map_sizes_conserve_total():
    spec = ScenarioSpec(machines=2, job_mix=(JobClass(3, 100.0, 64.0, 0, 0.0),))
    w = generate_scenario(spec)
    for j in w.jobs:
        assert j.map_sizes == (64.0, 36.0)
        assert j.reduce_sizes == ()

def test_generation_deterministic():
    spec = mixed_scenario('terasort')
    a = dump_json(prettify_workload(generate_scenario(spec, seed=42)))
    b = dump_json(prettify_workload(generate_scenario(spec, seed=42)))
    assert a == b
    assert a != dump_json(prettify_workload(generate_scenario(spec, seed=43)))

def test_spec_seed_default():
    spec = uniform_scenario(seed=8)
    assert generate_scenario(spec) == generate_scenario(spec, seed=8)

def test_scenario_from_dict():
    spec = scenario_from_dict({
        "machines": 4,
        "speed_ratio": 2,
        "fast_machines": 1,
        "weights": [2, 2],
        "jobs": [{"count": 3, "total": 128, "task_size": 64, "benchmark": "wordcount"}],
    })
    w = generate_scenario(spec)
    assert w.cluster.speeds == (2.0, 1.0, 1.0, 1.0)
    assert all(j.weight == 2 for j in w.jobs)
    assert all(len(j.reduce_sizes) == 1 for j in w.jobs)

@pytest.mark.parametrize('data', [
    {"jobs": []},
    {"jobs": [{"count": 1, "total": 10, "task_size": 5}], "racks": 2},
    {"jobs": [{"count": 1, "total": 10}]},
    {"jobs": [{"count": 1, "total": 10, "task_size": 5, "benchmark": "grep"}]},
    {"jobs": [{"count": 1, "total": 10, "task_size": 5}], "machines": 0},
    {"jobs": [{"count": 1, "total": 10, "task_size": 5}], "weights": [3, 1]},
])
def test_invalid_scenarios(data):
    with pytest.raises(InvalidSpec):
        scenario_from_dict(data)

def test_presets():
    assert preset_scenario('uniform', 'sort') == uniform_scenario('sort')
    assert preset_scenario('elephant', count=2) == elephant_scenario(2)
    with pytest.raises(InvalidSpec):
        preset_scenario('uniform', count=3)
    with pytest.raises(InvalidSpec):
        preset_scenario('elephant', 'wordcount')
    with pytest.raises(InvalidSpec):
        preset_scenario('cluster')

def test_experiment_single_job(single_job):
    res = run_experiment(single_job, [0, 1])
    assert [(r.seed, r.scheduler) for r in res.rows] == [
        (seed, name) for seed in (0, 1) for name in SCHEDULERS
    ]
    for row in res.rows:
        assert row.twct_seconds == pytest.approx(5.0)
        assert row.lp_bound == pytest.approx(5.0)
        assert row.emp_ratio == pytest.approx(1.0)
        assert row.improvement_vs_dmrs == pytest.approx(0.0)
        assert row.twct_hours == row.twct_seconds / 3600

def test_experiment_reduce_only_job():
    res = run_experiment(workload([2, 1], job(1, reduce=[4])), [0])
    assert res.schedulers == list(SCHEDULERS)
    assert res.rows[0].twct_seconds == pytest.approx(2.0)
    assert all(row.twct_seconds >= row.lp_bound - 1e-6 for row in res.rows)

def test_experiment_always_runs_dmrs():
    w = workload([2, 1], job(1, map=[2, 2], reduce=[1]), job(2, map=[1], weight=3))
    res = run_experiment(w, [5], schedulers=['fifo'])
    assert res.schedulers == ['dmrs', 'fifo']

def test_experiment_bounds_hold():
    w = generate_scenario(ScenarioSpec(machines=4, job_mix=(job_class(6, 256, 64, 'terasort'),)), seed=3)
    res = run_experiment(w, range(3), mode='dynamic', perturb=(0.8, 1.5))
    for row in res.rows:
        assert row.emp_ratio > 0
        if row.scheduler == 'dmrs':
            assert row.improvement_vs_dmrs == 0.0

def test_experiment_rejects_mode(single_job):
    with pytest.raises(InvalidSpec):
        run_experiment(single_job, [0], mode='live')

def _result():
    spec = ScenarioSpec(machines=3, job_mix=(job_class(4, 128, 64, 'sort'),))
    return run_scenario(spec, [2, 0, 1])

def test_rows_in_fixed_order():
    res = _result()
    assert [(r.seed, r.scheduler) for r in res.rows] == [
        (seed, name) for seed in (0, 1, 2) for name in SCHEDULERS
    ]
    for row in res.rows:
        assert row.lp_bound <= row.twct_seconds + 1e-6
        if row.scheduler == 'dmrs':
            assert row.emp_ratio <= row.theo_ratio + 1e-9

def test_csv_header_and_precision():
    res = _result()
    data = emit_results(res, 'csv')
    lines = data.decode().splitlines()
    assert lines[0] == 'seed,scheduler,twct_seconds,twct_hours,lp_bound,emp_ratio,theo_ratio,D,improvement_vs_dmrs'
    assert len(lines) == len(res.rows) + 1
    assert parse_results(data, 'csv') == res

def test_json_round_trip():
    res = _result()
    assert parse_results(emit_results(res, 'json'), 'json') == res

def test_bad_results():
    with pytest.raises(InvalidResults):
        parse_results(b'seed,scheduler\n0,dmrs\n', 'csv')
    with pytest.raises(InvalidResults):
        parse_results(b'[{"seed": 0}]', 'json')
    with pytest.raises(InvalidSpec):
        emit_results(_result(), 'xml')

def test_summarize():
    res = _result()
    summary = summarize(res)
    assert list(summary) == list(SCHEDULERS)
    assert summary['dmrs']['dmrs_win_rate'] == 1.0
    assert summary['dmrs']['mean_improvement_vs_dmrs'] == 0.0
    assert 0 <= dmrs_best_rate(res) <= 1

@pytest.mark.slow
def test_elephant_sweep_trend():
    sweep = elephant_sweep((2, 6, 10, 14), range(20))
    cells = wins = 0
    for count, res in sweep.items():
        for seed in res.seeds:
            cells += 1
            best = min(res.twct(seed, name) for name in SCHEDULERS)
            wins += res.twct(seed, 'dmrs') <= best + 1e-9
        fifo = [r.improvement_vs_dmrs for r in res.rows if r.scheduler == 'fifo']
        assert math.fsum(fifo) / len(fifo) > 0, count
    assert wins / cells >= 0.9
