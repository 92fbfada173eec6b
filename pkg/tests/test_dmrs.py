import pytest

from mapredsched import *
from conftest import job, random_workload, workload


def _spans(sch):
    return [(p.job, p.phase.value, p.task, p.machine, p.start, p.end) for p in sch.placements]

def _lp(C):
    return LpSolution(C=C, C_M={j: 0.0 for j in C}, objective=0.0, generated_sets=(), iterations=1)

def _stats(p, mu_job):
    return DerivedStats(mu=4.0, q={j: 1 for j in p}, mu_job=mu_job, p_map=p, p_reduce={j: 0.0 for j in p}, p=p, D=1.0)

def test_job_order_tie_by_id():
    assert job_order(_lp({1: 5.0, 2: 4.0}), _stats({1: 10.0, 2: 6.0}, {1: 2.0, 2: 2.0})) == (1, 2)

def test_job_order_by_key():
    assert job_order(_lp({1: 5.0, 2: 4.0}), _stats({1: 10.0, 2: 6.0}, {1: 2.0, 2: 3.0})) == (1, 2)
    assert job_order(_lp({1: 5.0, 2: 1.0}), _stats({1: 10.0, 2: 6.0}, {1: 2.0, 2: 3.0})) == (2, 1)

def test_job_order_single():
    assert job_order(_lp({1: 3.0}), _stats({1: 1.0}, {1: 1.0})) == (1,)

def test_schedule_single_machine(single_job):
    sch = schedule_dmrs(single_job, (1,))
    assert _spans(sch) == [(1, 'map', 1, 0, 0.0, 2.0), (1, 'reduce', 1, 0, 2.0, 5.0)]
    assert sch.twct == 5.0

def test_schedule_ties_to_fastest(two_speed_job):
    sch = schedule_dmrs(two_speed_job, (1,))
    assert _spans(sch) == [
        (1, 'map', 1, 0, 0.0, 2.0),
        (1, 'map', 2, 0, 2.0, 4.0),
        (1, 'reduce', 1, 0, 4.0, 5.0),
    ]
    assert sch.map_completion[1] == 4.0
    assert sch.job_completion[1] == 5.0

def test_schedule_waits_for_release():
    w = workload([1], job(1, map=[1], release=10))
    sch = schedule_dmrs(w, (1,))
    assert _spans(sch) == [(1, 'map', 1, 0, 10.0, 11.0)]
    assert sch.twct == 11.0

def test_schedule_rejects_bad_order(single_job):
    with pytest.raises(InvalidOrder):
        schedule_dmrs(single_job, (1, 1))
    with pytest.raises(InvalidOrder):
        schedule_dmrs(single_job, (2,))

def test_plan_follows_lp_order():
    w = workload([2, 1], job(1, map=[8, 8], reduce=[8], weight=1), job(2, map=[1], reduce=[1], weight=5))
    sch = plan_dmrs(w)
    assert sch.order == (2, 1)
    assert validate_schedule(w, sch) == []

def test_lemma2_bound(two_speed_job):
    s = derive_stats(two_speed_job)
    assert lemma2_bound(two_speed_job, s, (1,), 1) == pytest.approx(16 / 3)

def test_lemma2_single_machine():
    w = workload([2], job(1, map=[4], reduce=[2], release=3), job(2, map=[6]))
    s = derive_stats(w)
    bounds = lemma2_bounds(w, s, (2, 1))
    assert bounds[2] == pytest.approx(3.0)
    assert bounds[1] == pytest.approx(3 + 12 / 2)

def test_lemma2_tiny_sizes():
    w = workload([1, 1, 1], job(1, map=[1e-9], reduce=[1e-9], release=7))
    s = derive_stats(w)
    assert lemma2_bound(w, s, (1,), 1) == pytest.approx(7.0)

def test_theoretical_ratio_zero_release():
    w = workload([1, 1], job(1, map=[4, 2], reduce=[2, 2]))
    s = derive_stats(w)
    assert s.D == pytest.approx(5 / 3)
    assert theoretical_ratio(w, s) == pytest.approx(3.2)

def test_theoretical_ratio_single_machine():
    w = workload([3], job(1, map=[4, 2], reduce=[2]))
    assert theoretical_ratio(w, derive_stats(w)) == 2

def test_theoretical_ratio_releases():
    w = workload([1] * 12, job(1, map=[1], release=1))
    s = derive_stats(w)
    assert theoretical_ratio(w, s) == pytest.approx(25)
    assert theoretical_ratio(w, s, zero_release=True) == pytest.approx(24)

def test_approximation_and_completion_bounds(rng):
    for _ in range(500):
        w = random_workload(rng, n_max=8, m_max=4)
        s = derive_stats(w)
        lp = solve_lp(w, s)
        order = job_order(lp, s)
        sch = schedule_dmrs(w, order)
        assert validate_schedule(w, sch) == []
        assert sch.twct >= lp.objective - 1e-6
        assert sch.twct <= theoretical_ratio(w, s) * lp.objective + 1e-6
        bounds = lemma2_bounds(w, s, order)
        for job_id in order:
            assert sch.job_completion[job_id] <= bounds[job_id] + 1e-9
