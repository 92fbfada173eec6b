import pytest

from mapredsched import *
from conftest import job, random_workload, workload


def _rows(w):
    return [(dict(row.coefficients), row.rhs) for row in base_constraints(w, derive_stats(w))]

def test_base_constraints_single_machine(single_job):
    # C_M >= 2 and C - C_M >= 3
    assert _rows(single_job) == [({1: 1.0}, 2.0), ({0: 1.0, 1: -1.0}, 3.0)]

def test_base_constraints_use_job_rate(two_speed_job):
    (cm, map_rhs), (c, reduce_rhs) = _rows(two_speed_job)
    assert map_rhs == pytest.approx(8 / 3)
    assert reduce_rhs == pytest.approx(1.0)

def test_base_constraints_release():
    w = workload([1], job(1, map=[1], release=10))
    assert _rows(w)[0] == ({1: 1.0}, 11.0)

@pytest.fixture
def rate_stats():
    # p = 10, mu = 18, mu_j = 17
    return derive_stats(workload([8, 8, 1, 1], job(1, map=[4, 3], reduce=[3])))

def test_violation_satisfied(rate_stats):
    assert violation({1}, {1: 1.0}, rate_stats) == pytest.approx(-10 + 100 / 36 + 100 / 34)

def test_violation_violated(rate_stats):
    assert violation({1}, {1: 0.5}, rate_stats) == pytest.approx(0.718954, abs=1e-6)

def test_violation_empty(rate_stats):
    with pytest.raises(EmptySubset):
        violation(set(), {1: 1.0}, rate_stats)

@pytest.fixture
def two_job_stats():
    # p = (4, 6) and mu_j = mu = 5
    return derive_stats(workload([3, 2], job(1, map=[2, 2]), job(2, map=[3, 3])))

def test_oracle_finds_prefix(two_job_stats):
    C = {1: 0.5, 2: 1.0}
    report = separation_oracle(C, two_job_stats)
    assert report.subset == {1, 2}
    assert report.value == pytest.approx(7.2)
    assert brute_force_oracle(C, two_job_stats).subset == report.subset
    assert report.value == pytest.approx(violation(report.subset, C, two_job_stats))

def test_oracle_none_when_satisfied(two_job_stats):
    C = {1: 100.0, 2: 100.0}
    assert separation_oracle(C, two_job_stats) is None
    assert brute_force_oracle(C, two_job_stats) is None

def test_oracle_single_job(rate_stats):
    assert separation_oracle({1: 50.0}, rate_stats) is None
    report = brute_force_oracle({1: 0.5}, rate_stats)
    assert report.subset == {1}
    assert report.value == pytest.approx(violation({1}, {1: 0.5}, rate_stats))

def test_brute_force_limit():
    s = derive_stats(workload([1], *(job(j, map=[1]) for j in range(1, 22))))
    with pytest.raises(TooManyJobs):
        brute_force_oracle({j: 0.0 for j in range(1, 22)}, s)

def test_oracle_matches_enumeration(rng):
    positive = 0
    for _ in range(200):
        w = random_workload(rng, n_max=12, m_max=5)
        s = derive_stats(w)
        scale = sum(s.p.values()) / s.mu
        C = {j: float(rng.uniform(0, 2 * scale)) for j in w.job_ids}
        fast = separation_oracle(C, s, tol=0.0)
        slow = brute_force_oracle(C, s, tol=0.0)
        assert (fast is None) == (slow is None)
        if fast is not None:
            positive += 1
            assert fast.value == pytest.approx(slow.value, abs=1e-9)
    assert positive > 0

def test_queyranne_cut_scaled(two_job_stats):
    cut = queyranne_cut({1, 2}, two_job_stats)
    assert cut.coefficients == {0: 0.4, 1: 0.6}
    # (100 + 16 + 36) / 10 / 10
    assert cut.rhs == pytest.approx(1.52)

def test_solve_lp_single_job(single_job):
    lp = solve_lp(single_job, derive_stats(single_job))
    assert lp.objective == pytest.approx(5.0)
    assert lp.C[1] == pytest.approx(5.0)
    assert lp.C_M[1] == pytest.approx(2.0)

def test_solve_lp_checks_out(rng):
    for _ in range(30):
        w = random_workload(rng)
        s = derive_stats(w)
        lp = solve_lp(w, s)
        assert check_lp_solution(w, s, lp) == []
        assert lp.iterations >= len(lp.generated_sets)

def test_row_generation_matches_full_lp(rng):
    for _ in range(100):
        w = random_workload(rng, n_max=10)
        s = derive_stats(w)
        full = solve_lp_exhaustive(w, s)
        assert solve_lp(w, s).objective == pytest.approx(full.objective, rel=1e-6)

def test_exhaustive_limit():
    w = workload([1], *(job(j, map=[1]) for j in range(1, 14)))
    with pytest.raises(TooManyJobs):
        solve_lp_exhaustive(w, derive_stats(w))

def test_cut_limit(rng):
    w = workload([2, 1], *(job(j, map=[j, 1], reduce=[2]) for j in range(1, 6)))
    with pytest.raises(IterationLimitExceeded):
        solve_lp(w, derive_stats(w), max_cuts=0)

def test_homogeneous_scaling():
    w = workload([2, 1], job(1, map=[4, 2], reduce=[3], weight=2), job(2, map=[5], reduce=[1, 1]))
    scaled = workload([4, 2], job(1, map=[4, 2], reduce=[3], weight=2), job(2, map=[5], reduce=[1, 1]))
    lp = solve_lp(w, derive_stats(w))
    fast = solve_lp(scaled, derive_stats(scaled))
    assert fast.objective == pytest.approx(lp.objective / 2)
