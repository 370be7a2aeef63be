"""Schedule construction: M and M0 searches, rule values, feasibility."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from stairwalk import (
    PhaseSchedule,
    build_paper_schedule,
    check_schedule_feasibility,
    concentration_gain,
    find_M,
    find_M0,
    log_growth_schedule,
    paper_profile,
    scaled_profile,
    steady_drift_schedule,
    user_schedule,
)
from stairwalk.core import ConstantsProfile


def _brute_find_M(delta, K, h, m_hi):
    """Independent oracle: scan the quantifier directly."""
    m = np.arange(1, m_hi, dtype=np.float64)
    g = delta * m - 2.0 * np.sqrt(K * m * np.log(m))
    bad = np.nonzero(g < h)[0]
    if len(bad) == 0:
        return 1
    m_star = int(bad[-1]) + 1
    assert m_star + 10 < m_hi, "oracle scan window too small"
    return m_star + 3


def _profile(delta, K, h):
    return ConstantsProfile(
        drift_floor=delta, drift_target=delta * 2 + 1e-3, slack=1e-6,
        a_offset=1e-3, overshoot=h, hoeffding_K=K,
    )


@pytest.mark.parametrize(
    "delta,K,h,m_hi,expected",
    [
        (0.5, 1, 4.0, 10**5, 89),
        (1.0, 1, 0.001, 10**4, 11),
        (0.4, 1, 4.0, 10**5, 146),
        (0.25, 2, 3.0, 10**6, None),
    ],
)
def test_find_M_against_brute_force(delta, K, h, m_hi, expected):
    got = find_M(_profile(delta, K, h))
    assert got == _brute_find_M(delta, K, h, m_hi)
    if expected is not None:
        assert got == expected


def test_find_M_paper_profile_magnitude():
    M = find_M(paper_profile())
    assert M == 527866  # brute-scan value, order of several hundred thousand
    # postcondition re-verified on a sample of m >= M-2, including M-2 itself
    m = np.unique(np.concatenate([[M - 2, M - 1, M], np.linspace(M - 2, 10 * M, 200, dtype=np.int64)]))
    assert (concentration_gain(m, 0.01, 1) >= 4).all()
    assert concentration_gain(M - 3, 0.01, 1) < 4


def _brute_find_M0(sigma_frac, M, m_hi):
    """Exact-rational oracle for small scales."""
    def survival(m):
        return sum(
            Fraction(math.comb(m, k)) * Fraction(1, 5) ** k * Fraction(4, 5) ** (m - k)
            for k in range(M + 1, m + 1)
        )
    ok = [survival(m) > 1 - sigma_frac for m in range(1, m_hi)]
    for m in range(len(ok), 0, -1):
        if not ok[m - 1]:
            assert m + 1 < m_hi - 5
            return m + 1
    return 1


@pytest.mark.parametrize(
    "sigma,M,m_hi,expected",
    [
        (Fraction(1, 2), 0, 60, 4),
        (Fraction(1, 2), 2, 120, None),
        (Fraction(9, 10), 2, 120, None),
        (Fraction(1, 10), 10, 400, 75),
    ],
)
def test_find_M0_exact_against_rational_oracle(sigma, M, m_hi, expected):
    got = find_M0(float(sigma), M, method="exact-binomial")
    assert got == _brute_find_M0(sigma, M, m_hi)
    if expected is not None:
        assert got == expected


def test_find_M0_conservative():
    # least m >= 51 with exp(-2 (m/5 - 10)^2 / m) <= 0.1
    got = find_M0(0.1, 10, method="hoeffding-conservative")
    assert got == 105
    m = got
    assert m / 5 > 10 and math.exp(-2 * (m / 5 - 10) ** 2 / m) <= 0.1
    assert math.exp(-2 * ((m - 1) / 5 - 10) ** 2 / (m - 1)) > 0.1


@pytest.mark.parametrize("sigma,M", [(0.5, 0), (0.25, 20), (0.1, 10), (0.9, 3)])
def test_find_M0_exact_below_conservative(sigma, M):
    exact = find_M0(sigma, M, method="exact-binomial")
    conservative = find_M0(sigma, M, method="hoeffding-conservative")
    assert exact <= conservative


def test_find_M0_sigma_zero_unsatisfiable():
    with pytest.raises(ValueError, match="unsatisfiable"):
        find_M0(0.0, 5, method="exact-binomial")
    with pytest.raises(ValueError, match="unsatisfiable"):
        find_M0(0.0, 5, method="hoeffding-conservative")


# ----------------------------------------------------------------------
# rule-generated schedule
# ----------------------------------------------------------------------


def test_paper_schedule_values(paper_schedule):
    s = paper_schedule
    assert s.a_of_phase(1) == 8
    assert s.a_of_phase(2) == Fraction(399969, 31000)  # 8*5/3.1 - 0.001 exactly
    assert float(s.a_of_phase(2)) == pytest.approx(12.902226, abs=1e-6)
    assert s.length(2) == s.M - 2
    assert s.length(5) == s.M - 2 + 2 * 3
    assert [s.threshold(i) for i in (1, 2, 3)] == [s.M, s.M + 4, s.M + 8]
    assert s.strict_threshold(1) and not s.strict_threshold(2)
    assert s.required_gain(2) == 4


def test_paper_schedule_phase1_sizing(paper_schedule):
    # phase 1 is sized against sigma/2 by default
    assert paper_schedule.sigma_phase1 == Fraction(1, 4)
    assert paper_schedule.M0 == find_M0(Fraction(1, 4), paper_schedule.M)


def test_a_sequence_invariants(paper_schedule):
    s = paper_schedule
    prev = Fraction(8)
    for i in range(2, 2001):
        a = s.a_of_phase(i)
        assert a >= 8
        assert a > prev
        assert a >= 4 * i  # divergence certificate
        prev = a


def test_step_indexing(paper_schedule):
    s = paper_schedule
    assert s.N(0) == 0
    assert s.N(1) == s.M0
    assert s.N(2) == s.M0 + s.M - 2
    assert s.a_of_step(0) == 8
    assert s.a_of_step(s.M0 - 1) == 8
    assert s.a_of_step(s.M0) == s.a_of_phase(2)
    assert s.a_of_step(s.N(2)) == s.a_of_phase(3)
    ns = [s.N(i) for i in range(8)]
    assert all(b > a for a, b in zip(ns, ns[1:]))


def test_schedule_json_round_trip(paper_schedule, cond_schedule):
    for sched in (paper_schedule, cond_schedule):
        back = PhaseSchedule.from_json(sched.to_json())
        assert back.to_jsonable() == sched.to_jsonable()
        assert back.schedule_hash() == sched.schedule_hash()
        for i in (1, 2, 3):
            assert back.length(i) == sched.length(i)
            assert float(back.a_of_phase(i)) == float(sched.a_of_phase(i))
            assert float(back.threshold(i)) == float(sched.threshold(i))


def test_user_schedule_validation():
    prof = scaled_profile()
    with pytest.raises(ValueError, match="a = 8"):
        user_schedule(prof, [10, 10], [9.0, 9.0], [5, 6])
    with pytest.raises(ValueError, match="nondecreasing"):
        user_schedule(prof, [10, 10, 10], [8.0, 10.0, 9.0], [5, 6, 7])
    with pytest.raises(ValueError, match=">= 8"):
        user_schedule(prof, [10, 10], [8.0, 7.5], [5, 6])
    with pytest.raises(ValueError, match="equal length"):
        user_schedule(prof, [10], [8.0, 9.0], [5, 6])
    with pytest.raises(ValueError):
        user_schedule(prof, [10, 0], [8.0, 9.0], [5, 6])
    with pytest.raises(ValueError, match="defines 2 phases"):
        user_schedule(prof, [10, 10], [8.0, 9.0], [5, 6]).length(3)


def test_build_paper_schedule_rejects_bad_sigma():
    with pytest.raises(ValueError):
        build_paper_schedule(0.0)
    with pytest.raises(ValueError):
        build_paper_schedule(1.0)


# ----------------------------------------------------------------------
# feasibility
# ----------------------------------------------------------------------


def test_paper_schedule_is_infeasible(paper_schedule):
    report = check_schedule_feasibility(paper_schedule, 10)
    assert report.first_violation is not None
    i, reason = report.first_violation
    assert i == 2 and reason == "gain below required threshold step"
    row = report.phase(2)
    assert row.drift > 0            # the drift itself is still positive at i = 2
    assert row.gain < row.required_gain
    # the worst-case height arithmetic is tight at every phase: T_{i-1} - L_i = 2i-2
    assert all(p.height_margin == 0 for p in report.phases)


def test_feasibility_height_margin_definition(cond_schedule):
    report = check_schedule_feasibility(cond_schedule, 10)
    assert report.ok
    row = report.phase(2)
    expected = float(cond_schedule.threshold(1)) - cond_schedule.length(2) - 2
    assert row.height_margin == expected


def test_feasibility_report_serialization(cond_schedule):
    report = check_schedule_feasibility(cond_schedule, 5)
    doc = report.to_jsonable()
    assert doc["ok"] is True and doc["first_violation"] is None
    assert len(doc["phases"]) == 4
    rows = list(report.csv_rows())
    assert rows[0][0] == "i"
    assert len(rows) == 5


def test_log_growth_template():
    sched = log_growth_schedule(300)
    assert sched.a_of_phase(2) == 8.0
    assert sched.a_of_phase(200) == max(8.0, 4.0 * math.log(202.0))
    assert sched.length(50) == 50**3
    report = check_schedule_feasibility(sched, 300)
    assert report.ok
    # spot-check one phase by hand: gain covers the threshold step exactly
    from stairwalk.domination import dominated_drift

    i = 123
    drift = dominated_drift(i, float(sched.a_of_phase(i)), float(sched.profile.slack))
    g = concentration_gain(sched.length(i), drift, 1)
    assert sched.required_gain(i) == math.floor(g)
    assert drift == pytest.approx(report.phase(i).drift)


def test_steady_drift_template(cond_schedule):
    s = cond_schedule
    assert s.length(1) == 5482          # exact-binomial sizing at sigma/2 = 0.005
    assert s.threshold(1) == 1020
    assert check_schedule_feasibility(s, 10).ok
    assert s.n_phases == 10
