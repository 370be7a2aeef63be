"""Dynamic-programming transient laws vs. hand values and path enumeration."""

from fractions import Fraction

import numpy as np
import pytest

from stairwalk import (
    ResourceBudgetError,
    event_probability,
    flat_step_distribution,
    law_at,
    scaled_profile,
    transient_law,
    user_schedule,
)
from stairwalk.oracle import law_csv_rows


@pytest.fixture(scope="module")
def a8_schedule():
    return user_schedule(scaled_profile(), [100], [8.0], [10])


def test_hand_values_n1_n2(a8_schedule):
    law1 = law_at(1, a8_schedule, arithmetic="rational")
    assert law1.mass == [Fraction(1, 2), Fraction(1, 2)]
    law2 = law_at(2, a8_schedule, arithmetic="rational")
    assert law2.mass == [Fraction(1, 4), Fraction(13, 20), Fraction(1, 10)]
    assert law2.total() == 1


def _enumerate_paths(horizon, a_of_step):
    """Independent oracle: sum over all +-1/0 step sequences."""
    out = {}

    def walk(n, s, prob):
        if prob == 0:
            return
        if n == horizon:
            out[s] = out.get(s, Fraction(0)) + prob
            return
        law = flat_step_distribution(s, a_of_step(n))
        if s > 0:
            walk(n + 1, s - 1, prob * law.p_down)
        walk(n + 1, s, prob * law.p_stay)
        walk(n + 1, s + 1, prob * law.p_up)

    walk(0, 0, Fraction(1))
    return out


@pytest.mark.parametrize("a2", [Fraction(399969, 31000), Fraction(100)])
@pytest.mark.parametrize("horizon", [1, 3, 6])
def test_dp_matches_path_enumeration(a2, horizon):
    # phase 1 (two steps at a = 8), then the enumerated a
    sched = user_schedule(scaled_profile(), [2, 100], [8.0, a2], [1, 2])
    dp = law_at(horizon, sched, arithmetic="rational")
    brute = _enumerate_paths(horizon, lambda n: Fraction(8) if n < 2 else a2)
    for s, p in enumerate(dp.mass):
        assert brute.get(s, Fraction(0)) == p
    assert dp.total() == 1


def test_phase1_never_steps_down(a8_schedule):
    # at a = 8 the mass at s-1 never receives anything: P(S_n < S_{n-1}) = 0
    prev = None
    for law in transient_law(40, a8_schedule, arithmetic="rational"):
        if prev is not None:
            # tail mass P(S >= k) is nondecreasing in n for every k
            for k in range(len(prev.mass)):
                assert law.prob_greater(k, strict=False) >= prev.prob_greater(
                    k, strict=False
                )
        prev = law


def test_phase1_tail_monotone_float(scaled_schedule):
    laws = list(transient_law(300, scaled_schedule))
    for a, b in zip(laws, laws[1:]):
        ca, cb = a.cdf(), b.cdf()
        assert (cb[: len(ca)] <= ca + 1e-13).all()


def test_conservation_float(scaled_schedule):
    law = law_at(2000, scaled_schedule)
    assert law.mass_defect() <= 1e-12


def test_rational_float_agreement(scaled_schedule):
    exact = law_at(50, scaled_schedule, arithmetic="rational")
    approx = law_at(50, scaled_schedule)
    assert np.allclose(
        np.asarray([float(p) for p in exact.mass]), approx.mass, atol=1e-14
    )


def test_phase_switch_changes_law():
    prof = scaled_profile()
    switched = user_schedule(prof, [3, 40], [8.0, 12.0], [1, 2])
    flat = user_schedule(prof, [100], [8.0], [1])
    n = 6
    law_s = law_at(n, switched, arithmetic="rational")
    law_f = law_at(n, flat, arithmetic="rational")
    assert law_s.mass != law_f.mass
    # manual two-kernel recursion as an oracle
    mass = {0: Fraction(1)}
    for step in range(n):
        a = Fraction(8) if step < 3 else Fraction(12)
        new = {}
        for s, p in mass.items():
            law = flat_step_distribution(s, a)
            if s > 0:
                new[s - 1] = new.get(s - 1, Fraction(0)) + p * law.p_down
            new[s] = new.get(s, Fraction(0)) + p * law.p_stay
            new[s + 1] = new.get(s + 1, Fraction(0)) + p * law.p_up
        mass = new
    for s, p in enumerate(law_s.mass):
        assert mass.get(s, Fraction(0)) == p


def test_event_probability(a8_schedule, scaled_schedule):
    assert event_probability(1, a8_schedule, 0, strict=True, arithmetic="rational") == Fraction(1, 2)
    assert event_probability(1, a8_schedule, -1, strict=True, arithmetic="rational") == 1
    assert event_probability(2, a8_schedule, 0, strict=False, arithmetic="rational") == 1
    # strict vs non-strict differ by the point mass
    p_gt = event_probability(30, scaled_schedule, 10, strict=True)
    p_ge = event_probability(30, scaled_schedule, 10, strict=False)
    law = law_at(30, scaled_schedule)
    assert p_ge - p_gt == pytest.approx(float(law.mass[10]), abs=1e-15)


def test_phase1_sizing_anchor(scaled_schedule):
    # the scaled-profile phase-1 event probability clears 1 - sigma/2
    p = event_probability(scaled_schedule.M0, scaled_schedule, scaled_schedule.M)
    assert p > 1 - float(scaled_schedule.sigma) / 2


def test_budget_errors(a8_schedule, scaled_schedule):
    with pytest.raises(ResourceBudgetError):
        transient_law(30_000, scaled_schedule)
    with pytest.raises(ResourceBudgetError):
        transient_law(100, a8_schedule, arithmetic="rational")
    with pytest.raises(ValueError):
        transient_law(10, a8_schedule, arithmetic="decimal")
    # raising the budget explicitly is allowed
    law = law_at(70, a8_schedule, arithmetic="float", horizon_budget=10**5)
    assert law.n == 70


def test_law_csv_rows(scaled_schedule):
    rows = list(law_csv_rows(5, scaled_schedule))
    assert rows[0] == ("n", "s", "mass")
    assert all(len(r) == 3 for r in rows[1:])
    n1 = scaled_schedule.N(1)
    rows_b = list(
        law_csv_rows(n1, scaled_schedule, boundaries_only=True)
    )
    assert {r[0] for r in rows_b[1:]} == {n1}
