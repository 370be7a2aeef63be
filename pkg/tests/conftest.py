"""Shared fixtures: the three schedules most tests exercise.

Session-scoped because building the rule-generated schedule scans ~5e5
gain values and the others run small searches; all are immutable.
"""

from fractions import Fraction

import pytest

from stairwalk import (
    build_paper_schedule,
    paper_profile,
    scaled_profile,
    steady_drift_schedule,
)


@pytest.fixture(scope="session")
def paper_schedule():
    """The original construction at sigma = 1/2, exact-rational profile."""
    return build_paper_schedule(Fraction(1, 2))


@pytest.fixture(scope="session")
def scaled_schedule():
    """Desk-scale rule-generated schedule: M = 146, N_1 = 771."""
    return build_paper_schedule(0.5, scaled_profile())


@pytest.fixture(scope="session")
def cond_schedule():
    """Ten-phase user-designed schedule sized for conditional-success runs."""
    return steady_drift_schedule(10, sigma=0.01)
