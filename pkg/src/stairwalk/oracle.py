"""Exact transient law of the flattened walk by forward dynamic programming.

Starting from S_0 = 0 with probability 1, the law at step n+1 follows from
the law at step n by one application of the flattened step kernel under the
schedule's in-force adaptation value, so the full distribution at any finite
horizon is computable to floating (or, for short horizons, exact rational)
precision.  This is the independent ground truth the Monte Carlo engine is
validated against.

Mass is deliberately never renormalized: the per-step defect stays
observable and is reported by TransientLaw.mass_defect.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .kernel import flat_step_distribution, step_prob_tables

FLOAT = "float"
RATIONAL = "rational"

DEFAULT_HORIZON_BUDGET = 20_000
RATIONAL_HORIZON_LIMIT = 64  # denominators grow multiplicatively past this

_FLOAT_DEFECT_TOL = 1e-12


class ResourceBudgetError(RuntimeError):
    """Requested horizon exceeds the configured memory/time budget."""


@dataclass
class TransientLaw:
    """Distribution of S_n; mass[s] = P(S_n = s) for s in [0, n]."""

    n: int
    mass: np.ndarray | list

    def total(self):
        if isinstance(self.mass, np.ndarray):
            return float(self.mass.sum())
        return sum(self.mass)

    def mass_defect(self) -> float:
        return abs(float(self.total()) - 1.0)

    def prob_greater(self, threshold, strict: bool = True):
        """P(S_n > threshold) (strict) or P(S_n >= threshold)."""
        if isinstance(self.mass, np.ndarray):
            s = np.arange(len(self.mass))
            sel = s > threshold if strict else s >= threshold
            return float(self.mass[sel].sum())
        acc = Fraction(0)
        for s, p in enumerate(self.mass):
            if (s > threshold) if strict else (s >= threshold):
                acc += p
        return acc

    def cdf(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.mass, dtype=np.float64))


def transient_law(
    horizon: int,
    schedule,
    arithmetic: str = FLOAT,
    horizon_budget: int = DEFAULT_HORIZON_BUDGET,
) -> Iterator[TransientLaw]:
    """Yield the law of S_n for n = 0, 1, ..., horizon.

    Float mode runs in O(horizon^2) time and O(horizon) memory; rational
    mode is exact but limited to horizon <= 64.  Validation is eager; the
    recursion itself is lazy.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if horizon > horizon_budget:
        raise ResourceBudgetError(
            f"horizon {horizon} exceeds the budget of {horizon_budget} steps; "
            "raise horizon_budget explicitly or use a scaled profile"
        )
    if arithmetic == RATIONAL:
        if horizon > RATIONAL_HORIZON_LIMIT:
            raise ResourceBudgetError(
                f"rational mode supports horizon <= {RATIONAL_HORIZON_LIMIT}"
            )
        return _transient_rational(horizon, schedule)
    if arithmetic != FLOAT:
        raise ValueError(f"arithmetic must be {FLOAT!r} or {RATIONAL!r}")
    return _transient_float(horizon, schedule)


def _transient_float(horizon: int, schedule) -> Iterator[TransientLaw]:
    mass = np.zeros(horizon + 1, dtype=np.float64)
    mass[0] = 1.0
    yield TransientLaw(n=0, mass=mass[:1].copy())

    tables: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for n in range(horizon):
        a = float(schedule.a_of_step(n))
        if a not in tables:
            tables[a] = step_prob_tables(horizon, a)
        p_down, p_up = tables[a]
        width = n + 1  # current support is [0, n]
        cur = mass[:width]
        new = np.zeros(width + 1, dtype=np.float64)
        new[:width] = cur * (1.0 - p_down[:width] - p_up[:width])
        new[1:] += cur * p_up[:width]
        new[:-2] += (cur * p_down[:width])[1:]
        mass[: width + 1] = new
        yield TransientLaw(n=n + 1, mass=mass[: width + 1].copy())


def _transient_rational(horizon: int, schedule) -> Iterator[TransientLaw]:
    mass = [Fraction(1)]
    yield TransientLaw(n=0, mass=list(mass))
    for n in range(horizon):
        a = schedule.a_of_phase(schedule.phase_of_step(n))
        if isinstance(a, float):
            a = Fraction(a)
        new = [Fraction(0)] * (len(mass) + 1)
        for s, p in enumerate(mass):
            if p == 0:
                continue
            law = flat_step_distribution(s, a)
            if s > 0:
                new[s - 1] += p * law.p_down
            new[s] += p * law.p_stay
            new[s + 1] += p * law.p_up
        mass = new
        yield TransientLaw(n=n + 1, mass=list(mass))


def law_at(
    horizon: int,
    schedule,
    arithmetic: str = FLOAT,
    horizon_budget: int = DEFAULT_HORIZON_BUDGET,
) -> TransientLaw:
    """The law of S_horizon only (still O(horizon^2) work, O(horizon) memory)."""
    law = None
    for law in transient_law(horizon, schedule, arithmetic, horizon_budget):
        pass
    return law


def event_probability(
    horizon: int,
    schedule,
    threshold,
    strict: bool = True,
    arithmetic: str = FLOAT,
    horizon_budget: int = DEFAULT_HORIZON_BUDGET,
):
    """P(S_horizon > threshold) (or >= with strict=False), exactly from the DP."""
    law = law_at(horizon, schedule, arithmetic, horizon_budget)
    if arithmetic == FLOAT:
        defect = law.mass_defect()
        if defect > _FLOAT_DEFECT_TOL:
            raise ArithmeticError(
                f"transient mass drifted by {defect:.3e}; horizon too deep "
                "for float mode"
            )
        # defect-sized noise can push a tail sum just past the endpoints
        return min(1.0, max(0.0, law.prob_greater(threshold, strict=strict)))
    return law.prob_greater(threshold, strict=strict)


def law_csv_rows(
    horizon: int,
    schedule,
    arithmetic: str = FLOAT,
    boundaries_only: bool = False,
    horizon_budget: int = DEFAULT_HORIZON_BUDGET,
):
    """(n, s, mass) rows for every step law, or only at phase boundaries."""
    laws = transient_law(horizon, schedule, arithmetic, horizon_budget)
    boundaries = None
    if boundaries_only:
        boundaries = set()
        i = 1
        while True:
            n_i = schedule.N(i)
            if n_i > horizon:
                break
            boundaries.add(n_i)
            if schedule.n_phases is not None and i == schedule.n_phases:
                break
            i += 1

    def rows():
        yield ("n", "s", "mass")
        for law in laws:
            if boundaries is not None and law.n not in boundaries:
                continue
            for s, p in enumerate(law.mass):
                p = float(p)
                if p != 0.0:
                    yield (law.n, s, p)

    return rows()
