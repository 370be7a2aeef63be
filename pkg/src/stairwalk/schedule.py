"""Phase schedule construction and feasibility checking.

A schedule partitions time into phases [N_{i-1}, N_i) on which the
adaptation value a_n is constant, together with the height thresholds T_i
that the per-phase success events compare against:

    phase 1:   length N_1 = M0,     a = 8,          event  S_{N_1} >  T_1
    phase i>1: length M-2+2(i-2),   a = a_i,        event  S_{N_i} >= T_i

In paper-literal mode everything is generated from two integers M and M0
plus the closed form a_i = 8(2i^2+1-2i)/(2i-1+mu) - offset; user-designed
mode takes explicit per-phase (length, a, threshold) triples.

`find_M` sizes M so the concentration gain delta*m - 2*sqrt(K m ln m)
clears the overshoot for every m >= M-2; `find_M0` sizes phase 1 so a
Binomial(m, 1/5) walk exceeds M with probability > 1 - sigma for every
m >= M0.  `check_schedule_feasibility` mechanizes the induction conditions
(positive drift, sufficient gain, nonnegative worst-case height margin)
phase by phase, so broken schedules are reported instead of silently
simulated.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from .core import (
    PAPER_LITERAL,
    USER_DESIGNED,
    ConstantsProfile,
    Number,
    _decode_number,
    _encode_number,
    paper_profile,
    scaled_profile,
)

EXACT_BINOMIAL = "exact-binomial"
HOEFFDING_CONSERVATIVE = "hoeffding-conservative"

# exact binomial evaluation is cheap up to roughly this M; beyond it the
# provably monotone conservative bound is the default
_EXACT_M0_LIMIT = 10_000

_SCAN_CHUNK = 1 << 20


def concentration_gain(m, delta: float, K: int):
    """g(m) = delta*m - 2*sqrt(K*m*ln(m)); accepts scalars or numpy arrays."""
    m = np.asarray(m, dtype=np.float64)
    out = delta * m - 2.0 * np.sqrt(K * m * np.log(m))
    return float(out) if out.ndim == 0 else out


def _gain_slope_ok(m: float, delta: float, K: int) -> bool:
    # derivative of 2*sqrt(K m ln m) is sqrt(K)(ln m + 1)/sqrt(m ln m),
    # which is decreasing for m >= 2; once it drops below delta the gain
    # is nondecreasing from there on
    return math.sqrt(K) * (math.log(m) + 1.0) / math.sqrt(m * math.log(m)) <= delta


def find_M(profile: ConstantsProfile) -> int:
    """Least M with concentration_gain(m) >= overshoot for all m >= M - 2."""
    delta = float(profile.drift_floor)
    K = profile.hoeffding_K
    h = float(profile.overshoot)

    # find a point beyond which g is >= h and provably nondecreasing
    hi = 4
    while not (_gain_slope_ok(hi, delta, K) and concentration_gain(hi, delta, K) >= h):
        hi *= 2

    # largest violator below it, scanned exhaustively
    m_star = 0
    lo = 1
    while lo < hi:
        up = min(hi, lo + _SCAN_CHUNK)
        m = np.arange(lo, up, dtype=np.float64)
        bad = np.nonzero(concentration_gain(m, delta, K) < h)[0]
        if len(bad):
            m_star = lo + int(bad[-1])
        lo = up
    return m_star + 3 if m_star else 1


def find_M0(
    sigma: Number,
    M: int,
    profile: ConstantsProfile | None = None,
    method: str = "auto",
) -> int:
    """Least m0 such that P(Binomial(m, 1/5) > M) > 1 - sigma for all m >= m0.

    ``exact-binomial`` evaluates the survival function and scans with a
    monotonicity guard (the survival probability is nondecreasing in m, so
    the guard is defensive).  ``hoeffding-conservative`` returns the least
    m with m/5 > M and exp(-2(m/5 - M)^2 / m) <= sigma; the bound dominates
    P(Bin <= M) and is decreasing in m, so the for-all quantifier holds.
    """
    if M < 0:
        raise ValueError("M must be >= 0")
    p = float(profile.phase1_up_floor) if profile is not None else 0.2
    sig = float(sigma)
    if not 0 <= sig < 1:
        raise ValueError(f"sigma must be in [0, 1), got {sigma}")
    if method == "auto":
        method = EXACT_BINOMIAL if M <= _EXACT_M0_LIMIT else HOEFFDING_CONSERVATIVE

    if method == EXACT_BINOMIAL:
        if sig == 0:
            raise ValueError(
                "sigma = 0 is unsatisfiable for exact-binomial "
                "(the tail is never certain); use sigma > 0"
            )
        guard = 64
        m_lo = 1
        upper = max(int((M + 1) / p * 1.5) + 200, 64)
        while True:
            m = np.arange(m_lo, m_lo + upper)
            ok = stats.binom.sf(M, m, p) > 1.0 - sig
            bad = np.nonzero(~ok)[0]
            if len(bad) == 0 and m_lo > 1:
                # every value in this guard window is fine
                return candidate
            if len(bad) == 0:
                return 1
            last_bad = m_lo + int(bad[-1])
            candidate = last_bad + 1
            if candidate + guard <= m_lo + len(m):
                return candidate
            m_lo = candidate
            upper = guard

    if method == HOEFFDING_CONSERVATIVE:
        if sig == 0:
            raise ValueError(
                "sigma = 0 is unsatisfiable (the tail is never certain); "
                "use sigma > 0"
            )
        log_sig = math.log(sig)
        m = int(math.floor(M / p)) + 1
        # closed-form start: 2(m*p - M)^2 / m = ln(1/sigma), then scan up
        L = -log_sig
        b = 2 * M / p + L / (2 * p * p)
        disc = b * b - 4 * (M / p) ** 2
        root = (b + math.sqrt(max(disc, 0.0))) / 2.0
        m = max(m, int(root) - 4, 1)
        while True:
            t = m * p - M
            if t > 0 and -2.0 * t * t / m <= log_sig:
                return m
            m += 1

    raise ValueError(f"unknown method {method!r}")


# ======================================================================
# Phase schedules
# ======================================================================


@dataclass
class PhaseSchedule:
    """Per-phase lengths, adaptation values, and success thresholds.

    Paper-literal schedules are rule-generated from (M, M0, profile) and are
    unbounded; user-designed ones carry explicit per-phase arrays.  Phase
    indices are 1-based.  The threshold of phase 1 is compared strictly
    (S > T_1); later ones non-strictly (S >= T_i).
    """

    mode: str
    profile: ConstantsProfile
    sigma: Number | None = None
    sigma_phase1: Number | None = None
    M: int | None = None
    M0: int | None = None
    lengths: Sequence[int] | None = None
    a_values: Sequence[float] | None = None
    thresholds: Sequence[float] | None = None

    def __post_init__(self):
        if self.mode == PAPER_LITERAL:
            if self.M is None or self.M0 is None:
                raise ValueError("paper-literal schedule needs M and M0")
            if self.M < 3:
                raise ValueError("M must be >= 3 so phase lengths are positive")
        elif self.mode == USER_DESIGNED:
            if not (self.lengths and self.a_values and self.thresholds):
                raise ValueError(
                    "user-designed schedule needs lengths, a_values, thresholds"
                )
            if not len(self.lengths) == len(self.a_values) == len(self.thresholds):
                raise ValueError("per-phase arrays must have equal length")
            if any(l < 1 for l in self.lengths):
                raise ValueError("phase lengths must be >= 1")
            if self.a_values[0] != 8:
                raise ValueError("phase 1 must run at a = 8")
            if any(a < 8 for a in self.a_values):
                raise ValueError("adaptation values must be >= 8")
            rest = self.a_values[1:]
            if any(rest[k + 1] < rest[k] for k in range(len(rest) - 1)):
                raise ValueError("a_i must be nondecreasing from phase 2 on")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        self._N_cache = [0]

    # -- per-phase rules ------------------------------------------------

    @property
    def n_phases(self) -> int | None:
        """Number of defined phases; None when rule-generated (unbounded)."""
        return None if self.mode == PAPER_LITERAL else len(self.lengths)

    def _check_phase(self, i: int):
        if i < 1:
            raise ValueError(f"phase index must be >= 1, got {i}")
        if self.n_phases is not None and i > self.n_phases:
            raise ValueError(f"schedule defines {self.n_phases} phases, got {i}")

    def length(self, i: int) -> int:
        self._check_phase(i)
        if self.mode == USER_DESIGNED:
            return int(self.lengths[i - 1])
        return self.M0 if i == 1 else self.M - 2 + 2 * (i - 2)

    def a_of_phase(self, i: int) -> Number:
        """Adaptation value of phase i, in the profile's arithmetic."""
        self._check_phase(i)
        if self.mode == USER_DESIGNED:
            return self.a_values[i - 1]
        if i == 1:
            return self.profile.phase1_a
        mu, off = self.profile.drift_target, self.profile.a_offset
        return 8 * (2 * i * i + 1 - 2 * i) / (2 * i - 1 + mu) - off

    def threshold(self, i: int) -> Number:
        self._check_phase(i)
        if self.mode == USER_DESIGNED:
            return self.thresholds[i - 1]
        return self.M + self.profile.overshoot * (i - 1)

    def strict_threshold(self, i: int) -> bool:
        """Phase 1's success event is strict (S > T_1); later ones are not."""
        return i == 1

    def required_gain(self, i: int) -> Number:
        """T_i - T_{i-1}, the height the walk must gain during phase i >= 2."""
        if i < 2:
            raise ValueError("required_gain is defined for phases >= 2")
        return self.threshold(i) - self.threshold(i - 1)

    # -- absolute step indexing ------------------------------------------

    def N(self, i: int) -> int:
        """End of phase i as an absolute step count (N_0 = 0)."""
        if i == 0:
            return 0
        self._check_phase(i)
        cache = self._N_cache
        while len(cache) <= i:
            cache.append(cache[-1] + self.length(len(cache)))
        return cache[i]

    def phase_of_step(self, n: int) -> int:
        if n < 0:
            raise ValueError("step index must be >= 0")
        cache = self._N_cache
        i = 1
        while True:
            if self.n_phases is not None and i > self.n_phases:
                raise ValueError(f"step {n} lies beyond the last defined phase")
            if n < self.N(i):
                return i
            i += 1

    def a_of_step(self, n: int) -> Number:
        return self.a_of_phase(self.phase_of_step(n))

    # -- serialization ----------------------------------------------------

    def to_jsonable(self) -> dict:
        doc = {
            "mode": self.mode,
            "sigma": _encode_number(self.sigma),
            "sigma_phase1": _encode_number(self.sigma_phase1),
            "profile": json.loads(self.profile.to_json()),
        }
        if self.mode == PAPER_LITERAL:
            doc["M"] = self.M
            doc["M0"] = self.M0
        else:
            doc["phases"] = [
                {
                    "i": k + 1,
                    "length": int(self.lengths[k]),
                    "a": _encode_number(self.a_values[k]),
                    "threshold": _encode_number(self.thresholds[k]),
                }
                for k in range(len(self.lengths))
            ]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PhaseSchedule":
        doc = json.loads(text)
        profile = ConstantsProfile.from_json(json.dumps(doc["profile"]))
        common = dict(
            profile=profile,
            sigma=_decode_number(doc.get("sigma")),
            sigma_phase1=_decode_number(doc.get("sigma_phase1")),
        )
        if doc["mode"] == PAPER_LITERAL:
            return cls(mode=PAPER_LITERAL, M=doc["M"], M0=doc["M0"], **common)
        phases = sorted(doc["phases"], key=lambda row: row["i"])
        return cls(
            mode=USER_DESIGNED,
            lengths=[row["length"] for row in phases],
            a_values=[_decode_number(row["a"]) for row in phases],
            thresholds=[_decode_number(row["threshold"]) for row in phases],
            **common,
        )

    def schedule_hash(self) -> str:
        canonical = json.dumps(self.to_jsonable(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def build_paper_schedule(
    sigma: Number,
    profile: ConstantsProfile | None = None,
    sigma_phase1: Number | None = None,
    m0_method: str = "auto",
) -> PhaseSchedule:
    """Assemble the rule-generated schedule for a given failure budget sigma.

    The phase-1 sizing uses sigma_phase1 (default sigma/2, so the product
    bound starts from the factor 1 - sigma/2); pass sigma_phase1=sigma to
    size phase 1 against the full budget instead.
    """
    if not 0 < float(sigma) < 1:
        raise ValueError("sigma must be in (0, 1)")
    profile = profile if profile is not None else paper_profile()
    if profile.schedule_mode != PAPER_LITERAL:
        raise ValueError("profile.schedule_mode must be paper-literal")
    if sigma_phase1 is None:
        sigma_phase1 = sigma / 2
    M = find_M(profile)
    M0 = find_M0(sigma_phase1, M, profile, method=m0_method)
    return PhaseSchedule(
        mode=PAPER_LITERAL,
        profile=profile,
        sigma=sigma,
        sigma_phase1=sigma_phase1,
        M=M,
        M0=M0,
    )


def user_schedule(
    profile: ConstantsProfile,
    lengths: Sequence[int],
    a_values: Sequence[float],
    thresholds: Sequence[float],
    sigma: Number | None = None,
    sigma_phase1: Number | None = None,
) -> PhaseSchedule:
    """Wrap explicit per-phase (length, a, threshold) arrays in a schedule."""
    return PhaseSchedule(
        mode=USER_DESIGNED,
        profile=profile.with_mode(USER_DESIGNED),
        sigma=sigma,
        sigma_phase1=sigma_phase1,
        lengths=list(lengths),
        a_values=list(a_values),
        thresholds=list(thresholds),
    )


def log_growth_schedule(
    i_max: int,
    profile: ConstantsProfile | None = None,
    length_scale: float = 1.0,
    t1: float | None = None,
    sigma: Number | None = None,
) -> PhaseSchedule:
    """A slow-adaptation template: a_i = max(8, 4 ln(i+2)), L_i ~ i^3,
    per-phase threshold gains set to the available concentration gain G_i.

    With t1=None the phase-1 threshold is auto-sized to the largest height
    deficit over the first i_max phases, which makes every height margin
    nonnegative; the feasibility checker then passes the whole range by
    construction of the gains and by the positivity of the drifts.
    """
    from .domination import dominated_drift  # deferred: layering

    if i_max < 2:
        raise ValueError("i_max must be >= 2")
    profile = profile if profile is not None else scaled_profile(slack=1e-4)
    eps = float(profile.slack)
    K = profile.hoeffding_K

    # integer threshold gains floor(G_i): the feasibility check G_i >= gain
    # then holds exactly, with no float-accumulation hair
    a_vals, lengths, gains = [], [], []
    for i in range(2, i_max + 1):
        a = max(8.0, 4.0 * math.log(i + 2.0))
        L = max(1, int(round(length_scale * i**3)))
        g = concentration_gain(L, dominated_drift(i, a, eps), K)
        a_vals.append(a)
        lengths.append(L)
        gains.append(math.floor(g))

    if t1 is None:
        cum, deficit = 0, 0
        for k, i in enumerate(range(2, i_max + 1)):
            deficit = max(deficit, lengths[k] + (2 * i - 2) - cum)
            cum += gains[k]
        t1 = deficit + 1
    thresholds = [t1]
    for g in gains:
        thresholds.append(thresholds[-1] + g)

    if sigma is not None:
        n1 = find_M0(float(sigma) / 2, int(math.floor(t1)), profile,
                     method=HOEFFDING_CONSERVATIVE)
    else:
        n1 = 5 * int(math.ceil(t1))
    return user_schedule(
        profile=profile,
        lengths=[n1] + lengths,
        a_values=[8.0] + a_vals,
        thresholds=thresholds,
        sigma=sigma,
        sigma_phase1=None if sigma is None else float(sigma) / 2,
    )


def steady_drift_schedule(
    n_phases: int,
    profile: ConstantsProfile | None = None,
    length: int = 1000,
    a_start: float = 8.0,
    a_step: float = 0.5,
    t1: int | None = None,
    sigma: Number | None = None,
) -> PhaseSchedule:
    """Constant-length phases with slowly growing adaptation values.

    Phases 2..n_phases all have the given length; a_i = a_start +
    a_step*(i-2); threshold gains are floor(G_i) so the feasibility check
    passes by construction whenever the drifts are positive.  Designed for
    desk-scale conditional-success experiments: with the defaults every
    per-phase bound sits at 1 - 1/length^2.
    """
    from .domination import dominated_drift  # deferred: layering

    if n_phases < 2:
        raise ValueError("n_phases must be >= 2")
    if a_start < 8:
        raise ValueError("a_start must be >= 8")
    profile = profile if profile is not None else scaled_profile()
    eps = float(profile.slack)
    K = profile.hoeffding_K

    if t1 is None:
        t1 = length + 20
    a_vals, gains = [], []
    for i in range(2, n_phases + 1):
        a = a_start + a_step * (i - 2)
        g = concentration_gain(length, dominated_drift(i, a, eps), K)
        a_vals.append(a)
        gains.append(math.floor(g))
    thresholds = [t1]
    for g in gains:
        thresholds.append(thresholds[-1] + g)

    if sigma is not None:
        n1 = find_M0(float(sigma) / 2, int(math.floor(t1)), profile)
    else:
        n1 = 5 * int(math.ceil(t1))
    return user_schedule(
        profile=profile,
        lengths=[n1] + [length] * (n_phases - 1),
        a_values=[8.0] + a_vals,
        thresholds=thresholds,
        sigma=sigma,
        sigma_phase1=None if sigma is None else float(sigma) / 2,
    )


# ======================================================================
# Feasibility
# ======================================================================


@dataclass
class PhaseFeasibility:
    i: int
    drift: float
    gain: float
    required_gain: float
    height_margin: float
    ok: bool
    reason: str | None = None

    def to_jsonable(self) -> dict:
        return self.__dict__.copy()


@dataclass
class FeasibilityReport:
    i_max: int
    phases: list[PhaseFeasibility]
    first_violation: tuple[int, str] | None

    @property
    def ok(self) -> bool:
        return self.first_violation is None

    def phase(self, i: int) -> PhaseFeasibility:
        return self.phases[i - 2]

    def to_jsonable(self) -> dict:
        return {
            "i_max": self.i_max,
            "ok": self.ok,
            "first_violation": (
                None
                if self.first_violation is None
                else {"i": self.first_violation[0], "reason": self.first_violation[1]}
            ),
            "phases": [p.to_jsonable() for p in self.phases],
        }

    def csv_rows(self):
        yield ("i", "drift", "gain", "required_gain", "height_margin", "ok", "reason")
        for p in self.phases:
            yield (p.i, p.drift, p.gain, p.required_gain, p.height_margin,
                   p.ok, p.reason or "")


def check_schedule_feasibility(schedule: PhaseSchedule, i_max: int) -> FeasibilityReport:
    """Evaluate the induction conditions for phases 2..i_max.

    Phase i passes iff (a) the dominated-step drift delta_i = E(Z_i) is
    positive, (b) the concentration gain G_i = delta_i L_i - 2 sqrt(K L_i
    ln L_i) covers the required threshold gain T_i - T_{i-1}, and (c) the
    worst-case height margin T_{i-1} - L_i - (2i - 2) is nonnegative, so a
    full phase of -1 steps cannot drop the walk below height i.
    Infeasibility is reported, not raised.
    """
    from .domination import mean_z  # deferred: domination builds on schedules

    if i_max < 2:
        raise ValueError("i_max must be >= 2")
    K = schedule.profile.hoeffding_K
    phases = []
    first = None
    for i in range(2, i_max + 1):
        L = schedule.length(i)
        drift = float(mean_z(i, schedule))
        gain = concentration_gain(L, drift, K)
        required = float(schedule.required_gain(i))
        height = float(schedule.threshold(i - 1)) - L - (2 * i - 2)
        reason = None
        if drift <= 0:
            reason = "drift <= 0"
        elif gain < required:
            reason = "gain below required threshold step"
        elif height < 0:
            reason = "worst-case height margin negative"
        ok = reason is None
        if not ok and first is None:
            first = (i, reason)
        phases.append(
            PhaseFeasibility(
                i=i, drift=drift, gain=float(gain), required_gain=required,
                height_margin=height, ok=ok, reason=reason,
            )
        )
    return FeasibilityReport(i_max=i_max, phases=phases, first_violation=first)
