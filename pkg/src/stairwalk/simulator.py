"""Seeded Monte Carlo engine for the flattened walk.

Reproducibility contract: replication r of an experiment draws its uniforms
from its own counter-based stream, a Philox4x64 generator keyed by
(replication index, base seed).  Each stream is a pure function of
(base_seed, r) with 128-bit key and 128-bit counter state, so results are
independent of batching, execution order, and thread count; replications
are partitioned into fixed-size chunks and aggregated by exact integer
sums, which commute.

The walk itself is advanced vectorized across a chunk of replications: at
every step each live replication maps one uniform through the inverse CDF
of its current three-point step law (atom order -1 < 0 < 1, matching the
monotone coupling construction).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .bounds import phase_success_bound, true_mean_phase_bound
from .core import PAPER_LITERAL
from .domination import z_distribution
from .kernel import flat_step_probs_at, step_prob_tables

GENERATOR_ID = "philox4x64(key=[replication, base_seed])"

_MASK64 = (1 << 64) - 1
_CHUNK = 4096          # replication chunk: determinism & memory unit
_BLOCK = 1024          # uniform columns buffered per refill


def replication_seed(base_seed: int, r: int) -> int:
    """Compose the 128-bit stream seed of replication r."""
    if not 0 <= base_seed <= _MASK64:
        raise ValueError("base_seed must fit in 64 bits")
    if not 0 <= r <= _MASK64:
        raise ValueError("replication index must fit in 64 bits")
    return (base_seed << 64) | r


def _generator(seed128: int) -> np.random.Generator:
    key = np.array([seed128 & _MASK64, (seed128 >> 64) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _UniformFeed:
    """Column-at-a-time access to per-replication uniform streams.

    Column j always holds draw #j of every stream, regardless of block
    size, so step n of a replication consumes the same uniform no matter
    how the batch is arranged.
    """

    def __init__(self, seeds: Sequence[int], block: int = _BLOCK):
        self._gens = [_generator(s) for s in seeds]
        self._block = block
        self._buf = np.empty((len(self._gens), 0))
        self._col = 0

    def next_column(self) -> np.ndarray:
        if self._col >= self._buf.shape[1]:
            self._buf = np.empty((len(self._gens), self._block))
            for k, g in enumerate(self._gens):
                self._buf[k] = g.random(self._block)
            self._col = 0
        u = self._buf[:, self._col]
        self._col += 1
        return u


class PlanPhase(NamedTuple):
    i: int
    length: int
    a: float
    threshold: float
    strict: bool


def _phase_plan(schedule, max_phase: int) -> list[PlanPhase]:
    if max_phase < 1:
        raise ValueError("max_phase must be >= 1")
    return [
        PlanPhase(
            i=i,
            length=schedule.length(i),
            a=float(schedule.a_of_phase(i)),
            threshold=float(schedule.threshold(i)),
            strict=schedule.strict_threshold(i),
        )
        for i in range(1, max_phase + 1)
    ]


def _simulate_chunk(
    seeds: Sequence[int],
    plan: Sequence[PlanPhase],
    early_stop: bool = True,
    record_checkpoints: bool = False,
    track_phase_min: bool = False,
    z_laws: dict[int, tuple[float, float]] | None = None,
):
    """Run one chunk of replications through the phase plan.

    Returns raw per-chunk aggregates; see run_experiment for their meaning.
    """
    B = len(seeds)
    feed = _UniformFeed(seeds)
    s_max = sum(p.length for p in plan)
    tables: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for p in plan:
        if p.a not in tables:
            tables[p.a] = step_prob_tables(s_max, p.a)

    s = np.zeros(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    attempts, successes = [], []
    outcomes = np.zeros((len(plan), B), dtype=bool)
    checkpoints = [] if record_checkpoints else None
    phase_mins = [] if track_phase_min else None
    z_sums = {} if z_laws else None

    for k, phase in enumerate(plan):
        p_down_tab, p_up_tab = tables[phase.a]
        move = alive.astype(np.int64) if early_stop else np.ones(B, dtype=np.int64)
        z_cb = z_laws.get(phase.i) if z_laws else None
        if z_cb is not None:
            z_sum = np.zeros(B, dtype=np.int64)
        if track_phase_min:
            p_min = s.copy()

        for _ in range(phase.length):
            u = feed.next_column()
            if track_phase_min:
                np.minimum(p_min, s, out=p_min)
            p_down = p_down_tab[s]
            p_up = p_up_tab[s]
            ds = (u >= 1.0 - p_up).astype(np.int64) - (u < p_down).astype(np.int64)
            s += ds * move
            if z_cb is not None:
                c, b = z_cb
                z_sum += (u >= 1.0 - b).astype(np.int64) - (u < c).astype(np.int64)

        ok = s > phase.threshold if phase.strict else s >= phase.threshold
        attempts.append(int(alive.sum()))
        successes.append(int((alive & ok).sum()))
        outcomes[k] = ok
        alive &= ok
        if record_checkpoints:
            checkpoints.append(s.copy())
        if track_phase_min:
            phase_mins.append(p_min)
        if z_cb is not None:
            z_sums[phase.i] = z_sum

    return {
        "final_s": s,
        "attempts": attempts,
        "successes": successes,
        "outcomes": outcomes,
        "checkpoints": checkpoints,
        "phase_mins": phase_mins,
        "z_sums": z_sums,
    }


def _chunk_ranges(replications: int):
    return [(lo, min(lo + _CHUNK, replications)) for lo in range(0, replications, _CHUNK)]


def _run_chunks(fn: Callable, replications: int, threads: int | None):
    """Run fn(lo, hi) over fixed chunk ranges; ordered results."""
    ranges = _chunk_ranges(replications)
    workers = threads if threads is not None else (os.cpu_count() or 1)
    workers = max(1, min(int(workers), len(ranges)))
    if workers == 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda rng: fn(*rng), ranges))


# ======================================================================
# Single trajectories
# ======================================================================


@dataclass
class Trajectory:
    """Outcome record of a single replication."""

    seed: int
    checkpoints: list[tuple[int, int]]   # (step index N_i, S_{N_i})
    phase_outcomes: list[bool]
    final_s: int

    @property
    def deepest_phase(self) -> int:
        depth = 0
        for ok in self.phase_outcomes:
            if not ok:
                break
            depth += 1
        return depth


def run_replication(
    schedule, max_phase: int, seed: int, early_stop: bool = True
) -> Trajectory:
    """Simulate one replication through phase max_phase, deterministic in seed.

    `seed` is the composed 128-bit value from :func:`replication_seed`.
    With early_stop (the default) the walk freezes at the end of the first
    failed phase; later checkpoints then record the frozen position.
    """
    plan = _phase_plan(schedule, max_phase)
    out = _simulate_chunk(
        [seed], plan, early_stop=early_stop, record_checkpoints=True
    )
    n_groups = [schedule.N(i) for i in range(1, max_phase + 1)]
    return Trajectory(
        seed=seed,
        checkpoints=[(n, int(cp[0])) for n, cp in zip(n_groups, out["checkpoints"])],
        phase_outcomes=[bool(v) for v in out["outcomes"][:, 0]],
        final_s=int(out["final_s"][0]),
    )


# ======================================================================
# Replicated experiments
# ======================================================================


def wilson_interval(
    successes: int, n: int, confidence: float = 0.99
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 0 or not 0 <= successes <= max(n, 0):
        raise ValueError("need 0 <= successes <= n")
    if n == 0:
        return (0.0, 1.0)
    z = float(_scipy_stats.norm.ppf(0.5 + confidence / 2.0))
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return (max(0.0, float(center - half)), min(1.0, float(center + half)))


@dataclass
class PhaseStats:
    i: int
    attempts: int
    successes: int
    frequency: float | None
    wilson_lo: float | None
    wilson_hi: float | None
    bound_paper: float | None       # 1 - 2/L^2K (rule-generated schedules)
    bound_true_mean: float | None   # centered at E(Z_i)

    def to_jsonable(self) -> dict:
        return self.__dict__.copy()


@dataclass
class ExperimentResult:
    schedule_hash: str
    max_phase: int
    replications: int
    base_seed: int
    early_stop: bool
    per_phase: list[PhaseStats]
    product_estimate: float
    product_wilson: tuple[float, float]
    survivors: int
    metadata: dict = field(default_factory=dict)

    def phase(self, i: int) -> PhaseStats:
        return self.per_phase[i - 1]

    def to_jsonable(self) -> dict:
        return {
            "schedule_hash": self.schedule_hash,
            "max_phase": self.max_phase,
            "replications": self.replications,
            "base_seed": self.base_seed,
            "early_stop": self.early_stop,
            "survivors": self.survivors,
            "product_estimate": self.product_estimate,
            "product_wilson": list(self.product_wilson),
            "per_phase": [p.to_jsonable() for p in self.per_phase],
            "metadata": self.metadata,
        }


def run_experiment(
    schedule,
    max_phase: int,
    replications: int,
    base_seed: int,
    early_stop: bool = True,
    threads: int | None = None,
    confidence: float = 0.99,
) -> ExperimentResult:
    """Estimate the conditional phase success chain over many replications.

    Replication r is driven by the stream keyed (r, base_seed); attempts of
    phase i count replications whose phases 1..i-1 all succeeded, so the
    per-phase frequency estimates P(phase i succeeds | earlier successes)
    and the product estimate is the survivor fraction of the whole chain.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    plan = _phase_plan(schedule, max_phase)

    def job(lo, hi):
        seeds = [replication_seed(base_seed, r) for r in range(lo, hi)]
        out = _simulate_chunk(seeds, plan, early_stop=early_stop)
        return out["attempts"], out["successes"]

    results = _run_chunks(job, replications, threads)
    attempts = [0] * max_phase
    successes = [0] * max_phase
    for att, suc in results:
        for k in range(max_phase):
            attempts[k] += att[k]
            successes[k] += suc[k]

    per_phase = []
    for k in range(max_phase):
        i = k + 1
        att, suc = attempts[k], successes[k]
        freq = suc / att if att else None
        wilson = wilson_interval(suc, att, confidence) if att else (None, None)
        bound_paper = None
        if i >= 2 and schedule.mode == PAPER_LITERAL:
            bound_paper = phase_success_bound(i, schedule)
        bound_true = true_mean_phase_bound(i, schedule) if i >= 2 else None
        per_phase.append(
            PhaseStats(
                i=i, attempts=att, successes=suc, frequency=freq,
                wilson_lo=wilson[0], wilson_hi=wilson[1],
                bound_paper=bound_paper, bound_true_mean=bound_true,
            )
        )

    survivors = successes[max_phase - 1]
    return ExperimentResult(
        schedule_hash=schedule.schedule_hash(),
        max_phase=max_phase,
        replications=replications,
        base_seed=base_seed,
        early_stop=early_stop,
        per_phase=per_phase,
        product_estimate=survivors / replications,
        product_wilson=wilson_interval(survivors, replications, confidence),
        survivors=survivors,
        metadata={
            "generator": GENERATOR_ID,
            "base_seed": base_seed,
            "chunk": _CHUNK,
            "confidence": confidence,
        },
    )


def trajectory_csv_rows(schedule, max_phase: int, base_seed: int, count: int):
    """(replication, n, s) checkpoint rows for the first `count` replications."""
    yield ("replication", "n", "s")
    for r in range(count):
        traj = run_replication(schedule, max_phase, replication_seed(base_seed, r))
        for n, s in traj.checkpoints:
            yield (r, n, s)


def final_positions(
    schedule, horizon: int, replications: int, base_seed: int,
    threads: int | None = None,
) -> np.ndarray:
    """S_horizon for each replication (no phase events evaluated)."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    segments = []
    covered, i = 0, 1
    while covered < horizon:
        take = min(schedule.length(i), horizon - covered)
        segments.append(
            PlanPhase(i=i, length=take, a=float(schedule.a_of_phase(i)),
                      threshold=-1.0, strict=False)
        )
        covered += take
        i += 1

    def job(lo, hi):
        seeds = [replication_seed(base_seed, r) for r in range(lo, hi)]
        out = _simulate_chunk(seeds, segments, early_stop=False)
        return out["final_s"]

    parts = _run_chunks(job, replications, threads)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


# ======================================================================
# Control experiments
# ======================================================================


@dataclass
class ControlSummary:
    mode: str
    horizon: int
    replications: int
    base_seed: int
    drift: float
    final_quantiles: dict[str, float]
    nondecreasing_fraction: float | None = None
    a: float | None = None
    growth_rule: str | None = None
    occupancy_mode: int | None = None
    low_state_fraction: float | None = None
    tail_histogram: list[int] | None = None

    def to_jsonable(self) -> dict:
        return self.__dict__.copy()


_QUANTILES = (0.01, 0.25, 0.5, 0.75, 0.99)


def run_control(
    mode: str,
    horizon: int,
    replications: int,
    base_seed: int,
    a: float = 8.0,
    growth: Callable[[int], float] | None = None,
    growth_label: str = "n^2+8",
    tail_fraction: float = 0.5,
    low_threshold: int = 4,
    threads: int | None = None,
) -> ControlSummary:
    """Qualitative control runs for the two limiting regimes.

    mode="constant": fixed adaptation value a (>= 8); reports empirical
    drift and final-position quantiles, plus the fraction of trajectories
    that never stepped down (1.0 is expected at a = 8).

    mode="fast-growth": a_n from `growth` (default n^2 + 8, growing so fast
    the walk behaves like the draw-from-target sampler); reports the tail
    occupancy histogram of s, its mode, and the fraction of tail time spent
    at s <= low_threshold.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if mode == "constant":
        if a < 8:
            raise ValueError("constant mode needs a >= 8")

        def job(lo, hi):
            seeds = [replication_seed(base_seed, r) for r in range(lo, hi)]
            feed = _UniformFeed(seeds)
            p_down_tab, p_up_tab = step_prob_tables(horizon, a)
            s = np.zeros(hi - lo, dtype=np.int64)
            decreased = np.zeros(hi - lo, dtype=bool)
            for _ in range(horizon):
                u = feed.next_column()
                ds = (u >= 1.0 - p_up_tab[s]).astype(np.int64) - (
                    u < p_down_tab[s]
                ).astype(np.int64)
                decreased |= ds < 0
                s += ds
            return s, decreased

        parts = _run_chunks(job, replications, threads)
        final = np.concatenate([p[0] for p in parts])
        decreased = np.concatenate([p[1] for p in parts])
        return ControlSummary(
            mode=mode,
            horizon=horizon,
            replications=replications,
            base_seed=base_seed,
            a=a,
            drift=float(final.mean()) / horizon,
            final_quantiles={
                str(q): float(np.quantile(final, q)) for q in _QUANTILES
            },
            nondecreasing_fraction=float(1.0 - decreased.mean()),
        )

    if mode == "fast-growth":
        rule = growth if growth is not None else (lambda n: float(n * n + 8))
        tail_start = int(horizon * (1.0 - tail_fraction))

        def job(lo, hi):
            seeds = [replication_seed(base_seed, r) for r in range(lo, hi)]
            feed = _UniformFeed(seeds)
            s = np.zeros(hi - lo, dtype=np.int64)
            hist = np.zeros(horizon + 2, dtype=np.int64)
            low = 0
            for n in range(horizon):
                u = feed.next_column()
                p_down, p_up = flat_step_probs_at(s, rule(n))
                ds = (u >= 1.0 - p_up).astype(np.int64) - (u < p_down).astype(
                    np.int64
                )
                s += ds
                if n >= tail_start:
                    hist += np.bincount(s, minlength=horizon + 2)
                    low += int((s <= low_threshold).sum())
            return s, hist, low

        parts = _run_chunks(job, replications, threads)
        final = np.concatenate([p[0] for p in parts])
        hist = sum(p[1] for p in parts)
        low = sum(p[2] for p in parts)
        tail_steps = int(hist.sum())
        support = int(np.nonzero(hist)[0].max()) if hist.any() else 0
        return ControlSummary(
            mode=mode,
            horizon=horizon,
            replications=replications,
            base_seed=base_seed,
            growth_rule=growth_label,
            drift=float(final.mean()) / horizon,
            final_quantiles={
                str(q): float(np.quantile(final, q)) for q in _QUANTILES
            },
            occupancy_mode=int(np.argmax(hist)),
            low_state_fraction=low / tail_steps if tail_steps else None,
            tail_histogram=[int(v) for v in hist[: support + 1]],
        )

    raise ValueError(f"unknown control mode {mode!r}")


# ======================================================================
# Pathwise coupling check
# ======================================================================


@dataclass
class CoupledCheckReport:
    max_phase: int
    replications: int
    pairs_checked: int      # (replication, phase) pairs with x >= i throughout
    violations: int         # pairs where the phase gain fell below the Z sum

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_jsonable(self) -> dict:
        return {
            "max_phase": self.max_phase,
            "replications": self.replications,
            "pairs_checked": self.pairs_checked,
            "violations": self.violations,
            "ok": self.ok,
        }


def run_coupled_check(
    schedule, max_phase: int, replications: int, base_seed: int,
    threads: int | None = None,
) -> CoupledCheckReport:
    """Drive the walk and the dominated i.i.d. variables from the same
    uniforms and verify S_{N_i} - S_{N_{i-1}} >= sum of Z draws pathwise,
    for every phase i >= 2 during which the walk stayed at height x >= i.
    """
    if max_phase < 2:
        raise ValueError("the coupling check needs max_phase >= 2")
    plan = _phase_plan(schedule, max_phase)
    z_laws = {}
    for i in range(2, max_phase + 1):
        z = z_distribution(i, schedule)
        z_laws[i] = (float(z.c), float(z.b))

    def job(lo, hi):
        seeds = [replication_seed(base_seed, r) for r in range(lo, hi)]
        out = _simulate_chunk(
            seeds, plan, early_stop=False, record_checkpoints=True,
            track_phase_min=True, z_laws=z_laws,
        )
        checked = violations = 0
        for k in range(1, max_phase):  # phases 2..max_phase
            i = k + 1
            start = out["checkpoints"][k - 1]
            end = out["checkpoints"][k]
            valid = out["phase_mins"][k] >= 2 * i - 3  # x >= i throughout
            gain = end[valid] - start[valid]
            checked += int(valid.sum())
            violations += int((gain < out["z_sums"][i][valid]).sum())
        return checked, violations

    results = _run_chunks(job, replications, threads)
    return CoupledCheckReport(
        max_phase=max_phase,
        replications=replications,
        pairs_checked=sum(r[0] for r in results),
        violations=sum(r[1] for r in results),
    )
