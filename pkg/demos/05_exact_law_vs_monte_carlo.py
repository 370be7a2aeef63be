"""Walkthrough: exact transient laws vs. seeded Monte Carlo.

The flattened walk's distribution at any finite horizon is computable by
forward dynamic programming, which makes a strict ground truth for the
simulator: empirical frequencies must cover the exact values at the stated
confidence.  Everything is run on the scaled profile (M = 146, N_1 = 771)
so a full experiment takes seconds.

Run:  python demos/05_exact_law_vs_monte_carlo.py
"""

import numpy as np

from stairwalk import (
    build_paper_schedule,
    event_probability,
    final_positions,
    law_at,
    replication_seed,
    run_experiment,
    run_replication,
    scaled_profile,
    wilson_interval,
)

SEED = 7

sched = build_paper_schedule(0.5, scaled_profile())
n1, t1 = sched.N(1), sched.threshold(1)
print(f"scaled schedule: M = {sched.M}, N_1 = {n1}, phase-1 threshold T_1 = {t1}")

print()
print("=" * 72)
print("Exact law of S_n at the end of phase 1")
print("=" * 72)
law = law_at(n1, sched)
print(f"  mass defect after {n1} unnormalized steps: {law.mass_defect():.2e}")
print(f"  P(S_N1 > T_1) = {event_probability(n1, sched, t1):.15f}")
print(f"  (phase-1 sizing demands > 1 - sigma/2 = 0.75)")
cdf = law.cdf()
median = int(np.searchsorted(cdf, 0.5))
print(f"  median of S_N1: {median}; P(S > median) = {law.prob_greater(median):.6f}")

print()
print("=" * 72)
print("Monte Carlo vs the exact law (20k replications)")
print("=" * 72)
reps = 20_000
fin = final_positions(sched, n1, reps, SEED)
for threshold in (t1, median):
    successes = int((fin > threshold).sum())
    lo, hi = wilson_interval(successes, reps)
    exact = float(event_probability(n1, sched, threshold))
    covered = lo <= exact <= hi
    print(f"  P(S > {threshold:g}): exact {exact:.6f}, "
          f"Wilson 99% [{lo:.6f}, {hi:.6f}], covered = {covered}")

print()
print("=" * 72)
print("Replication determinism")
print("=" * 72)
seed5 = replication_seed(SEED, 5)
traj = run_replication(sched, 1, seed5)
print(f"  replication 5 checkpoints: {traj.checkpoints}, outcome {traj.phase_outcomes}")
print(f"  identical on re-run: {run_replication(sched, 1, seed5) == traj}")
print(f"  matches the batch engine: {traj.final_s == int(fin[5])}")

print()
result = run_experiment(sched, 1, reps, SEED)
stats = result.phase(1)
print(f"experiment summary: attempts = {stats.attempts}, "
      f"successes = {stats.successes}, "
      f"P(phase 1) = {stats.frequency:.4f}")
print(f"generator: {result.metadata['generator']}")
