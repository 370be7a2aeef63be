"""Walkthrough: monotone coupling, conditional success, and the two
limiting regimes.

The divergence argument rests on a stochastic-domination sandwich: while
the walk stays at height x >= i during phase i, each of its steps
stochastically dominates an i.i.d. three-point variable Z_i with positive
mean.  Driving both from the same uniforms realizes the ordering pathwise,
and a feasible schedule turns the per-phase Hoeffding bound into observed
conditional success frequencies.

The two controls frame the whole story: freeze a = 8 and the walk can only
climb; grow a_n like n^2 and the walk hugs the bottom of the stair.

Run:  python demos/06_coupling_and_controls.py
"""

import numpy as np

from stairwalk import (
    ZDistribution,
    coupled_sample_many,
    flat_step_distribution,
    run_control,
    run_coupled_check,
    run_experiment,
    steady_drift_schedule,
    true_mean_phase_bound,
    z_distribution,
)

SEED = 31

sched = steady_drift_schedule(10, sigma=0.01)
print(f"steady-drift schedule: N_1 = {sched.length(1)}, 9 phases of length 1000")

print()
print("=" * 72)
print("One coupled draw stream")
print("=" * 72)
i = 4
z = z_distribution(i, sched)
z = ZDistribution(i=i, c=float(z.c), b=float(z.b), stay=float(z.stay))
step_law = flat_step_distribution(2 * i, float(sched.a_of_phase(i)))
u = (np.arange(200_000) + 0.5) / 200_000
steps, zvals = coupled_sample_many(u, step_law, z)
print(f"  phase {i}: step law {tuple(round(v, 4) for v in step_law.as_tuple())}, "
      f"Z masses (c, stay, b) = ({z.c:.4f}, {z.stay:.4f}, {z.b:.4f})")
print(f"  step >= Z in {100.0 * (steps >= zvals).mean():.1f}% of draws")
print(f"  mean step {steps.mean():+.4f} vs mean Z {zvals.mean():+.4f}")

print()
print("=" * 72)
print("Pathwise sum domination along simulated trajectories")
print("=" * 72)
report = run_coupled_check(sched, 5, 2000, SEED)
print(f"  (replication, phase) pairs with x >= i throughout: {report.pairs_checked}")
print(f"  violations of the phase-gain >= Z-sum ordering: {report.violations}")

print()
print("=" * 72)
print("Conditional phase success vs the per-phase bounds")
print("=" * 72)
result = run_experiment(sched, 10, 4000, SEED)
for i in (2, 5, 10):
    stats = result.phase(i)
    print(f"  phase {i:2d}: {stats.successes}/{stats.attempts} "
          f"(bound {true_mean_phase_bound(i, sched):.7f})")
print(f"  product estimate of surviving all 10 phases: {result.product_estimate:.4f}")

print()
print("=" * 72)
print("Controls: the two limiting regimes")
print("=" * 72)
const = run_control("constant", horizon=5000, replications=400, base_seed=SEED)
print(f"  constant a = 8: drift {const.drift:.4f}/step, "
      f"nondecreasing trajectories: {100 * const.nondecreasing_fraction:.0f}%")
fast = run_control("fast-growth", horizon=5000, replications=400, base_seed=SEED)
print(f"  a_n = n^2 + 8: tail occupancy mode at s = {fast.occupancy_mode}, "
      f"{100 * fast.low_state_fraction:.0f}% of tail time at s <= 4")
print()
print("Frozen adaptation rushes to infinity; explosive adaptation freezes")
print("near the corner.  The schedules in between are where the interesting")
print("behavior lives.")
