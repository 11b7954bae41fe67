"""Simulate the first four opinions on a line and read off their fronts.

Takes a few seconds. The measured speeds sit a little under the predicted
ones because pulled fronts lag by a slowly growing amount.
"""
import numpy as np

from opinion_ladder import ModelParams, build_sequences, estimate_speed, plateau_value, track_fronts
from opinion_ladder.frontlab import between_fronts
from opinion_ladder.solver import reference_config, run

p = ModelParams.constant(2.0, 1.0, 1.0, 1.0, 10)
seq = build_sequences(p)
cfg = reference_config(p, n_sim=4, half_length=150.0, dx=0.1, t_end=60.0)
res = run(cfg, p)
print(f"dt = {res.dt}, {len(res.snapshots)} snapshots")

fronts = {}
for n in (1, 2, 3):
    level = seq.plateaus[n] / 2
    try:
        trace = track_fronts(res.snapshots, res.grid, n, level)
    except ValueError as exc:
        print(exc)
        continue
    est = estimate_speed(trace)
    fronts[n] = trace.positions[-1]
    print(f"opinion {n}: speed {est.speed:.4f} +- {est.stderr:.1e} (c_{n} = {seq.speeds[n - 1]:.4f}),"
          f" front at x = {fronts[n]:.1f}")

last = res.snapshots[-1]
pv = plateau_value(last, res.grid, 1, between_fronts(fronts[2], fronts[1]))
print(f"S_1 between the two fronts: {pv.mean:.4f} (S*_1 = {seq.plateaus[1]:.4f})")
pv = plateau_value(last, res.grid, 0, (5.0, 0.85 * seq.speeds[2] * last.t))
print(f"S_0 near the origin: {pv.mean:.5f} (S_dagger_0 = {seq.daggers[0]:.5f})")

log = res.log
print("max mass drift:", log.column("mass_drift").max())
print("max |S_0 - S*_0 exp(-R_1)|:", log.column("s0_identity_residual").max())

# coarse profile of the final state along the positive half line
x = res.grid.x
for xi in range(0, 131, 10):
    j = int(np.argmin(np.abs(x - xi)))
    print(f"x={xi:4d}  S0={last.s0[j]:.3f}  " +
          "  ".join(f"S{n}={last.s[n - 1, j]:.3f}" for n in (1, 2, 3)))
