"""Walk down the plateau ladder for one parameter set.

Each new opinion can only invade the population left quiet by the one
before it, so the plateau densities shrink until the reproduction number
drops to one or below.
"""
import math

from opinion_ladder import ModelParams, build_sequences, check_h1

p = ModelParams.constant(2.0, 1.0, 1.0, 1.0, cap=10)
seq = build_sequences(p)

print(f"{'n':>3} {'S*_n':>12} {'c_n':>10} {'S_dagger_n':>12} {'R_n+1':>10}")
for n, s in enumerate(seq.plateaus):
    c = f"{seq.speeds[n - 1]:10.5f}" if n else " " * 10
    r = f"{seq.repro[n]:10.5f}" if n < len(seq.repro) else ""
    print(f"{n:>3} {s:12.8f} {c} {seq.daggers[n]:12.8f} {r}")

print()
print("N* =", seq.n_star)
print("speeds strictly decreasing:", check_h1(seq).ok)
# the settled shares add back up to the initial density
print("sum of dagger values:", math.fsum(seq.daggers))

# raising the initial density lets more opinions through
for s0 in (0.9, 1.5, 2.0, 3.0, 4.0):
    n = build_sequences(ModelParams.constant(s0, 1.0, 1.0, 1.0, 100)).n_star
    print(f"S*_0 = {s0:3.1f} -> N* = {n}")
