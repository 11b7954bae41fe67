"""How fast N* grows with the initial density.

The u-iteration gives N* without solving the ladder, and the integral Phi
predicts it to leading order. The ratio N* * lam*S*_0 / exp(lam*S*_0)
drifts towards one, but slowly.
"""
import math

from opinion_ladder import AT_LEAST_CAP, ModelParams, big_phi, bracket_n_star, build_sequences

lam = 1.0
print(f"{'S*_0':>5} {'N* ladder':>10} {'N* u-iter':>10} {'Phi(S*_0)':>11} {'ratio':>8}")
for s0 in (2.0, 4.0, 6.0, 8.0, 10.0, 12.0):
    ladder = build_sequences(ModelParams.constant(s0, 1.0, lam, 1.0, 5000)).n_star
    n = bracket_n_star(s0, lam, cap=10**6)
    ratio = n * lam * s0 / math.exp(lam * s0)
    lad = ladder if ladder != AT_LEAST_CAP else ">=5000"
    print(f"{s0:5.1f} {lad!s:>10} {n:>10} {big_phi(s0, lam):11.2f} {ratio:8.4f}")

# a fast-growing transmission rate never lets the ladder stop
p = ModelParams.from_lists(2.0, 1.0, [2.0 ** (k + 1) for k in range(1, 51)], 1.0)
seq = build_sequences(p)
print()
print("lam_k = 2^(k+1):", seq.n_star, "with S*_50 =", round(seq.plateaus[50], 6))
