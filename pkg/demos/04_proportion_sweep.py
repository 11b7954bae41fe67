"""Share of the population that settles on each opinion, as S*_0 varies."""
from opinion_ladder import OpinionParams, sweep_s0

values = [round(0.5 + 0.05 * k, 12) for k in range(151)]
table = sweep_s0(values, OpinionParams(d=1.0, alpha=1.0, mu=1.0), cap=1000)

# N* climbs in unit steps at first, then faster than exponentially
prev = None
for s0, n in table.n_stars.items():
    if n != prev and s0 <= 3.0:
        print(f"N* becomes {n} at S*_0 = {s0}")
    prev = n
for s0 in (4.0, 5.0, 6.0, 7.0, 8.0):
    print(f"S*_0 = {s0}: N* = {table.n_stars[s0]}")

for s0 in (1.5, 2.0, 3.0):
    shares = table.block(s0)
    nonzero = [f"{f:.3f}" for f in shares if f > 0]
    print(f"S*_0 = {s0}: " + ", ".join(nonzero) + f"  (sum {sum(shares):.12f})")
