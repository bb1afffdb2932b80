"""Positive versus zero entropy on the interval.

The full tent map has two laps that double under iteration, so its lap
counts grow like 2^n and a strong horseshoe shows up at n = 1.  The
depth-5 doubling solenoid has lap counts that grow only polynomially: the
one-step growth estimate keeps shrinking and no horseshoe is found.
"""

import math

from graphdyn import horseshoe_search, lap_entropy, zoo

for name, m, n in [
    ("full tent", zoo.make_full_tent(), 16),
    ("doubling solenoid, depth 5", zoo.make_doubling_solenoid(5), 16),
]:
    est = lap_entropy(m, n)
    hs = horseshoe_search(m, 4)
    print(f"{name}")
    print(f"  lap counts l_1..l_8: {est.lap_counts[:8]}")
    print(f"  log(l_{n + 1}/l_{n}) = {est.estimate:.4f}   (log 2 = {math.log(2):.4f})")
    print(f"  horseshoe within 4 iterates: {'yes' if hs.found else 'no'} ({hs.reason})")
    print()
