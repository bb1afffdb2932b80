"""Mobius-weighted averages along orbits of zero-entropy systems.

Averages of mu(n) * phi(f^n x) should drift towards zero for zero-entropy
maps.  Printed are the decade checkpoints for an irrational rotation, the
depth-6 doubling solenoid and the Feigenbaum logistic map.  The rotation
trace is the Davenport exponential sum in disguise, so its bumps are the
bumps of that sum.
"""

from graphdyn import zoo
from graphdyn.sequences import ArithmeticSequence, Observable, davenport_sum, disjointness_sum

N = 10 ** 6
golden = (5 ** 0.5 - 1) / 2

_, tr = davenport_sum(golden, N)
print("Davenport sum, alpha = golden fraction")
for n, v in tr:
    print(f"  N = {n:>8}  |S_N|/N = {abs(v):.2e}")

mu = ArithmeticSequence("mobius")
for name, m, phi in [
    ("rotation by golden fraction", zoo.make_rotation(golden), Observable("exp2pii")),
    ("doubling solenoid, depth 6", zoo.make_doubling_solenoid(6), Observable("coord")),
    ("Feigenbaum logistic", zoo.make_feigenbaum_logistic(), Observable("coord")),
]:
    _, tr = disjointness_sum(m, 0.1234, phi, mu, N)
    print(name)
    for n, v in tr:
        print(f"  N = {n:>8}  |avg| = {abs(v):.2e}")
