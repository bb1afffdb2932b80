"""Nested cycles of intervals inside the doubling solenoid.

The search grows cycles from unions of partition cells, keeps those with
pairwise disjoint members, and then chains them by nesting with periods
that multiply.  The certificate lists the periods and the first time the
orbit of the chosen point enters each level.
"""

from fractions import Fraction

from graphdyn import detect_cycles, solenoid_search, zoo

m = zoo.make_doubling_solenoid(4)
cycles = detect_cycles(m, 16)
print("certified cycles by period:", sorted({c.period for c in cycles if c.certified}))

res = solenoid_search(m, Fraction(1234, 10000), 4)
cert = res.certificate
if cert is None:
    print("no certificate:", res.reason)
else:
    print("periods:", cert.periods)
    print("orbit entry times:", cert.orbit_entry)
    print("nesting / divisibility / counts:", cert.nesting_ok, cert.divisibility_ok, cert.counts_ok)
    for lvl in cert.levels:
        comp = lvl.components[0]
        print(f"  period {lvl.period:>2}: first component {comp}")
