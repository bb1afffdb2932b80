"""Scrambled pairs and independence sets: tent versus rotation.

On the full tent, random pairs that come close infinitely often yet also
separate are easy to find, and two disjoint arcs admit long independence
sets.  A rotation is an isometry, so no pair is scrambled and two arcs
never realize more than a couple of independent times.
"""

from fractions import Fraction

from graphdyn import zoo
from graphdyn.chaos import check_independence, find_scrambled_tuples, independence_set_search

tent = zoo.make_full_tent()
rot = zoo.make_rotation((5 ** 0.5 - 1) / 2)

for name, m in [("full tent", tent), ("golden rotation", rot)]:
    found = find_scrambled_tuples(m, 2, 200, 20000, seed=0)
    print(f"{name}: {len(found)} scrambled-like pairs among 200 samples")

halves = [[(Fraction(0), Fraction(9, 20))], [(Fraction(11, 20), Fraction(1))]]
r = check_independence(tent, halves, range(0, 16, 2))
print(f"tent, arcs [0, 9/20] and [11/20, 1]: J = even times < 16 verified: {r.verified} "
      f"({r.patterns_checked} patterns, witnesses ok: {r.witnesses_ok})")

arcs = [[(Fraction(0), Fraction(3, 10))], [(Fraction(1, 2), Fraction(4, 5))]]
r = independence_set_search(rot, arcs, 8)
print(f"rotation, arcs [0, 3/10] and [1/2, 4/5]: largest independence set found {r.J}")
