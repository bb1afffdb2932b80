"""A zero-entropy ladder system with sparse, slowly changing heights.

The ladder is built from a height sequence that moves in steps of 1/k
near index 2^(k+1).  The report checks, in exact arithmetic, how many
heights are nonzero below each dyadic block and how small their averages
are, and counts where consecutive heights differ by at least 1/n.
"""

from graphdyn import zoo

rep = zoo.verify_paper_example_bounds(k_counts=range(10, 15), k_averages=range(12, 15), witness_N=10 ** 5)
for key, val in rep.items():
    if isinstance(val, (list, tuple)) and len(val) > 6:
        val = list(val[:6]) + ["..."]
    print(f"{key}: {val}")
print("heights a_2025..a_2032:", [str(zoo.ladder_height(n)) for n in range(2025, 2033)])
