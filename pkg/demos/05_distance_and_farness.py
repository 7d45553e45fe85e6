#!/usr/bin/env python3
"""Distances to monotone/unate, and the Monte-Carlo farness machinery.

Exact distance to monotone = maximum disjoint violating pairs / 2^n
(maximum bipartite matching); distance to unate minimizes over all
orientations.  The witness-set scan exhibits an explicit disjoint
violating-edge family for no-world two-level instances, certifying a
farness lower bound that the exact distance must dominate.
"""

from fractions import Fraction

import numpy as np

from cubetest import BitString, QuadrantInstance, MonoInstance, UnateInstance
from cubetest.core import RngStream
from cubetest.distance import (
    count_violating_edges,
    estimate_witness_density,
    exact_dist_mono,
    exact_dist_unate,
    exhaustive_witness_density,
    unate_dist_lower_bound,
    unate_no_family_stats,
    witness_edge_family,
)

print("== Exact distances on small functions ==")
anti = np.array([1 - (v & 1) for v in range(8)], dtype=np.uint8)
print("anti-dictator n=3: dist to monotone =", exact_dist_mono(anti, 3),
      "| dist to unate =", exact_dist_unate(anti, 3))

fi = QuadrantInstance(6, 3)
table = fi.truth_table()
print("four-quadrant family n=6 (dimension 8): lower bound =",
      unate_dist_lower_bound(table), "exact =", exact_dist_unate(table, cap=8))

print("\n== Witness family of a no-world two-level instance (n=16) ==")
inst = MonoInstance.sample(16, "no", seed=3)
family = witness_edge_family(inst)
density = Fraction(len(family), 1 << 16)
print(f"{len(family)} disjoint violating edges found "
      f"(density {float(density):.4f} of the cube)")
x, xs = family[0]
print(f"example: f({x.to_hex()})={inst.value(x)}  f({xs.to_hex()})={inst.value(xs)}"
      f"  lower below upper: {x.precedes(xs)}")

exact_pr = exhaustive_witness_density(inst)
mc = estimate_witness_density(inst, 50_000, RngStream(1, "demo"))
print(f"membership probability over middle layers: exhaustive {exact_pr:.4f}, "
      f"monte-carlo {mc.estimate:.4f} +- {mc.ci_halfwidth:.4f}")

dist = exact_dist_mono(inst.truth_table(), 16, cap=16)
print(f"certified: family density {float(density):.4f} <= exact distance "
      f"{float(dist):.4f}")

print("\n== Per-direction farness of a no-world unateness instance ==")
# seed 0 has two terms sharing a special variable with opposite
# polarities, so one direction carries edges of both polarities -- the
# event that distinguishes far-from-unate from merely far-from-monotone
u = UnateInstance.sample(16, "no", seed=0)
stats = unate_no_family_stats(u, exhaustive=True)
for k in sorted(stats.plus):
    p, m = stats.plus[k].estimate, stats.minus[k].estimate
    if p or m:
        print(f"special variable {k}: monotone side {p:.4f}, "
              f"anti-monotone side {m:.4f}")
print(f"farness lower-bound estimate (sum of minima): {stats.min_sum:.4f}")
print("de-oriented violating edges:",
      count_violating_edges(u.base_truth_table(), 16))
