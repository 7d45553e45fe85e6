#!/usr/bin/env python3
"""Tour of the random function families and their evaluation semantics.

Every family is reproducible from a 64-bit seed; the yes world is always
monotone (unate after orientation for the unateness family), and the no
worlds hide anti-monotone structure behind a multiplexer.
"""

import numpy as np

from cubetest import (
    FlippedDnfInstance,
    BitString,
    QuadrantInstance,
    MonoInstance,
    OneLevelInstance,
    UnateInstance,
)
from cubetest.distance import count_violating_edges

print("== Two-level family (terms gating clauses gating dictators) ==")
inst = MonoInstance.sample(16, "yes", seed=7)
print(f"n={inst.n}: N={inst.N} terms of {inst.m} variables, {inst.N}x{inst.N} clauses")
print("term 0:", inst.term(0).vars, " clause (0,0):", inst.clause(0, 0).vars)

x = BitString.from_indices(16, [0, 3, 5, 6, 9, 12, 14])
print(f"query {x}: weight class {inst.weight_class(x)}, route {inst.route(x)},"
      f" value {inst.value(x)}")
print("all-ones truncates to", inst.value(BitString.ones(16)),
      "| all-zeros to", inst.value(BitString.zeros(16)))

table = inst.truth_table()
print(f"full table: mean value {table.mean():.3f}, "
      f"violating edges {count_violating_edges(table, 16)} (yes world is monotone)")

no = MonoInstance.sample(16, "no", seed=7)
print("same seed, no world: identical multiplexer, anti-dictators instead ->",
      count_violating_edges(no.truth_table(), 16), "violating edges")

print("\n== Flipped-DNF family ==")
bb = FlippedDnfInstance.sample(100, "no", seed=3)
print(f"n=100: {bb.N} monotone terms; hidden flip set of size {len(bb.flip_coords)}")

print("\n== Single-level family ==")
ol = OneLevelInstance.sample(16, "no", seed=1)
print(f"n=16: {ol.N} subset terms; term 2 = {ol.term(2).vars}")

print("\n== Unateness family ==")
u = UnateInstance.sample(16, "no", seed=5)
print(f"n=16: N={u.N} terms over a hidden half M={sorted(u.M)}")
print("dictators:", [(d.index, "anti" if d.negated else "dict")
                     for d in (u.dictator(i) for i in range(u.N))])
print("orientation:", u.orientation)
print("de-oriented table violating edges:",
      count_violating_edges(u.base_truth_table(), 16),
      "(nonzero: the no world is far from monotone in every orientation)")

print("\n== Four-quadrant family ==")
fi = QuadrantInstance(4, 2)
for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)):
    vals = {xi: fi.value(BitString.from_indices(6, [k for k, v in
            ((0, a), (1, b), (2 + fi.i, xi)) if v])) for xi in (0, 1)}
    print(f"quadrant (a={a}, b={b}): value at x_i=0 -> {vals[0]}, x_i=1 -> {vals[1]}")
