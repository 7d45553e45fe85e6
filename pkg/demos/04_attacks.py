#!/usr/bin/env python3
"""The violation-finding attacks, run against both worlds.

All testers are honest black boxes: value queries only, rejection only
with a re-verified violating pair.  The staged attacks shrink the
candidate set of the addressed term by flipping 1-blocks whose flip keeps
the value, then cover the 0-side in weight-balanced blocks to localize
the hidden negated variable, and finally split the hit block.
"""

from cubetest import FlippedDnfInstance, MonoInstance
from cubetest.testers import TesterConfig, flipped_dnf_attack, edge_tester, two_level_attack

N = 100
RUNS = 200

print("== Edge tester baseline: anti-dictator at n=8, q=400 ==")
rejects = sum(
    edge_tester(lambda x: 1 - x[0], 8, TesterConfig(q=400, seed=s)).decision == "reject"
    for s in range(100)
)
print(f"reject rate {rejects}/100 (per-round violating-edge chance is 1/16)")

for name, family, attack, budget in (
    ("flipped-DNF attack", FlippedDnfInstance, flipped_dnf_attack, 1500),
    ("two-level attack", MonoInstance, two_level_attack, 4000),
):
    print(f"\n== {name} at n={N} ==")
    yes_rejects = 0
    for s in range(RUNS):
        inst = family.sample(N, "yes", seed=s)
        v = attack(inst.value, N, TesterConfig(q=budget, seed=s))
        yes_rejects += v.decision == "reject"
    print(f"yes world: {yes_rejects}/{RUNS} rejects (one-sided: always 0)")

    no_rejects = 0
    example = None
    for s in range(RUNS):
        inst = family.sample(N, "no", seed=s)
        v = attack(inst.value, N, TesterConfig(q=budget, seed=s))
        if v.decision == "reject":
            no_rejects += 1
            if example is None:
                example = (inst, v)
    print(f"no world : {no_rejects}/{RUNS} rejects")
    if example:
        inst, v = example
        w = v.witness
        print(f"example witness after {v.queries_used} queries "
              f"(stage counters {v.stage_queries}):")
        print(f"  lower {w.lower.to_hex()} evaluates to {inst.value(w.lower)}")
        print(f"  upper {w.upper.to_hex()} evaluates to {inst.value(w.upper)}")
        print(f"  lower strictly below upper: {w.lower.precedes(w.upper)}")
