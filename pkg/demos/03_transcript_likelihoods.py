#!/usr/bin/env python3
"""Exact transcript likelihoods: closed forms vs brute-force enumeration.

For a fixed multiplexer, the probability that each hidden world reproduces
a transcript factors over the tracked cells.  The ratio no/yes measures
how much evidence the transcript carries; for "good" (consistent)
transcripts it stays near 1, which is exactly why the hard families
resist small query budgets.
"""

from cubetest import BitString, MonoInstance, UnateInstance
from cubetest.core import RngStream
from cubetest.likelihood import (
    mono_leaf_likelihood,
    mono_leaf_likelihood_bruteforce,
    unate_likelihood_bruteforce,
    unate_transcript_likelihood,
)
from cubetest.sigoracle import OutOfBandError, mono_full_signature
from cubetest.transcripts import MonoTranscript, UnateSignatureOracle, consistency_status

rng = RngStream(1, "demo3")

print("== Two-level leaf likelihood (toy: 4 terms over n=16) ==")
g = RngStream(42, "toy")
terms = [[g.randint0(16) for _ in range(4)] for _ in range(4)]
clauses = [[[g.randint0(16) for _ in range(4)] for _ in range(4)] for _ in range(4)]
dicts = [[g.randint0(16) for _ in range(4)] for _ in range(4)]
inst = MonoInstance.from_parts(16, "no", terms, clauses, dicts)

t = MonoTranscript(16)
while len(t.queries) < 12:
    x = BitString.random(16, rng)
    if inst.weight_class(x) == "middle":
        t.extend(x, mono_full_signature(inst, x))

print("tracked cells:", sorted(t.rho))
if all(consistency_status(t, i, j) != "inconsistent" for (i, j) in t.rho):
    closed = mono_leaf_likelihood(inst, t)
    brute = mono_leaf_likelihood_bruteforce(inst, t)
    print(f"closed form : p_yes={closed.p_yes:.6g} p_no={closed.p_no:.6g} "
          f"ratio={closed.ratio:.6g}")
    print(f"brute force : p_yes={brute.p_yes:.6g} p_no={brute.p_no:.6g}")
    print("difference  :", abs(closed.p_yes - brute.p_yes),
          abs(closed.p_no - brute.p_no))
else:
    print("transcript landed inconsistent (a cell saw both dictator values)")

print("\n== Unateness transcript likelihood ==")
u = UnateInstance.sample(16, "no", seed=9)
oracle = UnateSignatureOracle(u)
added = 0
while added < 10:
    x = BitString.random(16, rng)
    try:
        oracle.query(x)
        added += 1
    except OutOfBandError:
        continue
tr = oracle.transcript
closed = unate_transcript_likelihood(u, tr, mode="exhaustive")
brute = unate_likelihood_bruteforce(u, tr)
print(f"breached={sorted(tr.I_B)} safe={sorted(tr.I_S)}")
print(f"closed/structured: p_yes={closed.p_yes:.6g} p_no={closed.p_no:.6g}")
print(f"full enumeration : p_yes={brute.p_yes:.6g} p_no={brute.p_no:.6g}")
mc = unate_transcript_likelihood(u, tr, mode="monte_carlo", samples=5000,
                                 rng=RngStream(3, "mc"))
print(f"monte-carlo      : p_yes={mc.p_yes:.6g} +- {mc.p_yes_ci:.2g} "
      f"({mc.samples} samples)")
