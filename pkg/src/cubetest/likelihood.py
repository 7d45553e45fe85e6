"""Exact transcript likelihoods under the yes/no hidden-randomness models.

For a fixed multiplexer (terms and clauses), the probability that a random
dictator assignment reproduces a transcript factors over the tracked
cells; this module implements those closed forms and, next to each one, a
brute-force counterpart that enumerates the hidden randomness directly and
never touches the transcript's set bookkeeping.  The pairs are kept
deliberately independent: agreement between them is the correctness
argument for both.

Conventions: yes world = dictators only, no world = anti-dictators (two
level, single level) or fair-coin polarity (unateness).  All probabilities
are conditioned on the fixed term/clause draw, which must itself be
consistent with the recorded term/clause patterns (otherwise both sides
are zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .core import BitString, ResourceLimitError, RngStream
from .families import MonoInstance, OneLevelInstance, UnateInstance
from .sigoracle import ClausePattern, TermPattern
from .transcripts import (
    MonoTranscript,
    SingleLevelTranscript,
    UnateTranscript,
    consistency_status,
)

__all__ = [
    "LeafLikelihood",
    "UnateLikelihood",
    "mono_leaf_likelihood",
    "mono_leaf_likelihood_bruteforce",
    "onelevel_outcome_likelihood",
    "onelevel_outcome_likelihood_bruteforce",
    "unate_transcript_likelihood",
    "unate_likelihood_bruteforce",
]


@dataclass(frozen=True)
class LeafLikelihood:
    """Reach probabilities of a transcript under the two hidden worlds.

    ``ratio`` is no/yes; infinity encodes a transcript reachable only in
    the no world, NaN one reachable in neither.
    """

    p_yes: float
    p_no: float

    @property
    def ratio(self) -> float:
        if self.p_yes > 0:
            return self.p_no / self.p_yes
        return math.inf if self.p_no > 0 else math.nan


@dataclass(frozen=True)
class UnateLikelihood:
    p_yes: float
    p_no: float
    p_yes_ci: Optional[float] = None  # 95% half-width when Monte-Carlo
    samples: Optional[int] = None


# ---------------------------------------------------------------------------
# Pattern consistency of the fixed multiplexer
# ---------------------------------------------------------------------------


def _mono_patterns_match(inst: MonoInstance, t: MonoTranscript) -> bool:
    for x, sig in t.queries:
        hits = inst.satisfied_terms(x, limit=2)
        if len(hits) == 0:
            ok = sig.term.kind == "none"
        elif len(hits) == 1:
            ok = sig.term == TermPattern("unique", hits[0])
        else:
            ok = sig.term == TermPattern("multi", hits[0], hits[1])
        if not ok:
            return False
        if sig.term.kind != "unique":
            continue
        fals = inst.falsified_clauses(sig.term.first, x, limit=2)
        if len(fals) == 0:
            ok = sig.clause.kind == "all_one"
        elif len(fals) == 1:
            ok = sig.clause == ClausePattern("unique", fals[0])
        else:
            ok = sig.clause == ClausePattern("multi", fals[0], fals[1])
        if not ok:
            return False
    return True


def _single_level_patterns_match(inst, t: SingleLevelTranscript, oriented: bool) -> bool:
    for x, sig in t.queries:
        y = x.xor(inst.orientation) if oriented else x
        hits = (
            inst.satisfied_terms_base(y, limit=2)
            if oriented
            else inst.satisfied_terms(y, limit=2)
        )
        if len(hits) == 0:
            ok = sig.term.kind == "none"
        elif len(hits) == 1:
            ok = sig.term == TermPattern("unique", hits[0])
        else:
            ok = sig.term == TermPattern("multi", hits[0], hits[1])
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# Two-level leaf likelihood
# ---------------------------------------------------------------------------


def mono_leaf_likelihood(inst: MonoInstance, t: MonoTranscript) -> LeafLikelihood:
    """Closed-form reach probabilities over the dictator draw.

    Requires every tracked cell to be consistent (the formula is only
    meaningful at such leaves).  Conditioned on the instance's terms and
    clauses matching the recorded patterns; if they do not, both
    probabilities are zero.
    """
    for cell in t.rho:
        if consistency_status(t, *cell) == "inconsistent":
            raise ValueError(
                f"cell {cell} is inconsistent; the closed form only covers "
                "consistent leaves"
            )
    if not _mono_patterns_match(inst, t):
        return LeafLikelihood(0.0, 0.0)
    n = inst.n
    p_yes = 1.0
    p_no = 1.0
    for (i, j), values in sorted(t.rho.items()):
        rho = next(iter(values.values()))
        size_rho = len(t.Aij1[(i, j)] if rho == 1 else t.Aij0[(i, j)])
        size_other = len(t.Aij0[(i, j)] if rho == 1 else t.Aij1[(i, j)])
        p_yes *= size_rho / n
        p_no *= size_other / n
    return LeafLikelihood(p_yes, p_no)


def mono_leaf_likelihood_bruteforce(
    inst: MonoInstance, t: MonoTranscript
) -> LeafLikelihood:
    """Enumeration over dictator choices, cell by cell.

    For every tracked cell, counts the variables whose dictator (yes) or
    anti-dictator (no) reproduces each recorded value on the raw queries;
    cells are independent, untracked cells are unconstrained.
    """
    if not _mono_patterns_match(inst, t):
        return LeafLikelihood(0.0, 0.0)
    n = inst.n
    p_yes = 1.0
    p_no = 1.0
    for (i, j), values in sorted(t.rho.items()):
        yes_count = 0
        no_count = 0
        for k in range(n):
            if all(t.queries[q][0][k] == v for q, v in values.items()):
                yes_count += 1
            if all(1 - t.queries[q][0][k] == v for q, v in values.items()):
                no_count += 1
        p_yes *= yes_count / n
        p_no *= no_count / n
    return LeafLikelihood(p_yes, p_no)


# ---------------------------------------------------------------------------
# Single-level outcome likelihood
# ---------------------------------------------------------------------------


def onelevel_outcome_likelihood(
    inst: OneLevelInstance, t: SingleLevelTranscript
) -> LeafLikelihood:
    """Single-level analogue: one factor per tracked term."""
    for i in t.rho:
        if consistency_status(t, i) == "inconsistent":
            raise ValueError(
                f"term {i} is inconsistent; the closed form only covers "
                "consistent outcomes"
            )
    if not _single_level_patterns_match(inst, t, oriented=False):
        return LeafLikelihood(0.0, 0.0)
    n = inst.n
    p_yes = 1.0
    p_no = 1.0
    for i, values in sorted(t.rho.items()):
        rho = next(iter(values.values()))
        size_rho = len(t.A1[i] if rho == 1 else t.A0[i])
        size_other = len(t.A0[i] if rho == 1 else t.A1[i])
        p_yes *= size_rho / n
        p_no *= size_other / n
    return LeafLikelihood(p_yes, p_no)


def onelevel_outcome_likelihood_bruteforce(
    inst: OneLevelInstance, t: SingleLevelTranscript
) -> LeafLikelihood:
    if not _single_level_patterns_match(inst, t, oriented=False):
        return LeafLikelihood(0.0, 0.0)
    n = inst.n
    p_yes = 1.0
    p_no = 1.0
    for i, values in sorted(t.rho.items()):
        yes_count = sum(
            1
            for k in range(n)
            if all(t.queries[q][0][k] == v for q, v in values.items())
        )
        no_count = sum(
            1
            for k in range(n)
            if all(1 - t.queries[q][0][k] == v for q, v in values.items())
        )
        p_yes *= yes_count / n
        p_no *= no_count / n
    return LeafLikelihood(p_yes, p_no)


# ---------------------------------------------------------------------------
# Unateness transcript likelihood
# ---------------------------------------------------------------------------


def _unate_setup(inst: UnateInstance, t: UnateTranscript):
    """Shared preparation: representatives, observed values, reachability."""
    n = inst.n
    mbar = sorted(t.Mbar)
    reps: dict[int, BitString] = {}
    alphas: dict[int, int] = {}
    for i in sorted(t.I):
        q = t.P[i][0]
        reps[i] = t.queries[q][0]
        alphas[i] = t.rho[i][q]
    for i in sorted(t.I_S):
        if consistency_status(t, i) == "inconsistent":
            raise ValueError(f"safe term {i} is inconsistent; transcript corrupt")
    for i in sorted(t.I_B):
        k = t.delta[i]
        seen = {t.queries[q][0][k] ^ v for q, v in t.rho[i].items()}
        if len(seen) != 1:
            raise ValueError(
                f"breached term {i} has no consistent polarity at its special "
                "variable; transcript unreachable in either world"
            )
    return n, mbar, reps, alphas


def unate_transcript_likelihood(
    inst: UnateInstance,
    t: UnateTranscript,
    mode: str = "auto",
    samples: int = 20000,
    rng: RngStream | None = None,
    exhaustive_cap: int = 20,
) -> UnateLikelihood:
    """Reach probabilities of a unateness transcript over (H, s).

    The no-side is the closed product ``(1/n)^{|I_B|} * prod |A_i cap
    Mbar| / n`` over safe terms.  The yes-side is an expectation over the
    orientation restricted to the coordinates that matter (special
    variables of breached terms plus the agreement sets of safe terms):
    exhaustive when at most ``exhaustive_cap`` coordinates are involved,
    Monte-Carlo with a reported confidence interval otherwise.
    """
    if not _single_level_patterns_match(inst, t, oriented=True):
        return UnateLikelihood(0.0, 0.0)
    n, mbar, reps, alphas = _unate_setup(inst, t)

    p_no = (1.0 / n) ** len(t.I_B)
    for i in sorted(t.I_S):
        p_no *= len(t.common_coords(i) & t.Mbar) / n

    special = {i: t.delta[i] for i in t.I_B}
    d_set = set(special.values())
    relevant: set[int] = set(d_set)
    constraints: dict[int, list[int]] = {}  # i in I_S -> candidate coords
    for i in sorted(t.I_S):
        cand = sorted(t.common_coords(i) & t.Mbar)
        constraints[i] = cand
        relevant |= set(cand)
    coords = sorted(relevant)

    def z_product(bits: dict[int, int]) -> float:
        out = 1.0
        for i in sorted(t.I_B):
            k = special[i]
            if reps[i][k] ^ bits[k] == alphas[i]:
                out *= 2.0 / n
            else:
                return 0.0
        for i in sorted(t.I_S):
            cnt = sum(
                1 for k in constraints[i] if reps[i][k] ^ bits[k] == alphas[i]
            )
            out *= cnt / (n / 2.0)
        return out

    if mode == "auto":
        mode = "exhaustive" if len(coords) <= exhaustive_cap else "monte_carlo"
    if mode == "exhaustive":
        if len(coords) > exhaustive_cap:
            raise ResourceLimitError(
                f"{len(coords)} relevant coordinates exceed the exhaustive "
                f"cap {exhaustive_cap}"
            )
        total = 0.0
        for assignment in product((0, 1), repeat=len(coords)):
            total += z_product(dict(zip(coords, assignment)))
        p_yes = total / (1 << len(coords))
        return UnateLikelihood(p_yes, p_no)
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    rng = rng or RngStream(0, "unate-likelihood")
    vals = np.empty(samples)
    for it in range(samples):
        bits = {k: rng.randint0(2) for k in coords}
        vals[it] = z_product(bits)
    p_yes = float(vals.mean())
    half = 1.96 * float(vals.std(ddof=1)) / math.sqrt(samples) if samples > 1 else math.inf
    return UnateLikelihood(p_yes, p_no, p_yes_ci=half, samples=samples)


def unate_likelihood_bruteforce(
    inst: UnateInstance, t: UnateTranscript, exhaustive_cap: int = 20
) -> UnateLikelihood:
    """Full enumeration over the hidden pair (H, s).

    Iterates the orientation over all of ``Mbar`` and, per term, every
    dictator candidate (variable and polarity), validating each directly
    against the recorded values and breach revelations.
    """
    if not _single_level_patterns_match(inst, t, oriented=True):
        return UnateLikelihood(0.0, 0.0)
    n = inst.n
    mbar = sorted(t.Mbar)
    if len(mbar) > exhaustive_cap:
        raise ResourceLimitError(
            f"|Mbar|={len(mbar)} exceeds the brute-force cap {exhaustive_cap}"
        )
    obs = {
        i: [(t.queries[q][0], v) for q, v in sorted(t.rho[i].items())]
        for i in sorted(t.I)
    }

    def count_valid(i: int, bits: dict[int, int], anti_allowed: bool) -> int:
        target = t.delta.get(i)
        count = 0
        for k in mbar:
            if target is not None and k != target:
                continue
            for neg in (False, True) if anti_allowed else (False,):
                ok = all(
                    (x[k] ^ bits[k] ^ int(neg)) == v for x, v in obs[i]
                )
                if ok:
                    count += 1
        return count

    total_yes = 0.0
    total_no = 0.0
    for assignment in product((0, 1), repeat=len(mbar)):
        bits = dict(zip(mbar, assignment))
        py = 1.0
        pn = 1.0
        for i in sorted(t.I):
            py *= count_valid(i, bits, anti_allowed=False) / (n / 2.0)
            pn *= count_valid(i, bits, anti_allowed=True) / float(n)
        total_yes += py
        total_no += pn
    scale = 1 << len(mbar)
    return UnateLikelihood(total_yes / scale, total_no / scale)
