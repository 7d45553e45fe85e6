"""Transcript bookkeeping for signature oracles.

A transcript is the ordered list of (query, signature) pairs together with
the *induced tuple* it determines:

* ``I`` -- term indices with at least one known satisfying query;
* ``J`` (two-level only) -- per-term clause indices with a known
  falsifying query;
* ``P`` / ``R`` -- queries known to satisfy / not satisfy each tracked
  term (and, two-level, to falsify / satisfy each tracked clause);
* ``A`` -- coordinates on which all members of a ``P`` set agree, split by
  the common value;
* ``rho`` -- the observed dictator values per tracked cell.

Transcripts are single-owner mutable values: ``extend`` updates the tuple
incrementally, and ``induced_*_tuple`` recomputes the same data from
scratch straight off the definitions, as an independent cross-check.

The module also houses the bad-edge classifiers, the balance check for
unateness trees, breach bookkeeping with special-variable revelation, and
the good/bad outcome test for non-adaptive single-level transcripts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Callable, Iterable, Mapping, NamedTuple, Optional

from .core import BitString, ResourceLimitError
from .families import OneLevelInstance, UnateInstance
from .sigoracle import (
    FullSignature,
    UnateSignature,
    onelevel_signature,
    unate_signature,
)

__all__ = [
    "ClassifierConfig",
    "EdgeClass",
    "MonoTranscript",
    "SingleLevelTranscript",
    "UnateTranscript",
    "UnateSignatureOracle",
    "OneLevelSignatureOracle",
    "induced_mono_tuple",
    "induced_single_level_tuple",
    "consistency_status",
    "classify_mono_edge",
    "classify_unate_edge",
    "classify_nonadaptive_outcome",
    "check_balanced_step",
    "breached_terms",
]


# ---------------------------------------------------------------------------
# Thresholds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifierConfig:
    """Thresholds used by the bad-edge classifiers and balance checks.

    Every threshold defaults to its standard formula in the dimension
    ``n`` (with logarithms in ``log_base``, base 2 by default) and can be
    overridden individually, which is how the hand-crafted fixtures make
    the rare events reachable at desk-scale dimensions.
    """

    n: int
    alpha: float = 4.0
    log_base: float = 2.0
    mono_drop_threshold: Optional[float] = None  # alpha * sqrt(n) * log n
    unate_drop_threshold: Optional[float] = None  # n^(2/3) * log n
    balance_delta_threshold: Optional[float] = None  # n^(2/3) * log n
    balance_floor: Optional[float] = None  # n^(2/3) * log n / 8
    breach_count_cap: Optional[float] = None  # n^(1/3) / log n
    breach_overlap_floor: Optional[float] = None  # n / 10
    shared_ones_floor: Optional[float] = None  # n/2 - alpha * sqrt(n) * log n
    balance_subset_cap: int = 12

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")

    @property
    def log_n(self) -> float:
        return math.log(self.n) / math.log(self.log_base)

    @property
    def mono_drop(self) -> float:
        if self.mono_drop_threshold is not None:
            return self.mono_drop_threshold
        return self.alpha * math.sqrt(self.n) * self.log_n

    @property
    def unate_drop(self) -> float:
        if self.unate_drop_threshold is not None:
            return self.unate_drop_threshold
        return self.n ** (2.0 / 3.0) * self.log_n

    @property
    def balance_delta(self) -> float:
        if self.balance_delta_threshold is not None:
            return self.balance_delta_threshold
        return self.n ** (2.0 / 3.0) * self.log_n

    @property
    def balance_min_ones(self) -> float:
        if self.balance_floor is not None:
            return self.balance_floor
        return self.n ** (2.0 / 3.0) * self.log_n / 8.0

    @property
    def breach_cap(self) -> float:
        if self.breach_count_cap is not None:
            return self.breach_count_cap
        return self.n ** (1.0 / 3.0) / self.log_n

    @property
    def breach_overlap(self) -> float:
        if self.breach_overlap_floor is not None:
            return self.breach_overlap_floor
        return self.n / 10.0

    @property
    def shared_ones(self) -> float:
        if self.shared_ones_floor is not None:
            return self.shared_ones_floor
        return self.n / 2.0 - self.alpha * math.sqrt(self.n) * self.log_n


@dataclass(frozen=True)
class EdgeClass:
    """Classification of one transcript transition.

    ``kind`` is None for an uneventful edge.  When several event types
    fire at the same edge, the lowest-numbered one is reported and all of
    them are listed in ``ambiguous``.
    """

    kind: Optional[str] = None
    i: Optional[int] = None
    j: Optional[int] = None
    ambiguous: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.kind is not None


# ---------------------------------------------------------------------------
# Two-level transcripts
# ---------------------------------------------------------------------------


class MonoTranscript:
    """Ordered full-signature transcript with its induced tuple."""

    def __init__(self, n: int):
        self.n = n
        self.queries: list[tuple[BitString, FullSignature]] = []
        self.I: set[int] = set()
        self.J: dict[int, set[int]] = {}
        self.P: dict[int, list[int]] = {}
        self.R: dict[int, list[int]] = {}
        self.Pij: dict[tuple[int, int], list[int]] = {}
        self.Rij: dict[tuple[int, int], list[int]] = {}
        self.A1: dict[int, set[int]] = {}
        self.A0: dict[int, set[int]] = {}
        self.Aij1: dict[tuple[int, int], set[int]] = {}
        self.Aij0: dict[tuple[int, int], set[int]] = {}
        self.rho: dict[tuple[int, int], dict[int, int]] = {}
        self.bad_edge: Optional[EdgeClass] = None
        self.edge_classes: list[Optional[EdgeClass]] = []

    def __len__(self) -> int:
        return len(self.queries)

    def _tuple_sizes(self) -> dict:
        return {
            "queries": len(self.queries),
            "I": len(self.I),
            "P": {str(i): len(v) for i, v in sorted(self.P.items())},
            "Pij": {f"{i},{j}": len(v) for (i, j), v in sorted(self.Pij.items())},
        }

    def dump_jsonl(self) -> str:
        """One JSON record per query: point, signature, cumulative tuple
        sizes, and the recorded edge class (when a classifier was run)."""
        import json as _json

        lines = []
        probe = MonoTranscript(self.n)
        for q, (x, sig) in enumerate(self.queries):
            probe.extend(x, sig)
            rec = {
                "x": x.to_json(),
                "signature": sig.to_json(),
                "sizes": probe._tuple_sizes(),
            }
            if q < len(self.edge_classes) and self.edge_classes[q] is not None:
                e = self.edge_classes[q]
                rec["edge_class"] = {"kind": e.kind, "i": e.i, "j": e.j}
            lines.append(_json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    def extend(self, x: BitString, sig: FullSignature) -> None:
        """Append one (query, signature) pair and update the tuple."""
        if x.n != self.n:
            raise ValueError(f"query has n={x.n}, transcript has n={self.n}")
        if not isinstance(sig, FullSignature):
            raise ValueError(f"expected a FullSignature, got {type(sig).__name__}")
        qidx = len(self.queries)
        self.queries.append((x, sig))
        ones = set(x.one_indices())
        zeros = set(x.zero_indices())

        for i in sig.term.members():
            if i not in self.I:
                self.I.add(i)
                self.J[i] = set()
                self.P[i] = [qidx]
                self.A1[i] = set(ones)
                self.A0[i] = set(zeros)
                self.R[i] = [
                    q
                    for q, (_, s) in enumerate(self.queries[:qidx])
                    if s.term.entry(i) == 0
                ]
            else:
                self.P[i].append(qidx)
                self.A1[i] &= ones
                self.A0[i] &= zeros
        for i in self.I:
            if sig.term.entry(i) == 0:
                self.R[i].append(qidx)

        if sig.term.kind != "unique":
            return
        i = sig.term.first
        for j in sig.clause.zero_members():
            value = sig.a if j == sig.clause.first else sig.b
            if (i, j) not in self.Pij:
                self.J[i].add(j)
                self.Pij[(i, j)] = [qidx]
                self.Aij1[(i, j)] = set(ones)
                self.Aij0[(i, j)] = set(zeros)
                self.rho[(i, j)] = {qidx: value}
                self.Rij[(i, j)] = [
                    q
                    for q, (_, s) in enumerate(self.queries[:qidx])
                    if s.term.kind == "unique"
                    and s.term.first == i
                    and s.clause.entry(j) == 1
                ]
            else:
                self.Pij[(i, j)].append(qidx)
                self.Aij1[(i, j)] &= ones
                self.Aij0[(i, j)] &= zeros
                self.rho[(i, j)][qidx] = value
        for (i2, j2) in self.Pij:
            if i2 == i and sig.clause.entry(j2) == 1:
                self.Rij[(i2, j2)].append(qidx)

    def check_axioms(self) -> list[str]:
        """Structural facts every induced tuple must satisfy.

        Returns a list of human-readable violations (empty when clean):
        the size chains |I| <= sum|P_i| <= 2|Q| and |J_i| <= sum|P_ij| <=
        2|P_i|, the R-set bounds, the inclusions P_ij in P_i and A_i,b in
        A_ij,b, and the pairwise counting bound on |A_ij,1|.
        """
        bad: list[str] = []
        nq = len(self.queries)
        if not len(self.I) <= sum(len(p) for p in self.P.values()) <= 2 * nq:
            bad.append("|I| <= sum |P_i| <= 2|Q| fails")
        for i in self.I:
            pij_sizes = sum(len(self.Pij[(i, j)]) for j in self.J[i])
            if not len(self.J[i]) <= pij_sizes <= 2 * len(self.P[i]):
                bad.append(f"|J_{i}| <= sum |P_ij| <= 2|P_{i}| fails")
            if len(self.R[i]) > nq:
                bad.append(f"|R_{i}| > |Q|")
            for j in self.J[i]:
                if len(self.Rij[(i, j)]) > nq:
                    bad.append(f"|R_({i},{j})| > |Q|")
                if not set(self.Pij[(i, j)]) <= set(self.P[i]):
                    bad.append(f"P_({i},{j}) not within P_{i}")
                if not self.A0[i] <= self.Aij0[(i, j)]:
                    bad.append(f"A_({i},0) not within A_({i},{j},0)")
                if not self.A1[i] <= self.Aij1[(i, j)]:
                    bad.append(f"A_({i},1) not within A_({i},{j},1)")
                for q in self.Pij[(i, j)]:
                    x = self.queries[q][0]
                    x_ones = set(x.one_indices())
                    lost = 0
                    for q2 in self.Pij[(i, j)]:
                        if q2 == q:
                            continue
                        y = self.queries[q2][0]
                        lost += len(x_ones - set(y.one_indices()))
                    if len(self.Aij1[(i, j)]) < len(x_ones) - lost:
                        bad.append(f"pairwise count bound fails at ({i},{j})")
        return bad

    def cross_check_instance(self, inst) -> list[str]:
        """Ground-truth facts against the hidden instance.

        Every tracked term has its variables inside ``A_i1`` and value 0
        on its ``R_i``; every tracked clause has its variables inside
        ``A_ij0`` and value 1 on its ``R_ij``.
        """
        bad: list[str] = []
        for i in self.I:
            term = inst.term(i)
            if not set(term.vars) <= self.A1[i]:
                bad.append(f"term {i} variables escape A_(i,1)")
            for q in self.R[i]:
                if term.satisfied_by(self.queries[q][0]):
                    bad.append(f"term {i} satisfied by a member of R_{i}")
        for (i, j), rij in self.Rij.items():
            clause = inst.clause(i, j)
            if not set(clause.vars) <= self.Aij0[(i, j)]:
                bad.append(f"clause ({i},{j}) variables escape A_(i,j,0)")
            for q in rij:
                if clause.falsified_by(self.queries[q][0]):
                    bad.append(f"clause ({i},{j}) falsified by a member of R_ij")
        return bad


def induced_mono_tuple(queries: list[tuple[BitString, FullSignature]]) -> MonoTranscript:
    """From-scratch recomputation of the induced tuple (definitional).

    Written directly off the set definitions rather than incrementally, so
    it serves as an independent oracle against :meth:`MonoTranscript.extend`.
    """
    if not queries:
        t = MonoTranscript(1)
        t.queries = []
        return t
    n = queries[0][0].n
    t = MonoTranscript(n)
    t.queries = list(queries)
    members = [
        (set(x.one_indices()), set(x.zero_indices()), sig) for x, sig in queries
    ]
    all_i = sorted({i for _, _, sig in members for i in sig.term.members()})
    t.I = set(all_i)
    for i in all_i:
        t.P[i] = [q for q, (_, _, s) in enumerate(members) if s.term.entry(i) == 1]
        t.R[i] = [q for q, (_, _, s) in enumerate(members) if s.term.entry(i) == 0]
        t.A1[i] = set.intersection(*(members[q][0] for q in t.P[i]))
        t.A0[i] = set.intersection(*(members[q][1] for q in t.P[i]))
        uniq = [
            q
            for q, (_, _, s) in enumerate(members)
            if s.term.kind == "unique" and s.term.first == i
        ]
        t.J[i] = {j for q in uniq for j in members[q][2].clause.zero_members()}
        for j in sorted(t.J[i]):
            t.Pij[(i, j)] = [q for q in uniq if members[q][2].clause.entry(j) == 0]
            t.Rij[(i, j)] = [q for q in uniq if members[q][2].clause.entry(j) == 1]
            t.Aij1[(i, j)] = set.intersection(*(members[q][0] for q in t.Pij[(i, j)]))
            t.Aij0[(i, j)] = set.intersection(*(members[q][1] for q in t.Pij[(i, j)]))
            t.rho[(i, j)] = {}
            for q in t.Pij[(i, j)]:
                sig = members[q][2]
                t.rho[(i, j)][q] = (
                    sig.a if j == sig.clause.first else sig.b
                )
    return t


def _status(values: Iterable[int]) -> str:
    vals = set(values)
    if vals == {1}:
        return "one_consistent"
    if vals == {0}:
        return "zero_consistent"
    return "inconsistent"


def consistency_status(t, i: int, j: Optional[int] = None) -> str:
    """Consistency of a tracked cell (two-level) or term (single-level)."""
    if j is not None:
        return _status(t.rho[(i, j)].values())
    return _status(t.rho[i].values())


def classify_mono_edge(
    t: MonoTranscript, x: BitString, sig: FullSignature, cfg: ClassifierConfig
) -> EdgeClass:
    """Classify the transition ``t -> t + (x, sig)`` before extending.

    Events: E1 -- a tracked term's common-one set loses at least the drop
    threshold; E2 -- same for a tracked clause's common-zero set; E3 (not
    E2) -- a zero-consistent cell turns inconsistent; E4 (not E1/E2) -- a
    one-consistent cell turns inconsistent.  Only the first bad edge on a
    path counts; later calls return the empty class.
    """
    if t.bad_edge is not None:
        return EdgeClass()
    ones = set(x.one_indices())
    zeros = set(x.zero_indices())
    found: list[EdgeClass] = []

    for i in sorted(set(sig.term.members()) & t.I):
        if len(t.A1[i] - ones) >= cfg.mono_drop:
            found.append(EdgeClass("E1", i))
            break
    cells: list[tuple[int, int]] = []
    if sig.term.kind == "unique":
        i = sig.term.first
        cells = [(i, j) for j in sig.clause.zero_members() if (i, j) in t.Pij]
    for (i, j) in cells:
        if len(t.Aij0[(i, j)] - zeros) >= cfg.mono_drop:
            found.append(EdgeClass("E2", i, j))
            break
    kinds = {e.kind for e in found}
    if "E2" not in kinds:
        for (i, j) in cells:
            value = sig.a if j == sig.clause.first else sig.b
            if consistency_status(t, i, j) == "zero_consistent" and value == 1:
                found.append(EdgeClass("E3", i, j))
                break
    if not kinds & {"E1", "E2"}:
        for (i, j) in cells:
            value = sig.a if j == sig.clause.first else sig.b
            if consistency_status(t, i, j) == "one_consistent" and value == 0:
                found.append(EdgeClass("E4", i, j))
                break
    if not found:
        return EdgeClass()
    found.sort(key=lambda e: e.kind)
    first = found[0]
    if len(found) > 1:
        return replace(first, ambiguous=tuple(e.kind for e in found))
    return first


# ---------------------------------------------------------------------------
# Single-level transcripts
# ---------------------------------------------------------------------------


class SingleLevelTranscript:
    """Signature transcript for the single-level families."""

    def __init__(self, n: int):
        self.n = n
        self.queries: list[tuple[BitString, UnateSignature]] = []
        self.I: set[int] = set()
        self.P: dict[int, list[int]] = {}
        self.R: dict[int, list[int]] = {}
        self.A1: dict[int, set[int]] = {}
        self.A0: dict[int, set[int]] = {}
        self.rho: dict[int, dict[int, int]] = {}
        self.bad_edge: Optional[EdgeClass] = None
        self.edge_classes: list[Optional[EdgeClass]] = []

    def __len__(self) -> int:
        return len(self.queries)

    def common_coords(self, i: int) -> set[int]:
        """A_i: coordinates where all members of P_i agree (either value)."""
        return self.A1[i] | self.A0[i]

    def extend(self, x: BitString, sig: UnateSignature) -> None:
        if x.n != self.n:
            raise ValueError(f"query has n={x.n}, transcript has n={self.n}")
        if not isinstance(sig, UnateSignature):
            raise ValueError(f"expected a UnateSignature, got {type(sig).__name__}")
        qidx = len(self.queries)
        self.queries.append((x, sig))
        ones = set(x.one_indices())
        zeros = set(x.zero_indices())
        for i in sig.term.members():
            if i not in self.I:
                self.I.add(i)
                self.P[i] = [qidx]
                self.A1[i] = set(ones)
                self.A0[i] = set(zeros)
                self.rho[i] = {qidx: sig.value_for(i)}
                self.R[i] = [
                    q
                    for q, (_, s) in enumerate(self.queries[:qidx])
                    if s.term.entry(i) == 0
                ]
            else:
                self.P[i].append(qidx)
                self.A1[i] &= ones
                self.A0[i] &= zeros
                self.rho[i][qidx] = sig.value_for(i)
        for i in self.I:
            if sig.term.entry(i) == 0:
                self.R[i].append(qidx)


def induced_single_level_tuple(
    queries: list[tuple[BitString, UnateSignature]],
) -> SingleLevelTranscript:
    """Definitional recomputation, the oracle for incremental updates."""
    if not queries:
        return SingleLevelTranscript(1)
    t = SingleLevelTranscript(queries[0][0].n)
    t.queries = list(queries)
    sigs = [sig for _, sig in queries]
    t.I = {i for s in sigs for i in s.term.members()}
    for i in sorted(t.I):
        t.P[i] = [q for q, s in enumerate(sigs) if s.term.entry(i) == 1]
        t.R[i] = [q for q, s in enumerate(sigs) if s.term.entry(i) == 0]
        t.A1[i] = set.intersection(
            *(set(queries[q][0].one_indices()) for q in t.P[i])
        )
        t.A0[i] = set.intersection(
            *(set(queries[q][0].zero_indices()) for q in t.P[i])
        )
        t.rho[i] = {q: sigs[q].value_for(i) for q in t.P[i]}
    return t


class UnateTranscript(SingleLevelTranscript):
    """Single-level transcript plus breach bookkeeping.

    A tracked term is *breached* once its observed dictator values are
    inconsistent or its agreement set outside ``M`` has shrunk to at most
    the overlap floor (n/10 by default); at that moment the oracle reveals
    its special variable, recorded in ``delta``.
    """

    def __init__(self, n: int, m_members: Iterable[int], breach_overlap: float | None = None):
        super().__init__(n)
        self.M = frozenset(int(i) for i in m_members)
        self.Mbar = frozenset(range(n)) - self.M
        self.breach_overlap = n / 10.0 if breach_overlap is None else breach_overlap
        self.I_B: set[int] = set()
        self.delta: dict[int, int] = {}
        self.breach_events: list[dict[int, int]] = []

    @property
    def I_S(self) -> set[int]:
        return self.I - self.I_B

    def is_breached(self, i: int) -> bool:
        if _status(self.rho[i].values()) == "inconsistent":
            return True
        return len(self.common_coords(i) & self.Mbar) <= self.breach_overlap

    def snapshot(self) -> "UnateTranscript":
        c = UnateTranscript(self.n, self.M, self.breach_overlap)
        c.queries = list(self.queries)
        c.I = set(self.I)
        c.P = {i: list(v) for i, v in self.P.items()}
        c.R = {i: list(v) for i, v in self.R.items()}
        c.A1 = {i: set(v) for i, v in self.A1.items()}
        c.A0 = {i: set(v) for i, v in self.A0.items()}
        c.rho = {i: dict(v) for i, v in self.rho.items()}
        c.I_B = set(self.I_B)
        c.delta = dict(self.delta)
        c.breach_events = [dict(ev) for ev in self.breach_events]
        c.bad_edge = self.bad_edge
        c.edge_classes = list(self.edge_classes)
        return c

    def extend(
        self,
        x: BitString,
        sig: UnateSignature,
        reveal: Mapping[int, int] | Callable[[int], int] | None = None,
    ) -> dict[int, int]:
        """Extend and record newly breached terms.

        ``reveal`` supplies the true special variable of each newly
        breached term (a mapping or a callable); it is required whenever a
        breach actually occurs.  Returns the newly revealed entries.
        """
        super().extend(x, sig)
        newly: dict[int, int] = {}
        for i in sig.term.members():
            if i not in self.I_B and self.is_breached(i):
                if reveal is None:
                    raise ValueError(
                        f"term {i} newly breached but no revelation supplied"
                    )
                k = reveal(i) if callable(reveal) else reveal[i]
                self.I_B.add(i)
                self.delta[i] = int(k)
                newly[i] = int(k)
        self.breach_events.append(dict(newly))
        return newly

    def dump_jsonl(self) -> str:
        """One JSON record per query: point, signature, cumulative tuple
        sizes, breach revelations, and any recorded edge class."""
        import json as _json

        lines = []
        for q, (x, sig) in enumerate(self.queries):
            rec = {
                "x": x.to_json(),
                "signature": sig.to_json(),
                "sizes": {
                    "queries": q + 1,
                    "I": sum(1 for i in self.I if self.P[i][0] <= q),
                    "breached": sum(
                        1 for ev in self.breach_events[: q + 1] for _ in ev
                    ),
                },
            }
            if q < len(self.breach_events) and self.breach_events[q]:
                rec["breach_events"] = {
                    str(i): k for i, k in sorted(self.breach_events[q].items())
                }
            if q < len(self.edge_classes) and self.edge_classes[q] is not None:
                e = self.edge_classes[q]
                rec["edge_class"] = {"kind": e.kind, "i": e.i, "j": e.j}
            lines.append(_json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


def breached_terms(t: UnateTranscript) -> tuple[frozenset, frozenset]:
    """From-scratch (I_B, I_S) split; must equal the incremental sets."""
    breached = frozenset(i for i in t.I if t.is_breached(i))
    return breached, frozenset(t.I) - breached


class UnateSignatureOracle:
    """Stateful oracle for the unateness family.

    Owns the growing transcript; each query returns the signature plus the
    special variables of any newly breached terms, looked up from the true
    instance.
    """

    def __init__(self, inst: UnateInstance, breach_overlap: float | None = None):
        self.inst = inst
        self.transcript = UnateTranscript(inst.n, inst.M, breach_overlap)
        self.queries_used = 0

    def _special_var(self, i: int) -> int:
        return int(self.inst._dict_vars[i])

    def query(self, x: BitString) -> tuple[UnateSignature, dict[int, int]]:
        self.queries_used += 1
        sig = unate_signature(self.inst, x)
        revealed = self.transcript.extend(x, sig, reveal=self._special_var)
        return sig, revealed

    def classify_next(self, x: BitString, cfg: ClassifierConfig) -> EdgeClass:
        """Classify the edge the next query would take, without taking it."""
        sig = unate_signature(self.inst, x)
        return classify_unate_edge(
            self.transcript, x, sig, self._special_var, cfg
        )


class OneLevelSignatureOracle:
    """Stateless signature oracle for the single-level family."""

    def __init__(self, inst: OneLevelInstance):
        self.inst = inst
        self.queries_used = 0

    def query(self, x: BitString) -> UnateSignature:
        self.queries_used += 1
        return onelevel_signature(self.inst, x)


def classify_unate_edge(
    t: UnateTranscript,
    x: BitString,
    sig: UnateSignature,
    reveal: Mapping[int, int] | Callable[[int], int] | None,
    cfg: ClassifierConfig,
) -> EdgeClass:
    """Classify the transition of a unateness transcript before extending.

    Events, tried in priority order: E1 -- the agreement set of a safe
    term drops by at least the threshold; E2 (not E1) -- the breached
    count passes the cap; E3 (not E1/E2) -- two breached terms share a
    special variable.  Returns the empty class past the first bad edge.
    """
    if t.bad_edge is not None:
        return EdgeClass()
    ones = set(x.one_indices())
    zeros = set(x.zero_indices())
    for i in sorted(set(sig.term.members()) & t.I_S):
        drop = len(t.A1[i] - ones) + len(t.A0[i] - zeros)
        if drop >= cfg.unate_drop:
            return EdgeClass("E1", i)
    probe = t.snapshot()
    probe.extend(x, sig, reveal=reveal)
    if len(probe.I_B) > cfg.breach_cap:
        return EdgeClass("E2")
    seen: dict[int, int] = {}
    for i in sorted(probe.I_B):
        k = probe.delta[i]
        if k in seen:
            return EdgeClass("E3", seen[k], i)
        seen[k] = i
    return EdgeClass()


def check_balanced_step(
    t: SingleLevelTranscript,
    x: BitString,
    m_members: Iterable[int] | None = None,
    mode: str = "per_P_i",
    cfg: ClassifierConfig | None = None,
) -> bool:
    """Balance condition for the next query of a unateness tree.

    ``per_P_i`` checks the signature-tree form: for every tracked term,
    if the query disagrees with the members of ``P_i`` on at least the
    delta threshold of their agreement coordinates, then enough of those
    disagreements must be 1-to-0 flips inside ``M``.  ``all_subsets``
    checks the decision-tree form, quantified over subsets of past queries
    up to the configured size cap.  Queries are taken in the normalized
    convention (orientation zero on ``M``).
    """
    cfg = cfg or ClassifierConfig(t.n)
    if m_members is None:
        if isinstance(t, UnateTranscript):
            members = t.M
        else:
            members = frozenset(range(t.n // 2))
    else:
        members = frozenset(int(i) for i in m_members)
    ones = set(x.one_indices())

    if mode == "per_P_i":
        for i in t.I:
            a1, a0 = t.A1[i], t.A0[i]
            delta = (a1 - ones) | (a0 & ones)
            if len(delta) < cfg.balance_delta:
                continue
            delta1 = delta & members & a1
            if len(delta1) < cfg.balance_min_ones:
                return False
        return True

    if mode not in ("all_subsets", "all_subsets_capped"):
        raise ValueError(f"unknown balance mode {mode!r}")
    past = [q for q, _ in t.queries]
    if len(past) > 20:
        raise ResourceLimitError(
            "subset balance enumeration capped at 20 past queries"
        )
    coords = range(t.n)
    for size in range(0, min(len(past), cfg.balance_subset_cap) + 1):
        for subset in combinations(range(len(past)), size):
            pts = [past[q] for q in subset]
            agree = {
                k
                for k in coords
                if len({p[k] for p in pts}) <= 1
            }
            agree_with_x = {k for k in agree if all(p[k] == x[k] for p in pts)}
            delta = agree - agree_with_x
            if len(delta) < cfg.balance_delta:
                continue
            delta1 = {
                k
                for k in delta & members
                if x[k] == 0 and all(p[k] == 1 for p in pts)
            }
            if len(delta1) < cfg.balance_min_ones:
                return False
    return True


class OutcomeReport(NamedTuple):
    label: str  # "good" | "bad"
    reason: Optional[str]  # "inconsistent" | "low_shared_ones"
    i: Optional[int]


def classify_nonadaptive_outcome(
    t: SingleLevelTranscript, cfg: ClassifierConfig
) -> OutcomeReport:
    """Good/bad split for a non-adaptive single-level transcript.

    Bad iff some tracked term has inconsistent observed values, or two of
    its satisfying queries share too few 1-coordinates (at most
    ``n/2 - alpha sqrt(n) log n``).
    """
    for i in sorted(t.I):
        if _status(t.rho[i].values()) == "inconsistent":
            return OutcomeReport("bad", "inconsistent", i)
    floor = cfg.shared_ones
    for i in sorted(t.I):
        pts = [t.queries[q][0] for q in t.P[i]]
        for a, b in combinations(pts, 2):
            if (a.bits & b.bits).bit_count() <= floor:
                return OutcomeReport("bad", "low_shared_ones", i)
    return OutcomeReport("good", None, None)
