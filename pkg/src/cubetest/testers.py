"""Query-bounded testing algorithms and violation witnesses.

All testers are honest black-box algorithms over the standard value
oracle: they see bits only, never signatures or instance internals, and
they reject only after re-verifying a concrete witness against the oracle
(from cache, so verification costs no extra queries).  That makes them
one-sided by construction: no monotone function can ever be rejected.

The two staged attacks walk the structure of the hard families: shrink
the candidate set of the satisfied term by flipping 1-blocks, cover the
0-side in blocks to localize the hidden anti-dictator variable, then
split the hit block to exhibit a violating pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Optional, Sequence

from .core import BitString, ResourceLimitError, RngStream

__all__ = [
    "BudgetExhaustedError",
    "CountingOracle",
    "TesterConfig",
    "MonoPairWitness",
    "DirectionalUnateWitness",
    "OrientationMapWitness",
    "Verdict",
    "edge_tester",
    "flipped_dnf_attack",
    "two_level_attack",
    "has_unate_violation",
    "check_orientation",
    "find_good_orientation",
    "OrientationNotFoundError",
]


class BudgetExhaustedError(RuntimeError):
    """Internal signal: the query budget ran out mid-run."""


class CountingOracle:
    """Caching, counting wrapper around a value oracle.

    Fresh evaluations count against the budget; repeated queries (in
    particular witness re-verification) are served from cache for free.
    """

    def __init__(self, fn: Callable[[BitString], int], budget: Optional[int] = None):
        self._fn = fn
        self.budget = budget
        self.queries_used = 0
        self.cache: dict[BitString, int] = {}

    def __call__(self, x: BitString) -> int:
        hit = self.cache.get(x)
        if hit is not None:
            return hit
        if self.budget is not None and self.queries_used >= self.budget:
            raise BudgetExhaustedError()
        self.queries_used += 1
        v = int(self._fn(x))
        self.cache[x] = v
        return v


@dataclass
class TesterConfig:
    """Budget, distance parameter, seed, and per-stage size overrides."""

    __test__ = False  # not a pytest collection target

    q: int
    eps: float = 0.125
    seed: int = 0
    stage_overrides: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"query budget must be >= 1, got {self.q}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must be in (0,1), got {self.eps}")

    def stage(self, name: str, default: int) -> int:
        return int(self.stage_overrides.get(name, default))


@dataclass(frozen=True)
class MonoPairWitness:
    """A violating pair: ``lower`` strictly below ``upper`` with values 1/0."""

    lower: BitString
    upper: BitString

    def verify(self, oracle: Callable[[BitString], int]) -> bool:
        return (
            self.lower.precedes(self.upper)
            and oracle(self.lower) == 1
            and oracle(self.upper) == 0
        )

    def to_json(self) -> dict:
        return {
            "kind": "mono_pair",
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
        }


@dataclass(frozen=True)
class DirectionalUnateWitness:
    """Both edge polarities observed in one direction.

    ``increasing`` is a monotone bi-chromatic edge (lower endpoint value
    0), ``decreasing`` an anti-monotone one; having both in the same
    direction rules out every orientation at once.
    """

    direction: int
    increasing: tuple[BitString, BitString]
    decreasing: tuple[BitString, BitString]

    def verify(self, labels: dict[BitString, int]) -> bool:
        (a, b), (c, d) = self.increasing, self.decreasing
        return (
            a.flip_one(self.direction) == b
            and c.flip_one(self.direction) == d
            and a[self.direction] == 0
            and c[self.direction] == 0
            and labels[a] == 0
            and labels[b] == 1
            and labels[c] == 1
            and labels[d] == 0
        )

    def to_json(self) -> dict:
        return {
            "kind": "unate_per_direction",
            "direction": self.direction + 1,
            "increasing": [p.to_json() for p in self.increasing],
            "decreasing": [p.to_json() for p in self.decreasing],
        }


@dataclass(frozen=True)
class OrientationMapWitness:
    """Exhaustive certificate: a violating pair for every orientation of
    the relevant coordinates (coordinates where the query set varies)."""

    coords: tuple[int, ...]
    pairs: dict[int, tuple[BitString, BitString]]


@dataclass
class Verdict:
    """Tester output; a reject always carries a verified witness."""

    decision: str  # "accept" | "reject"
    witness: Optional[object]
    queries_used: int
    stage_queries: dict[str, int] = field(default_factory=dict)
    seed: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "decision": self.decision,
            "witness": self.witness.to_json() if self.witness else None,
            "queries_used": self.queries_used,
            "stage_queries": self.stage_queries,
            "seed": self.seed,
        }


def _accept(oracle: CountingOracle, stages: dict[str, int], seed: int) -> Verdict:
    return Verdict("accept", None, oracle.queries_used, stages, seed)


def _reject(
    oracle: CountingOracle,
    witness: MonoPairWitness,
    stages: dict[str, int],
    seed: int,
) -> Verdict:
    if not witness.verify(oracle):
        raise AssertionError("refusing to reject: witness failed re-verification")
    return Verdict("reject", witness, oracle.queries_used, stages, seed)


def _random_point(n: int, rng: RngStream) -> BitString:
    return BitString.random(n, rng)


def _random_weight_window(n: int, rng: RngStream, lo: float, hi: float) -> BitString:
    """Uniform point conditioned on a weight window (rejection; no queries)."""
    while True:
        x = BitString.random(n, rng)
        if lo <= x.weight <= hi:
            return x


def _seed_window(n: int, cfg: TesterConfig) -> tuple[int, int]:
    """Seed weights sit just above the band center: the multiplexer is
    balanced there (a unique satisfied term is likeliest), while
    sqrt(n)-sized down-flips still cannot leave the middle layers."""
    lo = cfg.stage("seed_weight_low", math.ceil(n / 2))
    hi = cfg.stage("seed_weight_high", math.ceil(n / 2) + 2)
    return lo, hi


def edge_tester(fn: Callable[[BitString], int], n: int, cfg: TesterConfig) -> Verdict:
    """The classical edge tester: random point, random direction, reject
    on a violating edge.  Runs ``q/2`` rounds (two queries per round)."""
    oracle = CountingOracle(fn, budget=cfg.q)
    rng = RngStream(cfg.seed, "edge-tester")
    stages = {"rounds": 0}
    try:
        for _ in range(cfg.q // 2):
            stages["rounds"] += 1
            x = _random_point(n, rng)
            i = rng.randint0(n)
            y = x.flip_one(i)
            lower, upper = (x, y) if x[i] == 0 else (y, x)
            if oracle(lower) == 1 and oracle(upper) == 0:
                return _reject(oracle, MonoPairWitness(lower, upper), stages, cfg.seed)
    except BudgetExhaustedError:
        pass
    return _accept(oracle, stages, cfg.seed)


def _shrink_pass(
    oracle: CountingOracle,
    base: BitString,
    pool: list[int],
    rounds: int,
    piece: int,
    keep_value: int,
    rng: RngStream,
) -> list[int]:
    """Flip random ``piece``-sized subsets of ``pool`` on top of ``base``;
    whenever the value stays ``keep_value`` the flipped coordinates are
    declared safe, removed from the pool, and collected."""
    removed: list[int] = []
    current = list(pool)
    for _ in range(rounds):
        if len(current) < piece:
            break
        chosen = rng.sample_without_replacement(current, piece)
        if oracle(base.flip(chosen)) == keep_value:
            chosen_set = set(chosen)
            current = [c for c in current if c not in chosen_set]
            removed.extend(sorted(chosen))
    return removed


def flipped_dnf_attack(fn: Callable[[BitString], int], n: int, cfg: TesterConfig) -> Verdict:
    """Three-stage violation search against flipped-DNF style functions.

    Stage 1 shrinks the 1-side: random sqrt(n)-subsets of the seed's
    1-coordinates whose flip keeps the value 1 are safe to flip later.
    Stage 2 covers the 0-side in blocks, flipped together with the safe
    set to stay in the middle layers; a block answering 0 localizes the
    hidden negated variable.  Stage 3 splits that block into sqrt(n)
    pieces, looking for a point below the hit that still evaluates to 1.
    """
    oracle = CountingOracle(fn, budget=cfg.q)
    rng = RngStream(cfg.seed, "flipped-dnf-attack")
    m = max(1, math.isqrt(n))
    w_lo, w_hi = _seed_window(n, cfg)
    stages: dict[str, int] = {}
    try:
        x = None
        for _ in range(cfg.stage("seed_tries", 200)):
            cand = _random_weight_window(n, rng, w_lo, w_hi)
            if oracle(cand) == 1:
                x = cand
                break
        stages["seed"] = oracle.queries_used
        if x is None:
            return _accept(oracle, stages, cfg.seed)

        a1 = sorted(x.one_indices())
        rounds = cfg.stage("stage1_rounds", math.ceil(n**0.25))
        piece1 = cfg.stage("stage1_piece", m)
        safe_ones = _shrink_pass(oracle, x, a1, rounds, piece1, 1, rng)
        stages["stage1"] = oracle.queries_used
        if not safe_ones:
            return _accept(oracle, stages, cfg.seed)

        a0 = sorted(x.zero_indices())
        rng.shuffle(a0)
        block = len(safe_ones)
        for lo in range(0, len(a0), block):
            part = a0[lo : lo + block]
            y = x.flip(part + safe_ones)
            if oracle(y) != 0:
                continue
            pieces = [part[p : p + m] for p in range(0, len(part), m)]
            for piece in pieces:
                z = y.flip(piece)
                if oracle(z) == 1 and z.precedes(y):
                    stages["stage3"] = oracle.queries_used
                    return _reject(
                        oracle, MonoPairWitness(z, y), stages, cfg.seed
                    )
        stages["stage2"] = oracle.queries_used
    except BudgetExhaustedError:
        pass
    return _accept(oracle, stages, cfg.seed)


def two_level_attack(
    fn: Callable[[BitString], int], n: int, cfg: TesterConfig
) -> Verdict:
    """Four-stage violation search against the two-level family.

    Stage 1 shrinks the 1-side as in :func:`flipped_dnf_attack`.  Each outer
    round then: picks a 0-block matched in size to the safe 1-set (so the
    flip stays in the middle layers) hoping to land on value 0 inside a
    single cell (stage 2); shrinks the remaining 0-side to find
    coordinates that can be flipped up without leaving the cell's clause
    (stage 3); and covers the 0-block in pieces flipped together with
    those safe coordinates (stage 4).  A piece answering 1 is accepted
    only on a majority over independently rebuilt safe sets (new clause
    hits re-randomize; the hidden negated variable persists), then split
    to exhibit the violating pair.
    """
    oracle = CountingOracle(fn, budget=cfg.q)
    rng = RngStream(cfg.seed, "two-level-attack")
    m = max(1, math.isqrt(n))
    lo_band = n / 2 - math.sqrt(n)
    hi_band = n / 2 + math.sqrt(n)
    w_lo, w_hi = _seed_window(n, cfg)
    stages: dict[str, int] = {}
    try:
        x = None
        for _ in range(cfg.stage("seed_tries", 200)):
            cand = _random_weight_window(n, rng, w_lo, w_hi)
            if oracle(cand) == 1:
                x = cand
                break
        stages["seed"] = oracle.queries_used
        if x is None:
            return _accept(oracle, stages, cfg.seed)

        # Stage sizes: the repetition counts keep the sketch's exponents but
        # carry calibrated multipliers -- at desk-scale n the survival
        # probability of a sqrt(n)-sized flip is a small constant, so the
        # bare counts collect far too few safe coordinates.  Pieces smaller
        # than sqrt(n) trade queries for per-flip survival.
        a1 = sorted(x.one_indices())
        rounds1 = cfg.stage("stage1_rounds", math.ceil(8 * n ** (1.0 / 3.0)))
        piece1 = cfg.stage("stage1_piece", max(2, m // 2))
        c1 = _shrink_pass(oracle, x, a1, rounds1, piece1, 1, rng)
        stages["stage1"] = oracle.queries_used
        if not c1:
            return _accept(oracle, stages, cfg.seed)

        outer = cfg.stage("outer_rounds", 4 * math.ceil(n ** (1.0 / 6.0)))
        c0_target = cfg.stage("c0_size", math.ceil(n ** (5.0 / 6.0)))
        rounds3 = cfg.stage("stage3_rounds", math.ceil(n ** (2.0 / 3.0)))
        piece3 = cfg.stage("stage3_piece", max(2, m // 3))
        parts = cfg.stage("stage4_parts", 2 * math.ceil(n ** (1.0 / 6.0)) + 2)
        final_piece = cfg.stage("final_piece", max(2, m // 4))
        majority = cfg.stage("majority_reps", 3)
        # drop y slightly below the band center so the later up-flips
        # (stage 3 shrink passes, final pieces) stay inside the band
        y_target = n // 2 - max(1, m // 3)

        for _ in range(outer):
            a0 = sorted(x.zero_indices())
            # |y| = |x| - |C1| + |C0|; aim for y_target within band limits
            wanted = len(c1) + y_target - x.weight
            hi_allowed = len(c1) + math.floor(hi_band - x.weight)
            lo_needed = max(1, len(c1) - math.floor(x.weight - lo_band))
            size = min(c0_target, len(a0), hi_allowed, max(wanted, lo_needed))
            if size < lo_needed:
                continue
            c0 = rng.sample_without_replacement(a0, size)
            y = x.flip(c0 + c1)
            if oracle(y) != 0:
                continue

            pool = sorted(set(a0) - set(c0))
            c = _shrink_pass(oracle, y, pool, rounds3, piece3, 0, rng)
            block = max(1, math.ceil(len(c0) / parts))
            c0_shuffled = list(c0)
            rng.shuffle(c0_shuffled)
            for lo in range(0, len(c0_shuffled), block):
                part = c0_shuffled[lo : lo + block]
                w = y.flip(part + c)
                if oracle(w) != 1:
                    continue
                votes = 1
                for _rep in range(majority - 1):
                    c_rep = _shrink_pass(oracle, y, pool, rounds3, piece3, 0, rng)
                    if oracle(y.flip(part + c_rep)) == 1:
                        votes += 1
                if 2 * votes <= majority:
                    continue
                for p in range(0, len(part), final_piece):
                    piece = part[p : p + final_piece]
                    z = w.flip(piece)
                    if oracle(z) == 0 and w.precedes(z):
                        stages["stage4"] = oracle.queries_used
                        return _reject(
                            oracle, MonoPairWitness(w, z), stages, cfg.seed
                        )
        stages["outer"] = oracle.queries_used
    except BudgetExhaustedError:
        pass
    return _accept(oracle, stages, cfg.seed)


# ---------------------------------------------------------------------------
# Unateness violations over labeled query sets
# ---------------------------------------------------------------------------


def has_unate_violation(
    labeled: Sequence[tuple[BitString, int]],
    mode: str = "directional_edges",
    cap: int = 20,
):
    """Violation-to-unateness detection over a labeled query set.

    ``exact_orientations`` decides the definition itself: a violating
    pair must exist for *every* orientation; only coordinates on which
    the query set is non-constant matter, and those are enumerated (up to
    ``cap`` of them).  ``directional_edges`` is the sound sufficient
    check: some direction exhibits both a monotone and an anti-monotone
    bi-chromatic edge.  Returns a witness object or None.
    """
    points = [x for x, _ in labeled]
    values = {x: int(v) for x, v in labeled}
    if not points:
        return None
    n = points[0].n

    if mode == "directional_edges":
        inc: dict[int, tuple[BitString, BitString]] = {}
        dec: dict[int, tuple[BitString, BitString]] = {}
        for a in points:
            for b in points:
                d = a.bits ^ b.bits
                if d == 0 or d & (d - 1):
                    continue
                i = d.bit_length() - 1
                if a[i] != 0:
                    continue
                if values[a] == 0 and values[b] == 1:
                    inc.setdefault(i, (a, b))
                elif values[a] == 1 and values[b] == 0:
                    dec.setdefault(i, (a, b))
                if i in inc and i in dec:
                    return DirectionalUnateWitness(i, inc[i], dec[i])
        return None

    if mode != "exact_orientations":
        raise ValueError(f"unknown mode {mode!r}")
    varying = [
        k
        for k in range(n)
        if len({p[k] for p in points}) > 1
    ]
    if len(varying) > cap:
        raise ResourceLimitError(
            f"{len(varying)} varying coordinates exceed the exact cap {cap}"
        )
    ones = [p for p in points if values[p] == 1]
    zeros = [p for p in points if values[p] == 0]
    # pair (x, y) is ordered under r iff r agrees with x on their
    # difference mask: (r ^ x) & diff == 0
    cands = [
        (x, y, x.bits ^ y.bits)
        for x in ones
        for y in zeros
        if x.bits != y.bits
    ]
    if not cands:
        return None
    pairs: dict[int, tuple[BitString, BitString]] = {}
    for assignment in product((0, 1), repeat=len(varying)):
        r = 0
        for k, bit in zip(varying, assignment):
            r |= bit << k
        hit = None
        for x, y, diff in cands:
            if (r ^ x.bits) & diff == 0:
                hit = (x, y)
                break
        if hit is None:
            return None
        pairs[r] = hit
    return OrientationMapWitness(tuple(varying), pairs)


def check_orientation(
    points: Iterable[BitString], r: BitString, n: int, log_base: float = 2.0
) -> bool:
    """True iff every pair comparable after XOR with ``r`` is within
    Hamming distance ``2 log n``."""
    pts = list(points)
    limit = 2.0 * math.log(n) / math.log(log_base)
    for idx, a in enumerate(pts):
        ar = a.xor(r)
        for b in pts[idx + 1 :]:
            br = b.xor(r)
            if ar.precedes(br) or br.precedes(ar):
                if (a.bits ^ b.bits).bit_count() > limit:
                    return False
    return True


class OrientationNotFoundError(RuntimeError):
    def __init__(self, tries: int):
        super().__init__(f"no good orientation within {tries} tries")
        self.tries = tries


def find_good_orientation(
    points: Sequence[BitString], rng: RngStream, max_tries: int = 200
) -> tuple[BitString, int]:
    """Rejection-sample an orientation passing :func:`check_orientation`.

    Returns ``(r, tries)``; raises :class:`OrientationNotFoundError` when
    the budget runs out.
    """
    if not points:
        raise ValueError("need at least one point")
    n = points[0].n
    for t in range(1, max_tries + 1):
        r = BitString.random(n, rng)
        if check_orientation(points, r, n):
            return r, t
    raise OrientationNotFoundError(max_tries)
