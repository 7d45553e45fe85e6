"""Exact and estimated distances to monotonicity and unateness.

Exact distance to monotone is the size of a maximum matching in the
violating-pair graph divided by ``2**n`` (computed with Hopcroft-Karp via
scipy on the bipartite split 1-side vs 0-side); exact distance to unate
minimizes that over all orientations.  The directional-edge lower bound
selects globally vertex-disjoint monotone/anti-monotone edge families
greedily, so it is always a certified lower bound, never an estimate of
the optimum.

The Monte-Carlo side estimates the density of the disjoint-violating-edge
witness set of no-world two-level instances and the per-direction
bi-chromatic edge families of no-world unateness instances, with plain
Bernoulli confidence intervals; exhaustive counterparts exist at desk
scale for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import BitString, ResourceLimitError, RngStream
from .families import MonoInstance, UnateInstance, _points_matrix

__all__ = [
    "FarnessEstimate",
    "UnateFamilyStats",
    "count_violating_edges",
    "exact_dist_mono",
    "exact_dist_unate",
    "directional_edge_counts",
    "unate_dist_lower_bound",
    "witness_edge_at",
    "witness_edge_family",
    "exhaustive_witness_density",
    "estimate_witness_density",
    "middle_layer_indices",
    "sample_middle_layer",
    "sample_middle_layer_exact",
    "unate_no_family_stats",
]

MONO_EXACT_CAP = 14
UNATE_EXACT_CAP = 10
EDGE_ENUM_CAP = 24


@dataclass(frozen=True)
class FarnessEstimate:
    """Bernoulli point estimate with a normal-approximation 95% interval."""

    estimate: float
    samples: Optional[int]
    ci_halfwidth: float
    seed: Optional[int] = None

    @staticmethod
    def from_hits(hits: int, samples: int, seed: Optional[int] = None) -> "FarnessEstimate":
        if samples <= 0:
            raise ValueError("samples must be positive")
        p = hits / samples
        half = 1.96 * math.sqrt(p * (1.0 - p) / samples)
        return FarnessEstimate(p, samples, half, seed)

    @staticmethod
    def exact(value: float) -> "FarnessEstimate":
        return FarnessEstimate(value, None, 0.0, None)


def _dim_of(table: np.ndarray) -> int:
    n = int(round(math.log2(len(table))))
    if 1 << n != len(table):
        raise ValueError(f"table length {len(table)} is not a power of two")
    return n


def count_violating_edges(table: np.ndarray, n: Optional[int] = None) -> int:
    """Number of hypercube edges with value 1 below and 0 above."""
    n = n if n is not None else _dim_of(table)
    idx = np.arange(1 << n, dtype=np.int64)
    total = 0
    for i in range(n):
        lower = idx[(idx >> i) & 1 == 0]
        total += int((table[lower] > table[lower | (1 << i)]).sum())
    return total


def _violating_pairs(table: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """All comparable pairs (x below, y above) with f(x)=1, f(y)=0."""
    tb = bytes(bytearray(table))
    rows: list[int] = []
    cols: list[int] = []
    for y in range(1 << n):
        if tb[y]:
            continue
        s = (y - 1) & y
        while True:
            if tb[s]:
                rows.append(s)
                cols.append(y)
            if s == 0:
                break
            s = (s - 1) & y
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
    )


def exact_dist_mono(
    table: np.ndarray, n: Optional[int] = None, cap: int = MONO_EXACT_CAP
) -> Fraction:
    """Distance to monotone: maximum disjoint violating pairs over 2**n."""
    n = n if n is not None else _dim_of(table)
    if n > cap:
        raise ResourceLimitError(f"exact distance capped at n={cap}, got {n}")
    rows, cols = _violating_pairs(table, n)
    if len(rows) == 0:
        return Fraction(0, 1)
    left, row_ids = np.unique(rows, return_inverse=True)
    right, col_ids = np.unique(cols, return_inverse=True)
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (row_ids, col_ids)),
        shape=(len(left), len(right)),
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    return Fraction(int((match != -1).sum()), 1 << n)


def exact_dist_unate(
    table: np.ndarray, n: Optional[int] = None, cap: int = UNATE_EXACT_CAP
) -> Fraction:
    """Distance to unate: min over orientations of the distance to monotone."""
    n = n if n is not None else _dim_of(table)
    if n > cap:
        raise ResourceLimitError(f"exact unate distance capped at n={cap}, got {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    best: Optional[Fraction] = None
    for r in range(1 << n):
        d = exact_dist_mono(table[idx ^ r], n, cap=max(cap, MONO_EXACT_CAP))
        if best is None or d < best:
            best = d
            if best == 0:
                break
    return best


def directional_edge_counts(
    table: np.ndarray, n: Optional[int] = None
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per direction, the lower endpoints of monotone / anti-monotone
    bi-chromatic edges (lower endpoint = the one with bit i clear)."""
    n = n if n is not None else _dim_of(table)
    idx = np.arange(1 << n, dtype=np.int64)
    out = []
    for i in range(n):
        lower = idx[(idx >> i) & 1 == 0]
        up = table[lower | (1 << i)]
        lo = table[lower]
        mono = lower[(lo == 0) & (up == 1)]
        anti = lower[(lo == 1) & (up == 0)]
        out.append((mono, anti))
    return out


def unate_dist_lower_bound(table: np.ndarray, n: Optional[int] = None) -> Fraction:
    """Certified lower bound on the distance to unate.

    Greedily selects, direction by direction (largest potential first), a
    globally vertex-disjoint family of monotone and anti-monotone
    bi-chromatic edges and sums the per-direction minima.  Greedy
    selection may be suboptimal, so the result is only ever used as a
    lower bound.
    """
    n = n if n is not None else _dim_of(table)
    if n > EDGE_ENUM_CAP:
        raise ResourceLimitError(f"edge enumeration capped at n={EDGE_ENUM_CAP}")
    sets = directional_edge_counts(table, n)
    order = sorted(
        range(n), key=lambda i: min(len(sets[i][0]), len(sets[i][1])), reverse=True
    )
    used = np.zeros(1 << n, dtype=bool)
    total = 0
    for i in order:
        mono, anti = sets[i]
        bit = 1 << i
        free_mono = [x for x in mono if not used[x] and not used[x | bit]]
        free_anti = [x for x in anti if not used[x] and not used[x | bit]]
        take = min(len(free_mono), len(free_anti))
        if take == 0:
            continue
        for x in free_mono[:take]:
            used[x] = used[x | bit] = True
        for x in free_anti[:take]:
            used[x] = used[x | bit] = True
        total += take
    return Fraction(total, 1 << n)


# ---------------------------------------------------------------------------
# Disjoint violating edges of no-world two-level instances
# ---------------------------------------------------------------------------


def witness_edge_at(
    inst: MonoInstance, x: BitString
) -> Optional[tuple[BitString, BitString]]:
    """Witness edge at ``x``, when ``x`` belongs to the witness set.

    Membership requires: middle layers; the multiplexer routes to a cell;
    the function value is 1 (so the cell's anti-dictator variable ``k``
    has ``x_k = 0``); ``k`` avoids the cell's clause; and no other term is
    satisfied once ``k`` is flipped to 1.  The returned pair
    ``(x, x^(k))`` then re-verifies as a violating edge, and distinct
    members yield disjoint edges.
    """
    if inst.world != "no":
        raise ValueError("the witness set is defined for no-world instances")
    if inst.weight_class(x) != "middle":
        return None
    r = inst.route(x)
    if r.kind != "cell":
        return None
    k = int(inst.dict_row(r.i)[r.j])
    if x[k] != 0:  # anti-dictator reads 0 here, so f(x) = 0
        return None
    if k in inst.clause_block(r.i)[r.j]:
        return None
    xstar = x.flip_one(k)
    if inst.satisfied_terms(xstar, limit=2) != [r.i]:
        return None
    return (x, xstar)


def middle_layer_indices(n: int, band_low: float, band_high: float) -> np.ndarray:
    """Indices of all points with weight inside the band (ascending)."""
    if n > 20:
        raise ResourceLimitError("middle-layer enumeration capped at n=20")
    w = _points_matrix(n).sum(axis=1)
    return np.flatnonzero((w >= band_low) & (w <= band_high))


def _witness_scan(inst: MonoInstance) -> tuple[int, list[tuple[BitString, BitString]]]:
    """Vectorized exhaustive scan of the witness set over the middle layers."""
    n = inst.n
    X = _points_matrix(n)
    mid = middle_layer_indices(n, inst.band_low, inst.band_high)
    sub = X[mid]

    count = np.zeros(len(mid), dtype=np.uint8)
    first = np.full(len(mid), -1, dtype=np.int32)
    for i in range(inst.N):
        sat = sub[:, inst._terms[i]].all(axis=1)
        newly = sat & (count == 0)
        first[newly] = i
        count[sat & (count < 2)] += 1
    unique = count == 1

    members: list[tuple[BitString, BitString]] = []
    for i in np.unique(first[unique]):
        rows = np.flatnonzero(unique & (first == i))
        blk = inst.clause_block(int(i))
        satc = sub[rows][:, blk.reshape(-1)].reshape(len(rows), inst.N, inst.m)
        fals = ~satc.any(axis=2)
        fcount = fals.sum(axis=1)
        pick = np.flatnonzero(fcount == 1)
        if not len(pick):
            continue
        js = fals[pick].argmax(axis=1)
        dict_row = inst.dict_row(int(i))
        for row, j in zip(pick, js):
            gidx = int(mid[rows[row]])
            k = int(dict_row[j])
            x = BitString(n, gidx)
            if x[k] != 0:
                continue
            if k in blk[j]:
                continue
            xstar = x.flip_one(k)
            if inst.satisfied_terms(xstar, limit=2) != [int(i)]:
                continue
            members.append((x, xstar))
    return len(mid), members


def witness_edge_family(inst: MonoInstance) -> list[tuple[BitString, BitString]]:
    """All witness edges, by exhaustive middle-layer scan (n <= 20)."""
    return _witness_scan(inst)[1]


def exhaustive_witness_density(inst: MonoInstance) -> float:
    """Exact Pr over uniform middle-layer points of witness membership."""
    total, members = _witness_scan(inst)
    return len(members) / total


def sample_middle_layer(n: int, band_low: float, band_high: float, rng: RngStream) -> BitString:
    """Uniform middle-layer point by rejection from the uniform cube."""
    while True:
        x = BitString.random(n, rng)
        if band_low <= x.weight <= band_high:
            return x


def sample_middle_layer_exact(
    n: int, band_low: float, band_high: float, rng: RngStream
) -> BitString:
    """Exact layer-weighted middle sampling for small n (no rejection):
    draws an index uniformly from the enumerated band."""
    idx = middle_layer_indices(n, band_low, band_high)
    return BitString(n, int(idx[rng.randint0(len(idx))]))


def estimate_witness_density(
    inst: MonoInstance, samples: int, rng: RngStream | None = None, seed: int = 0
) -> FarnessEstimate:
    """Monte-Carlo witness-membership probability over middle-layer points."""
    if samples <= 0:
        raise ValueError(f"samples must be positive, got {samples}")
    rng = rng or RngStream(seed, "witness-estimate")
    hits = 0
    for _ in range(samples):
        x = sample_middle_layer(inst.n, inst.band_low, inst.band_high, rng)
        if witness_edge_at(inst, x) is not None:
            hits += 1
    return FarnessEstimate.from_hits(hits, samples, seed=rng.master_seed)


# ---------------------------------------------------------------------------
# Per-direction families of no-world unateness instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnateFamilyStats:
    """Per-special-variable densities of the monotone/anti-monotone halves.

    ``plus[k]`` estimates the density of points routed to a term with
    special variable ``k`` where the edge ``(x, x^(k))`` is monotone
    bi-chromatic, ``minus[k]`` the anti-monotone side; ``min_sum`` is the
    resulting farness lower-bound estimate.
    """

    plus: dict[int, FarnessEstimate]
    minus: dict[int, FarnessEstimate]
    min_sum: float
    samples: Optional[int]


def _unate_point_class(inst: UnateInstance, y: BitString) -> Optional[tuple[int, str]]:
    """(special variable, side) of a de-oriented point, if it is in X with
    value 0; side '+' when y_k = 0, '-' when y_k = 1."""
    if inst.band_class_base(y) != "middle":
        return None
    r = inst.route_base(y)
    if r.kind != "term":
        return None
    k = int(inst._dict_vars[r.i])
    if inst.base_value(y) != 0:
        return None
    return (k, "+" if y[k] == 0 else "-")


def unate_no_family_stats(
    inst: UnateInstance,
    samples: int = 0,
    rng: RngStream | None = None,
    seed: int = 0,
    exhaustive: bool = False,
) -> UnateFamilyStats:
    """Densities of the per-direction witness families of the de-oriented
    function (orientation leaves the distance to unate unchanged)."""
    mbar = sorted(int(k) for k in inst.Mbar_sorted)
    if exhaustive:
        if inst.n > 20:
            raise ResourceLimitError("exhaustive scan capped at n=20")
        X = _points_matrix(inst.n)
        wM = X[:, inst.M_sorted].sum(axis=1)
        mid = (wM >= inst.band_low) & (wM <= inst.band_high)
        count = np.zeros(len(X), dtype=np.uint8)
        first = np.full(len(X), -1, dtype=np.int32)
        for i in range(inst.N):
            mem = np.flatnonzero(inst._masks[i])
            sat = X[:, mem].all(axis=1) if len(mem) else np.ones(len(X), bool)
            newly = sat & (count == 0)
            first[newly] = i
            count[sat & (count < 2)] += 1
        rows = np.flatnonzero(mid & (count == 1))
        terms = first[rows]
        ks = inst._dict_vars[terms]
        vals = X[rows, ks].astype(np.uint8)
        neg = inst._dict_negated[terms]
        fvals = np.where(neg, 1 - vals, vals)
        size = 1 << inst.n
        plus = {}
        minus = {}
        total_min = 0.0
        for k in mbar:
            sel = (ks == k) & (fvals == 0)
            p = int((sel & (X[rows, k] == 0)).sum())
            m = int((sel & (X[rows, k] == 1)).sum())
            plus[k] = FarnessEstimate.exact(p / size)
            minus[k] = FarnessEstimate.exact(m / size)
            total_min += min(p, m) / size
        return UnateFamilyStats(plus, minus, total_min, None)

    if samples <= 0:
        raise ValueError(f"samples must be positive, got {samples}")
    rng = rng or RngStream(seed, "unate-family-stats")
    hits_plus = {k: 0 for k in mbar}
    hits_minus = {k: 0 for k in mbar}
    for _ in range(samples):
        y = BitString.random(inst.n, rng)
        cls = _unate_point_class(inst, y)
        if cls is None:
            continue
        k, side = cls
        if side == "+":
            hits_plus[k] += 1
        else:
            hits_minus[k] += 1
    plus = {k: FarnessEstimate.from_hits(hits_plus[k], samples) for k in mbar}
    minus = {k: FarnessEstimate.from_hits(hits_minus[k], samples) for k in mbar}
    total_min = sum(
        min(hits_plus[k], hits_minus[k]) / samples for k in mbar
    )
    return UnateFamilyStats(plus, minus, total_min, samples)
