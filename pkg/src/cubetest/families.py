"""Random Boolean function families and their standard value oracles.

Five families are implemented, all reproducible from a 64-bit seed:

* :class:`MonoInstance` -- the two-level family: a DNF of ``N`` random
  terms, each gated by a CNF of ``N`` random clauses, each cell holding a
  dictator (yes world) or anti-dictator (no world), with weight truncation
  outside the middle layers.
* :class:`FlippedDnfInstance` -- a truncated random DNF of monotone terms; the
  no world evaluates it after flipping a sparse random coordinate set.
* :class:`OneLevelInstance` -- the single-level multiplexer variant used
  for non-adaptive monotonicity experiments.
* :class:`UnateInstance` -- the unateness family: terms over a hidden
  half ``M`` of the coordinates, per-term dictators on the complement, and
  a random orientation XORed into every query.
* :class:`QuadrantInstance` -- the four-quadrant function on ``n+2`` coordinates
  used for one-sided non-adaptive unateness experiments.

Instances are immutable after sampling (lazy derivation caches are
internal memoization only); evaluation is a pure function of the query, so
parallel query evaluation is safe.

Storage: ``lazy`` instances derive terms, clauses, and dictators on demand
from ``(seed, role, index)`` via counter-based generators, which is what
makes dimensions with ``N**2`` clause cells feasible; ``explicit``
instances materialize every array (and serialize them).  Both storages
derive each object through the same keyed generator, so they agree bit for
bit for equal seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .core import (
    BitString,
    IndexSet,
    ResourceLimitError,
    derive_generator,
)

__all__ = [
    "Term",
    "Clause",
    "Dictator",
    "Route",
    "MonoInstance",
    "FlippedDnfInstance",
    "OneLevelInstance",
    "UnateInstance",
    "QuadrantInstance",
    "instance_from_json",
    "truth_table",
]

TABLE_CAP = 20  # largest dimension for explicit truth tables (2**20 entries)
EXPLICIT_CELL_CAP = 1 << 22  # largest N**2 for explicit two-level storage

_WORLDS = ("yes", "no")


def _check_world(world: str) -> str:
    if world not in _WORLDS:
        raise ValueError(f"world must be 'yes' or 'no', got {world!r}")
    return world


def _is_square(n: int) -> bool:
    return math.isqrt(n) ** 2 == n


@lru_cache(maxsize=4)
def _points_matrix(n: int) -> np.ndarray:
    """All points of {0,1}^n as a (2**n, n) boolean matrix, row = index."""
    idx = np.arange(1 << n, dtype=np.uint32)
    out = ((idx[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(bool)
    out.setflags(write=False)
    return out


def _require_table_cap(n: int) -> None:
    if n > TABLE_CAP:
        raise ResourceLimitError(
            f"truth table needs 2**{n} entries; cap is 2**{TABLE_CAP}"
        )


# ---------------------------------------------------------------------------
# Views over the sampled pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """A monotone conjunction.

    ``sequence`` style holds exactly ``len(vars)`` sampled positions with
    duplicates allowed; ``subset`` style holds a set of distinct members.
    An empty subset term is the empty conjunction and is satisfied by
    every point.
    """

    n: int
    vars: tuple[int, ...]
    style: str = "sequence"

    def satisfied_by(self, x: BitString) -> bool:
        return all(x[v] for v in self.vars)


@dataclass(frozen=True)
class Clause:
    """A monotone disjunction of sampled positions (duplicates allowed)."""

    n: int
    vars: tuple[int, ...]

    def falsified_by(self, x: BitString) -> bool:
        return not any(x[v] for v in self.vars)


@dataclass(frozen=True)
class Dictator:
    """A single-variable function: ``x_k`` or its negation."""

    index: int
    negated: bool = False

    def value_at(self, x: BitString) -> int:
        v = x[self.index]
        return 1 - v if self.negated else v

    __call__ = value_at


class Route:
    """Outcome of a multiplexer: a forced constant, a term, or a cell.

    ``kind`` is one of ``zero`` (forced 0), ``one`` (forced 1), ``term``
    (single-level index ``i``), or ``cell`` (two-level pair ``(i, j)``).
    """

    __slots__ = ("kind", "i", "j")

    def __init__(self, kind: str, i: int | None = None, j: int | None = None):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Route is immutable")

    @classmethod
    def zero(cls) -> "Route":
        return _ROUTE_ZERO

    @classmethod
    def one(cls) -> "Route":
        return _ROUTE_ONE

    @classmethod
    def term(cls, i: int) -> "Route":
        return cls("term", i)

    @classmethod
    def cell(cls, i: int, j: int) -> "Route":
        return cls("cell", i, j)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Route)
            and (self.kind, self.i, self.j) == (other.kind, other.i, other.j)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.i, self.j))

    def __repr__(self) -> str:
        if self.kind == "term":
            return f"Route.term({self.i})"
        if self.kind == "cell":
            return f"Route.cell({self.i}, {self.j})"
        return f"Route.{self.kind}()"


_ROUTE_ZERO = Route("zero")
_ROUTE_ONE = Route("one")


# ---------------------------------------------------------------------------
# Two-level family
# ---------------------------------------------------------------------------


class MonoInstance:
    """Two-level multiplexer family over ``{0,1}^n``.

    ``n`` must normally be a perfect square; ``term_len`` may be passed
    explicitly to run the family at other dimensions (the truncation band
    still uses the real square root).  ``N = 2**term_len`` terms and
    ``N**2`` clauses are derived lazily per index.
    """

    family = "mono"

    def __init__(
        self,
        n: int,
        world: str,
        *,
        terms: np.ndarray,
        seed: int | None = None,
        storage: str = "lazy",
        clauses: np.ndarray | None = None,
        dictators: np.ndarray | None = None,
    ):
        self.n = n
        self.world = _check_world(world)
        self.seed = seed
        self.storage = storage
        self._terms = np.ascontiguousarray(terms, dtype=np.int32)
        self.N = self._terms.shape[0]
        self.m = self._terms.shape[1]
        self._clauses = clauses  # (N, N, m) when explicit
        self._dictators = dictators  # (N, N) variable indices when explicit
        self._clause_cache: dict[int, np.ndarray] = {}
        self._dict_cache: dict[int, np.ndarray] = {}
        sq = math.sqrt(n)
        self.band_low = n / 2 - sq
        self.band_high = n / 2 + sq
        self.negated = world == "no"

    # -- sampling ---------------------------------------------------------

    @classmethod
    def sample(
        cls,
        n: int,
        world: str,
        seed: int,
        storage: str = "lazy",
        term_len: int | None = None,
    ) -> "MonoInstance":
        if n < 9:
            raise ValueError(f"n must be at least 9, got {n}")
        if term_len is None:
            if not _is_square(n):
                raise ValueError("n must be a perfect square")
            term_len = math.isqrt(n)
        if storage not in ("lazy", "explicit"):
            raise ValueError(f"unknown storage {storage!r}")
        N = 1 << term_len
        if storage == "explicit" and N * N > EXPLICIT_CELL_CAP:
            raise ResourceLimitError(
                f"explicit storage holds N**2={N * N} cells; cap is {EXPLICIT_CELL_CAP}"
            )
        terms = derive_generator(seed, "mono", "terms").integers(
            0, n, size=(N, term_len), dtype=np.int32
        )
        inst = cls(n, world, terms=terms, seed=seed, storage=storage)
        if storage == "explicit":
            clauses = np.stack([inst._derive_clause_block(i) for i in range(N)])
            dicts = np.stack([inst._derive_dict_row(i) for i in range(N)])
            inst._clauses = clauses
            inst._dictators = dicts
        return inst

    @classmethod
    def from_parts(
        cls,
        n: int,
        world: str,
        terms: Sequence[Sequence[int]],
        clauses: Sequence[Sequence[Sequence[int]]],
        dictators: Sequence[Sequence[int]],
    ) -> "MonoInstance":
        """Hand-built instance from explicit 0-based pieces.

        ``clauses[i][j]`` and ``dictators[i][j]`` describe cell (i, j);
        ``N`` is taken from ``len(terms)`` and need not be a power of two.
        """
        t = np.asarray(terms, dtype=np.int32)
        c = np.asarray(clauses, dtype=np.int32)
        d = np.asarray(dictators, dtype=np.int32)
        if c.shape[:2] != (t.shape[0], t.shape[0]) or d.shape != c.shape[:2]:
            raise ValueError("clauses must be N x N x m and dictators N x N")
        return cls(n, world, terms=t, storage="explicit", clauses=c, dictators=d)

    # -- derived pieces -----------------------------------------------------

    def _derive_clause_block(self, i: int) -> np.ndarray:
        return derive_generator(self.seed, "mono", "clauses", i).integers(
            0, self.n, size=(self.N, self.m), dtype=np.int32
        )

    def _derive_dict_row(self, i: int) -> np.ndarray:
        return derive_generator(self.seed, "mono", "dict", i).integers(
            0, self.n, size=self.N, dtype=np.int32
        )

    def clause_block(self, i: int) -> np.ndarray:
        """The ``N x m`` variable indices of clauses gated by term ``i``."""
        if self._clauses is not None:
            return self._clauses[i]
        blk = self._clause_cache.get(i)
        if blk is None:
            blk = self._derive_clause_block(i)
            self._clause_cache[i] = blk
        return blk

    def dict_row(self, i: int) -> np.ndarray:
        if self._dictators is not None:
            return self._dictators[i]
        row = self._dict_cache.get(i)
        if row is None:
            row = self._derive_dict_row(i)
            self._dict_cache[i] = row
        return row

    def term(self, i: int) -> Term:
        return Term(self.n, tuple(int(v) for v in self._terms[i]))

    def clause(self, i: int, j: int) -> Clause:
        return Clause(self.n, tuple(int(v) for v in self.clause_block(i)[j]))

    def dictator(self, i: int, j: int) -> Dictator:
        return Dictator(int(self.dict_row(i)[j]), negated=self.negated)

    # -- evaluation ---------------------------------------------------------

    def weight_class(self, x: BitString) -> str:
        w = x.weight
        if w < self.band_low:
            return "low"
        if w > self.band_high:
            return "high"
        return "middle"

    def satisfied_terms(self, x: BitString, limit: int = 2) -> list[int]:
        """Indices of the first ``limit`` satisfied terms, ascending."""
        xb = x.to_array()
        hits: list[int] = []
        chunk = 8192
        for lo in range(0, self.N, chunk):
            sat = xb[self._terms[lo : lo + chunk]].all(axis=1)
            for k in np.flatnonzero(sat):
                hits.append(lo + int(k))
                if len(hits) >= limit:
                    return hits
        return hits

    def falsified_clauses(self, i: int, x: BitString, limit: int = 2) -> list[int]:
        """Indices of the first ``limit`` clauses of row ``i`` falsified by x."""
        xb = x.to_array()
        blk = self.clause_block(i)
        hits: list[int] = []
        chunk = 8192
        for lo in range(0, self.N, chunk):
            fals = ~xb[blk[lo : lo + chunk]].any(axis=1)
            for k in np.flatnonzero(fals):
                hits.append(lo + int(k))
                if len(hits) >= limit:
                    return hits
        return hits

    def route(self, x: BitString) -> Route:
        """Two-level multiplexer: forced constant or the unique cell."""
        sat = self.satisfied_terms(x, limit=2)
        if not sat:
            return Route.zero()
        if len(sat) >= 2:
            return Route.one()
        i = sat[0]
        fals = self.falsified_clauses(i, x, limit=2)
        if not fals:
            return Route.one()
        if len(fals) >= 2:
            return Route.zero()
        return Route.cell(i, fals[0])

    def value(self, x: BitString) -> int:
        if x.n != self.n:
            raise ValueError(f"query has n={x.n}, instance has n={self.n}")
        wc = self.weight_class(x)
        if wc == "low":
            return 0
        if wc == "high":
            return 1
        r = self.route(x)
        if r.kind == "zero":
            return 0
        if r.kind == "one":
            return 1
        k = int(self.dict_row(r.i)[r.j])
        v = x[k]
        return 1 - v if self.negated else v

    def truth_table(self) -> np.ndarray:
        """Vectorized full table; entry ``t`` is the value at bits ``t``."""
        _require_table_cap(self.n)
        X = _points_matrix(self.n)
        size = 1 << self.n
        w = X.sum(axis=1)
        table = np.zeros(size, dtype=np.uint8)
        table[w > self.band_high] = 1
        mid = (w >= self.band_low) & (w <= self.band_high)

        count = np.zeros(size, dtype=np.uint8)
        first = np.full(size, -1, dtype=np.int32)
        for i in range(self.N):
            sat = X[:, self._terms[i]].all(axis=1)
            newly = sat & (count == 0)
            first[newly] = i
            count[sat & (count < 2)] += 1
        table[mid & (count >= 2)] = 1

        unique = mid & (count == 1)
        for i in np.unique(first[unique]):
            rows = np.flatnonzero(unique & (first == i))
            blk = self.clause_block(int(i))
            sub = X[rows]
            satc = sub[:, blk.reshape(-1)].reshape(len(rows), self.N, self.m)
            fals = ~satc.any(axis=2)
            fcount = fals.sum(axis=1)
            table[rows[fcount == 0]] = 1
            pick = fcount == 1
            if pick.any():
                js = fals[pick].argmax(axis=1)
                rr = rows[pick]
                ks = self.dict_row(int(i))[js]
                vals = X[rr, ks].astype(np.uint8)
                table[rr] = 1 - vals if self.negated else vals
        return table

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        obj = {
            "family": self.family,
            "n": self.n,
            "N": self.N,
            "term_len": self.m,
            "world": self.world,
            "seed": self.seed,
            "storage": self.storage,
        }
        if self.storage == "explicit":
            obj["terms"] = (self._terms + 1).tolist()
            obj["clauses"] = np.stack(
                [self.clause_block(i) + 1 for i in range(self.N)]
            ).tolist()
            obj["dictators"] = np.stack(
                [self.dict_row(i) + 1 for i in range(self.N)]
            ).tolist()
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "MonoInstance":
        if obj["storage"] == "lazy":
            return cls.sample(
                obj["n"],
                obj["world"],
                obj["seed"],
                storage="lazy",
                term_len=obj.get("term_len"),
            )
        terms = np.asarray(obj["terms"], dtype=np.int32) - 1
        clauses = np.asarray(obj["clauses"], dtype=np.int32) - 1
        dicts = np.asarray(obj["dictators"], dtype=np.int32) - 1
        return cls(
            obj["n"],
            obj["world"],
            terms=terms,
            seed=obj.get("seed"),
            storage="explicit",
            clauses=clauses,
            dictators=dicts,
        )


# ---------------------------------------------------------------------------
# Flipped random DNF
# ---------------------------------------------------------------------------


class FlippedDnfInstance:
    """Truncated random DNF; the no world is evaluated after a sparse flip.

    Truncation is applied to the weight of the query itself (before the
    flip); ``truncate_after_flip=True`` toggles the alternative convention
    for experiments.
    """

    family = "flipdnf"

    def __init__(
        self,
        n: int,
        world: str,
        *,
        terms: np.ndarray,
        flip_set: IndexSet,
        seed: int | None = None,
        truncate_after_flip: bool = False,
    ):
        self.n = n
        self.world = _check_world(world)
        self.seed = seed
        self._terms = np.ascontiguousarray(terms, dtype=np.int32)
        self.N = self._terms.shape[0]
        self.m = self._terms.shape[1]
        self.flip_coords = flip_set
        self.truncate_after_flip = truncate_after_flip
        if world == "yes" and len(flip_set) != 0:
            raise ValueError("yes world must have an empty flip set")
        sq = math.sqrt(n)
        self.band_low = n / 2 - sq
        self.band_high = n / 2 + sq

    @classmethod
    def sample(cls, n: int, world: str, seed: int) -> "FlippedDnfInstance":
        if not _is_square(n):
            raise ValueError("n must be a perfect square")
        m = math.isqrt(n)
        N = 1 << m
        terms = derive_generator(seed, "flipdnf", "terms").integers(
            0, n, size=(N, m), dtype=np.int32
        )
        if world == "no":
            mask = derive_generator(seed, "flipdnf", "sflip").random(n) < 1.0 / m
            s = IndexSet(n, np.flatnonzero(mask))
        else:
            s = IndexSet(n, ())
        return cls(n, world, terms=terms, flip_set=s, seed=seed)

    @classmethod
    def from_parts(
        cls, n: int, world: str, terms: Sequence[Sequence[int]], flip: Iterable[int]
    ) -> "FlippedDnfInstance":
        return cls(
            n,
            world,
            terms=np.asarray(terms, dtype=np.int32),
            flip_set=IndexSet(n, flip),
        )

    def term(self, i: int) -> Term:
        return Term(self.n, tuple(int(v) for v in self._terms[i]))

    def dnf_value(self, x: BitString) -> int:
        xb = x.to_array()
        chunk = 8192
        for lo in range(0, self.N, chunk):
            if xb[self._terms[lo : lo + chunk]].all(axis=1).any():
                return 1
        return 0

    def value(self, x: BitString) -> int:
        if x.n != self.n:
            raise ValueError(f"query has n={x.n}, instance has n={self.n}")
        y = x.flip(self.flip_coords) if len(self.flip_coords) else x
        w = (y if self.truncate_after_flip else x).weight
        if w > self.band_high:
            return 1
        if w < self.band_low:
            return 0
        return self.dnf_value(y)

    def truth_table(self) -> np.ndarray:
        _require_table_cap(self.n)
        X = _points_matrix(self.n)
        size = 1 << self.n
        dnf = np.zeros(size, dtype=bool)
        for i in range(self.N):
            dnf |= X[:, self._terms[i]].all(axis=1)
        idx = np.arange(size, dtype=np.int64) ^ self.flip_coords.mask
        inner = dnf[idx]
        w = X.sum(axis=1) if not self.truncate_after_flip else X[idx].sum(axis=1)
        table = inner.astype(np.uint8)
        table[w > self.band_high] = 1
        table[w < self.band_low] = 0
        return table

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "N": self.N,
            "world": self.world,
            "seed": self.seed,
            "storage": "explicit",
            "terms": (self._terms + 1).tolist(),
            "flip_set": self.flip_coords.to_json(),
            "truncate_after_flip": self.truncate_after_flip,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FlippedDnfInstance":
        return cls(
            obj["n"],
            obj["world"],
            terms=np.asarray(obj["terms"], dtype=np.int32) - 1,
            flip_set=IndexSet.from_json(obj["flip_set"]),
            seed=obj.get("seed"),
            truncate_after_flip=obj.get("truncate_after_flip", False),
        )


# ---------------------------------------------------------------------------
# Single-level multiplexer family
# ---------------------------------------------------------------------------


class OneLevelInstance:
    """Single-level multiplexer: subset terms over all of [n], one dictator
    per term, truncation on total weight."""

    family = "onelevel"

    def __init__(
        self,
        n: int,
        world: str,
        *,
        term_masks: np.ndarray,
        dict_vars: np.ndarray,
        seed: int | None = None,
    ):
        self.n = n
        self.world = _check_world(world)
        self.seed = seed
        self._masks = np.ascontiguousarray(term_masks, dtype=bool)
        self._dict_vars = np.ascontiguousarray(dict_vars, dtype=np.int32)
        self.N = self._masks.shape[0]
        self.negated = world == "no"
        sq = math.sqrt(n)
        self.band_low = n / 2 - sq
        self.band_high = n / 2 + sq
        self.storage = "explicit"

    @classmethod
    def sample(cls, n: int, world: str, seed: int) -> "OneLevelInstance":
        if n < 9:
            raise ValueError(f"n must be at least 9, got {n}")
        if not _is_square(n):
            raise ValueError("n must be a perfect square")
        N = 1 << math.isqrt(n)
        masks = derive_generator(seed, "onelevel", "terms").random((N, n)) < 1.0 / math.sqrt(n)
        dict_vars = derive_generator(seed, "onelevel", "dict").integers(
            0, n, size=N, dtype=np.int32
        )
        return cls(n, world, term_masks=masks, dict_vars=dict_vars, seed=seed)

    @classmethod
    def from_parts(
        cls,
        n: int,
        world: str,
        terms: Sequence[Iterable[int]],
        dict_vars: Sequence[int],
    ) -> "OneLevelInstance":
        masks = np.zeros((len(terms), n), dtype=bool)
        for i, t in enumerate(terms):
            for v in t:
                masks[i, v] = True
        return cls(
            n, world, term_masks=masks, dict_vars=np.asarray(dict_vars), seed=None
        )

    def term(self, i: int) -> Term:
        return Term(
            self.n, tuple(int(v) for v in np.flatnonzero(self._masks[i])), "subset"
        )

    def dictator(self, i: int) -> Dictator:
        return Dictator(int(self._dict_vars[i]), negated=self.negated)

    def weight_class(self, x: BitString) -> str:
        w = x.weight
        if w < self.band_low:
            return "low"
        if w > self.band_high:
            return "high"
        return "middle"

    def satisfied_terms(self, x: BitString, limit: int = 2) -> list[int]:
        xb = x.to_array()
        sat = ~(self._masks & ~xb).any(axis=1)
        hits = np.flatnonzero(sat)[:limit]
        return [int(i) for i in hits]

    def route(self, x: BitString) -> Route:
        sat = self.satisfied_terms(x, limit=2)
        if not sat:
            return Route.zero()
        if len(sat) >= 2:
            return Route.one()
        return Route.term(sat[0])

    def value(self, x: BitString) -> int:
        if x.n != self.n:
            raise ValueError(f"query has n={x.n}, instance has n={self.n}")
        wc = self.weight_class(x)
        if wc == "low":
            return 0
        if wc == "high":
            return 1
        r = self.route(x)
        if r.kind == "zero":
            return 0
        if r.kind == "one":
            return 1
        v = x[int(self._dict_vars[r.i])]
        return 1 - v if self.negated else v

    def truth_table(self) -> np.ndarray:
        _require_table_cap(self.n)
        X = _points_matrix(self.n)
        size = 1 << self.n
        w = X.sum(axis=1)
        table = np.zeros(size, dtype=np.uint8)
        table[w > self.band_high] = 1
        mid = (w >= self.band_low) & (w <= self.band_high)
        count = np.zeros(size, dtype=np.uint8)
        first = np.full(size, -1, dtype=np.int32)
        for i in range(self.N):
            members = np.flatnonzero(self._masks[i])
            sat = X[:, members].all(axis=1) if len(members) else np.ones(size, bool)
            newly = sat & (count == 0)
            first[newly] = i
            count[sat & (count < 2)] += 1
        table[mid & (count >= 2)] = 1
        unique = mid & (count == 1)
        rows = np.flatnonzero(unique)
        ks = self._dict_vars[first[rows]]
        vals = X[rows, ks].astype(np.uint8)
        table[rows] = 1 - vals if self.negated else vals
        return table

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "N": self.N,
            "world": self.world,
            "seed": self.seed,
            "storage": "explicit",
            "terms": [
                [int(v) + 1 for v in np.flatnonzero(self._masks[i])]
                for i in range(self.N)
            ],
            "dictators": (self._dict_vars + 1).tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OneLevelInstance":
        masks = np.zeros((obj["N"], obj["n"]), dtype=bool)
        for i, t in enumerate(obj["terms"]):
            for v in t:
                masks[i, v - 1] = True
        return cls(
            obj["n"],
            obj["world"],
            term_masks=masks,
            dict_vars=np.asarray(obj["dictators"], dtype=np.int32) - 1,
            seed=obj.get("seed"),
        )


# ---------------------------------------------------------------------------
# Unateness family
# ---------------------------------------------------------------------------


class UnateInstance:
    """Oriented single-level family for unateness testing.

    A hidden half ``M`` of the coordinates carries the terms; each term has
    a dictator on the complement; a random orientation ``r || s`` is XORed
    into every query before evaluation, and truncation happens after the
    XOR (on the weight restricted to ``M``).
    """

    family = "unate"

    def __init__(
        self,
        n: int,
        world: str,
        *,
        m_sorted: np.ndarray,
        term_masks: np.ndarray,
        dict_vars: np.ndarray,
        dict_negated: np.ndarray,
        r_bits: np.ndarray,
        s_bits: np.ndarray,
        seed: int | None = None,
    ):
        self.n = n
        self.world = _check_world(world)
        self.seed = seed
        self.storage = "explicit"
        self.M_sorted = np.ascontiguousarray(m_sorted, dtype=np.int32)
        self.M = frozenset(int(i) for i in m_sorted)
        self.Mbar_sorted = np.asarray(
            sorted(set(range(n)) - self.M), dtype=np.int32
        )
        self._masks = np.ascontiguousarray(term_masks, dtype=bool)  # (N, n)
        self.N = self._masks.shape[0]
        self._dict_vars = np.ascontiguousarray(dict_vars, dtype=np.int32)
        self._dict_negated = np.ascontiguousarray(dict_negated, dtype=bool)
        self.r_bits = np.ascontiguousarray(r_bits, dtype=np.uint8)  # over M_sorted
        self.s_bits = np.ascontiguousarray(s_bits, dtype=np.uint8)  # over Mbar_sorted
        if self._masks[:, self.Mbar_sorted].any():
            raise ValueError("terms must be subsets of M")
        if any(int(v) in self.M for v in self._dict_vars):
            raise ValueError("dictator variables must lie outside M")
        if world == "yes" and self._dict_negated.any():
            raise ValueError("yes world must have all-positive dictators")
        ori = 0
        for pos, c in zip(self.M_sorted, self.r_bits):
            ori |= int(c) << int(pos)
        for pos, c in zip(self.Mbar_sorted, self.s_bits):
            ori |= int(c) << int(pos)
        self.orientation = BitString(n, ori)
        # orientation restricted to the dictator half (used by signatures)
        s_only = 0
        for pos, c in zip(self.Mbar_sorted, self.s_bits):
            s_only |= int(c) << int(pos)
        self.s_orientation = BitString(n, s_only)
        sq = math.sqrt(n)
        self.band_low = n / 4 - sq
        self.band_high = n / 4 + sq
        self._m_mask = 0
        for pos in self.M_sorted:
            self._m_mask |= 1 << int(pos)

    @staticmethod
    def size_for(n: int) -> int:
        """Number of terms: ceil((1 + 1/sqrt(n)) ** (n/4))."""
        return math.ceil((1.0 + 1.0 / math.sqrt(n)) ** (n / 4))

    @classmethod
    def sample(cls, n: int, world: str, seed: int) -> "UnateInstance":
        if n % 2:
            raise ValueError(f"n must be even, got {n}")
        if n < 16:
            raise ValueError(f"n must be at least 16, got {n}")
        half = n // 2
        N = cls.size_for(n)
        m_sorted = np.sort(
            derive_generator(seed, "unate", "M").permutation(n)[:half]
        ).astype(np.int32)
        inside = derive_generator(seed, "unate", "terms").random((N, half)) < (
            1.0 / math.sqrt(n)
        )
        masks = np.zeros((N, n), dtype=bool)
        masks[:, m_sorted] = inside
        mbar = np.asarray(sorted(set(range(n)) - set(int(i) for i in m_sorted)))
        dict_vars = mbar[
            derive_generator(seed, "unate", "dict").integers(0, half, size=N)
        ].astype(np.int32)
        if world == "no":
            negated = (
                derive_generator(seed, "unate", "polarity").integers(0, 2, size=N) == 1
            )
        else:
            negated = np.zeros(N, dtype=bool)
        r_bits = derive_generator(seed, "unate", "r").integers(0, 2, size=half)
        s_bits = derive_generator(seed, "unate", "s").integers(0, 2, size=half)
        return cls(
            n,
            world,
            m_sorted=m_sorted,
            term_masks=masks,
            dict_vars=dict_vars,
            dict_negated=negated,
            r_bits=r_bits,
            s_bits=s_bits,
            seed=seed,
        )

    @classmethod
    def from_parts(
        cls,
        n: int,
        world: str,
        m_members: Iterable[int],
        terms: Sequence[Iterable[int]],
        dictators: Sequence[tuple[int, bool]],
        r_bits: Sequence[int] | None = None,
        s_bits: Sequence[int] | None = None,
    ) -> "UnateInstance":
        m_sorted = np.asarray(sorted(m_members), dtype=np.int32)
        half = len(m_sorted)
        masks = np.zeros((len(terms), n), dtype=bool)
        for i, t in enumerate(terms):
            for v in t:
                masks[i, v] = True
        dv = np.asarray([d[0] for d in dictators], dtype=np.int32)
        neg = np.asarray([bool(d[1]) for d in dictators], dtype=bool)
        rb = np.zeros(half, np.uint8) if r_bits is None else np.asarray(r_bits)
        sb = np.zeros(n - half, np.uint8) if s_bits is None else np.asarray(s_bits)
        return cls(
            n,
            world,
            m_sorted=m_sorted,
            term_masks=masks,
            dict_vars=dv,
            dict_negated=neg,
            r_bits=rb,
            s_bits=sb,
        )

    def term(self, i: int) -> Term:
        return Term(
            self.n, tuple(int(v) for v in np.flatnonzero(self._masks[i])), "subset"
        )

    def dictator(self, i: int) -> Dictator:
        return Dictator(int(self._dict_vars[i]), bool(self._dict_negated[i]))

    # -- base (de-oriented) evaluation -------------------------------------

    def m_weight(self, y: BitString) -> int:
        return (y.bits & self._m_mask).bit_count()

    def band_class_base(self, y: BitString) -> str:
        w = self.m_weight(y)
        if w < self.band_low:
            return "low"
        if w > self.band_high:
            return "high"
        return "middle"

    def satisfied_terms_base(self, y: BitString, limit: int = 2) -> list[int]:
        yb = y.to_array()
        sat = ~(self._masks & ~yb).any(axis=1)
        return [int(i) for i in np.flatnonzero(sat)[:limit]]

    def route_base(self, y: BitString) -> Route:
        sat = self.satisfied_terms_base(y, limit=2)
        if not sat:
            return Route.zero()
        if len(sat) >= 2:
            return Route.one()
        return Route.term(sat[0])

    def base_value(self, y: BitString) -> int:
        wc = self.band_class_base(y)
        if wc == "low":
            return 0
        if wc == "high":
            return 1
        r = self.route_base(y)
        if r.kind == "zero":
            return 0
        if r.kind == "one":
            return 1
        return self.dictator(r.i).value_at(y)

    def value(self, x: BitString) -> int:
        if x.n != self.n:
            raise ValueError(f"query has n={x.n}, instance has n={self.n}")
        return self.base_value(x.xor(self.orientation))

    def base_truth_table(self) -> np.ndarray:
        _require_table_cap(self.n)
        X = _points_matrix(self.n)
        size = 1 << self.n
        wM = X[:, self.M_sorted].sum(axis=1)
        table = np.zeros(size, dtype=np.uint8)
        table[wM > self.band_high] = 1
        mid = (wM >= self.band_low) & (wM <= self.band_high)
        count = np.zeros(size, dtype=np.uint8)
        first = np.full(size, -1, dtype=np.int32)
        for i in range(self.N):
            members = np.flatnonzero(self._masks[i])
            sat = X[:, members].all(axis=1) if len(members) else np.ones(size, bool)
            newly = sat & (count == 0)
            first[newly] = i
            count[sat & (count < 2)] += 1
        table[mid & (count >= 2)] = 1
        unique = mid & (count == 1)
        rows = np.flatnonzero(unique)
        if len(rows):
            ks = self._dict_vars[first[rows]]
            vals = X[rows, ks].astype(np.uint8)
            neg = self._dict_negated[first[rows]]
            vals[neg] = 1 - vals[neg]
            table[rows] = vals
        return table

    def truth_table(self) -> np.ndarray:
        base = self.base_truth_table()
        idx = np.arange(1 << self.n, dtype=np.int64) ^ self.orientation.bits
        return base[idx]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "N": self.N,
            "world": self.world,
            "seed": self.seed,
            "storage": "explicit",
            "M": [int(i) + 1 for i in self.M_sorted],
            "terms": [
                [int(v) + 1 for v in np.flatnonzero(self._masks[i])]
                for i in range(self.N)
            ],
            "dictators": [
                {"index": int(v) + 1, "negated": bool(g)}
                for v, g in zip(self._dict_vars, self._dict_negated)
            ],
            "r_bits": [int(b) for b in self.r_bits],
            "s_bits": [int(b) for b in self.s_bits],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "UnateInstance":
        return cls.from_parts(
            obj["n"],
            obj["world"],
            [i - 1 for i in obj["M"]],
            [[v - 1 for v in t] for t in obj["terms"]],
            [(d["index"] - 1, d["negated"]) for d in obj["dictators"]],
            r_bits=obj["r_bits"],
            s_bits=obj["s_bits"],
        )._with_seed(obj.get("seed"))

    def _with_seed(self, seed) -> "UnateInstance":
        self.seed = seed
        return self


# ---------------------------------------------------------------------------
# Four-quadrant family
# ---------------------------------------------------------------------------


class QuadrantInstance:
    """Function on ``(a, b, x) in {0,1}^{n+2}``: the quadrants are the
    constants 0 and 1 and the two opposite dictators of coordinate ``i``."""

    family = "quadrant"

    def __init__(self, n: int, i: int):
        if not 0 <= i < n:
            raise ValueError(f"index {i} out of range for n={n}")
        self.n = n
        self.i = i
        self.dimension = n + 2

    @classmethod
    def sample(cls, n: int, seed: int) -> "QuadrantInstance":
        gen = derive_generator(seed, "quadrant", "index")
        return cls(n, int(gen.integers(0, n)))

    def value(self, z: BitString) -> int:
        if z.n != self.dimension:
            raise ValueError(
                f"query has n={z.n}, instance lives on n+2={self.dimension}"
            )
        a, b = z[0], z[1]
        if a == 0 and b == 0:
            return 0
        if a == 1 and b == 1:
            return 1
        xi = z[2 + self.i]
        return xi if a == 1 else 1 - xi

    def truth_table(self) -> np.ndarray:
        _require_table_cap(self.dimension)
        size = 1 << self.dimension
        idx = np.arange(size, dtype=np.int64)
        a = (idx & 1).astype(bool)
        b = ((idx >> 1) & 1).astype(bool)
        xi = ((idx >> (2 + self.i)) & 1).astype(np.uint8)
        table = np.where(a, np.where(b, 1, xi), np.where(b, 1 - xi, 0))
        return table.astype(np.uint8)

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n, "i": self.i + 1}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadrantInstance":
        return cls(obj["n"], obj["i"] - 1)


# ---------------------------------------------------------------------------
# Dispatch helpers
# ---------------------------------------------------------------------------

_FAMILIES = {
    "mono": MonoInstance,
    "flipdnf": FlippedDnfInstance,
    "onelevel": OneLevelInstance,
    "unate": UnateInstance,
    "quadrant": QuadrantInstance,
}


def instance_from_json(obj: dict):
    """Load any family instance from its JSON form."""
    fam = obj.get("family")
    if fam not in _FAMILIES:
        raise ValueError(f"unknown family {fam!r}")
    return _FAMILIES[fam].from_json(obj)


def truth_table(inst) -> np.ndarray:
    """Full table of any instance (dispatches to the vectorized builders)."""
    return inst.truth_table()
