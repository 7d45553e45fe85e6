"""Hypercube primitives, deterministic randomness streams, and serialization.

Everything downstream works with three small building blocks:

* :class:`BitString` -- an immutable n-bit point of the hypercube, packed
  into a Python integer (coordinate ``i`` lives at bit ``i``), good for
  dimensions up to 4096.
* :class:`IndexSet` -- a validated subset of coordinates.
* :class:`RngStream` -- a stateless, counter-based random stream: the value
  of every draw is a pure function of ``(master_seed, domain_tag, counters,
  call_index)``, so lazily materialized objects can be re-derived on demand
  and Monte-Carlo jobs can be split across workers by counter prefix.

Coordinates are 0-based throughout the Python API; JSON serialization is
1-based (see :meth:`IndexSet.to_json`).
"""

from __future__ import annotations

import hashlib
import struct
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "BitString",
    "IndexSet",
    "RngStream",
    "derive_generator",
    "flip_set",
    "precedes",
    "rng_draw",
]

_MASK64 = (1 << 64) - 1


class DimensionMismatchError(ValueError):
    """Raised when operands live on hypercubes of different dimension."""


class ResourceLimitError(RuntimeError):
    """Raised when an exact computation would exceed its configured cap."""


class BitString:
    """An immutable point of ``{0,1}^n``.

    Bits are packed into an arbitrary-precision integer; coordinate ``i``
    (0-based) is ``(bits >> i) & 1``.  Instances are hashable and can be
    used as dict keys / set members, which the transcript bookkeeping
    relies on.
    """

    __slots__ = ("n", "bits", "_arr")

    def __init__(self, n: int, bits: int = 0):
        if n <= 0:
            raise ValueError(f"dimension must be positive, got {n}")
        if bits < 0 or bits >> n:
            raise ValueError(f"bits 0x{bits:x} do not fit in {n} coordinates")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "_arr", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("BitString is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_indices(cls, n: int, ones: Iterable[int]) -> "BitString":
        """Point with 1s exactly on ``ones`` (0-based coordinates)."""
        bits = 0
        for i in ones:
            if not 0 <= i < n:
                raise ValueError(f"coordinate {i} out of range for n={n}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def from_bits(cls, values: Sequence[int]) -> "BitString":
        """Point from an explicit 0/1 sequence, ``values[i]`` = coordinate i."""
        bits = 0
        for i, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError(f"bit values must be 0/1, got {v!r}")
            bits |= int(v) << i
        return cls(len(values), bits)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BitString":
        idx = np.flatnonzero(arr)
        bits = 0
        for i in idx:
            bits |= 1 << int(i)
        return cls(len(arr), bits)

    @classmethod
    def random(cls, n: int, rng: "RngStream | np.random.Generator") -> "BitString":
        if isinstance(rng, RngStream):
            chunks = []
            for off in range(0, n, 64):
                chunks.append(rng.draw(1 << min(64, n - off)) - 1)
            bits = 0
            for k, c in enumerate(chunks):
                bits |= c << (64 * k)
            return cls(n, bits)
        arr = rng.integers(0, 2, size=n)
        return cls.from_array(arr)

    # -- queries --------------------------------------------------------

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"coordinate {i} out of range for n={self.n}")
        return (self.bits >> i) & 1

    @property
    def weight(self) -> int:
        """Hamming weight, the number of 1-coordinates."""
        return self.bits.bit_count()

    def one_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if (self.bits >> i) & 1)

    def zero_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if not (self.bits >> i) & 1)

    def to_array(self) -> np.ndarray:
        """Boolean numpy view (cached; do not mutate the result)."""
        if self._arr is None:
            raw = self.bits.to_bytes((self.n + 7) // 8, "little")
            arr = np.unpackbits(
                np.frombuffer(raw, dtype=np.uint8), bitorder="little"
            )[: self.n].astype(bool)
            arr.setflags(write=False)
            object.__setattr__(self, "_arr", arr)
        return self._arr

    # -- operations -----------------------------------------------------

    def flip(self, coords: "IndexSet | Iterable[int]") -> "BitString":
        """Flip every coordinate in ``coords``; involutive."""
        if isinstance(coords, IndexSet):
            if coords.n != self.n:
                raise DimensionMismatchError(
                    f"IndexSet over n={coords.n} applied to point with n={self.n}"
                )
            return BitString(self.n, self.bits ^ coords.mask)
        mask = 0
        for i in coords:
            if not 0 <= i < self.n:
                raise ValueError(f"coordinate {i} out of range for n={self.n}")
            mask |= 1 << i
        return BitString(self.n, self.bits ^ mask)

    def flip_one(self, i: int) -> "BitString":
        if not 0 <= i < self.n:
            raise ValueError(f"coordinate {i} out of range for n={self.n}")
        return BitString(self.n, self.bits ^ (1 << i))

    def xor(self, other: "BitString") -> "BitString":
        self._check_dim(other)
        return BitString(self.n, self.bits ^ other.bits)

    def precedes(self, other: "BitString") -> bool:
        """Strict coordinatewise order: every bit <= and not equal."""
        self._check_dim(other)
        return self.bits != other.bits and not (self.bits & ~other.bits)

    def _check_dim(self, other: "BitString") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.n} vs {other.n}"
            )

    # -- serialization ----------------------------------------------------

    def to_hex(self) -> str:
        """Hex digits, least-significant nibble = coordinates 0..3."""
        return format(self.bits, f"0{(self.n + 3) // 4}x")

    @classmethod
    def from_hex(cls, n: int, digits: str) -> "BitString":
        return cls(n, int(digits, 16))

    def to_json(self) -> dict:
        return {"n": self.n, "hex": self.to_hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "BitString":
        return cls.from_hex(int(obj["n"]), obj["hex"])

    # -- dunder -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitString)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"BitString({self.n}, 0x{self.to_hex()})"

    def __str__(self) -> str:
        return "".join(str((self.bits >> i) & 1) for i in range(self.n))


class IndexSet:
    """A validated subset of the coordinates ``0..n-1``.

    Internally 0-based; JSON serialization converts to 1-based members.
    """

    __slots__ = ("n", "members", "mask")

    def __init__(self, n: int, members: Iterable[int]):
        ms = frozenset(int(i) for i in members)
        for i in ms:
            if not 0 <= i < n:
                raise ValueError(f"index {i} out of range for n={n}")
        mask = 0
        for i in ms:
            mask |= 1 << i
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("IndexSet is immutable")

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IndexSet)
            and self.n == other.n
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((self.n, self.members))

    def __repr__(self) -> str:
        return f"IndexSet({self.n}, {sorted(self.members)})"

    def to_json(self) -> dict:
        return {"n": self.n, "members": [i + 1 for i in sorted(self.members)]}

    @classmethod
    def from_json(cls, obj: dict) -> "IndexSet":
        return cls(int(obj["n"]), [int(i) - 1 for i in obj["members"]])


def flip_set(x: BitString, s: IndexSet | Iterable[int]) -> BitString:
    """Functional form of :meth:`BitString.flip`."""
    return x.flip(s)


def precedes(x: BitString, y: BitString) -> bool:
    """Functional form of :meth:`BitString.precedes`."""
    return x.precedes(y)


# ---------------------------------------------------------------------------
# Deterministic randomness
# ---------------------------------------------------------------------------


def _path_bytes(master_seed: int, parts: tuple) -> bytes:
    out = [struct.pack("<Q", master_seed & _MASK64)]
    for p in parts:
        if isinstance(p, str):
            enc = p.encode("utf-8")
            out.append(b"s" + struct.pack("<I", len(enc)) + enc)
        elif isinstance(p, (int, np.integer)):
            out.append(b"i" + struct.pack("<q", int(p)))
        else:
            raise TypeError(f"stream path components must be str/int, got {p!r}")
    return b"".join(out)


def derive_key(master_seed: int, *path: int | str) -> int:
    """128-bit key derived from a seed and a typed path, via BLAKE2b."""
    h = hashlib.blake2b(_path_bytes(master_seed, path), digest_size=16)
    return int.from_bytes(h.digest(), "little")


def derive_generator(master_seed: int, *path: int | str) -> np.random.Generator:
    """Counter-based numpy generator keyed by ``(master_seed, *path)``.

    Philox is a pure integer-arithmetic counter generator, so the stream is
    reproducible across platforms.  Used by the family samplers to derive
    terms/clauses/dictators independently per index without materializing
    anything up front.
    """
    return np.random.Generator(np.random.Philox(key=derive_key(master_seed, *path)))


class RngStream:
    """Stateless keyed random stream.

    Each call to :meth:`draw` hashes ``(master_seed, domain_tag, counters,
    call_index)`` with BLAKE2b, so equal parameters replay byte-identical
    sequences on any platform, and streams with distinct ``domain_tag`` or
    ``counters`` are statistically independent.
    """

    __slots__ = ("master_seed", "domain_tag", "counters", "_calls", "_prefix")

    def __init__(
        self,
        master_seed: int,
        domain_tag: str = "",
        counters: tuple[int, ...] = (),
    ):
        self.master_seed = int(master_seed)
        self.domain_tag = domain_tag
        self.counters = tuple(int(c) for c in counters)
        self._calls = 0
        self._prefix = _path_bytes(self.master_seed, (domain_tag, *self.counters))

    def child(self, *counters: int) -> "RngStream":
        """Independent sub-stream with extended counter tuple."""
        return RngStream(self.master_seed, self.domain_tag, self.counters + counters)

    def _word(self, call_index: int, attempt: int) -> int:
        msg = self._prefix + struct.pack("<qq", call_index, attempt)
        return int.from_bytes(
            hashlib.blake2b(msg, digest_size=8).digest(), "little"
        )

    def draw(self, upper: int) -> int:
        """Uniform integer in ``1..upper`` (matching the 1-based set [m])."""
        if upper < 1:
            raise ValueError(f"range must be >= 1, got {upper}")
        idx = self._calls
        self._calls += 1
        if upper == 1:
            return 1
        limit = (1 << 64) - ((1 << 64) % upper)
        attempt = 0
        while True:
            w = self._word(idx, attempt)
            if w < limit:
                return w % upper + 1
            attempt += 1

    def randint0(self, upper: int) -> int:
        """Uniform integer in ``0..upper-1``."""
        return self.draw(upper) - 1

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.draw(1 << 53) - 1) / float(1 << 53)

    def sample_without_replacement(self, pool: Sequence[int], k: int) -> list[int]:
        """k distinct elements of ``pool``, order-stable partial Fisher-Yates."""
        if k > len(pool):
            raise ValueError(f"cannot sample {k} from pool of {len(pool)}")
        items = list(pool)
        for i in range(k):
            j = i + self.randint0(len(items) - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint0(i + 1)
            items[i], items[j] = items[j], items[i]

    def numpy_generator(self) -> np.random.Generator:
        """Bulk-sampling companion keyed by the same identity."""
        return derive_generator(
            self.master_seed, "np", self.domain_tag, *self.counters
        )

    def __repr__(self) -> str:
        return (
            f"RngStream(seed={self.master_seed}, tag={self.domain_tag!r}, "
            f"counters={self.counters}, calls={self._calls})"
        )


def rng_draw(stream: RngStream, upper: int) -> int:
    """Functional form of :meth:`RngStream.draw`."""
    return stream.draw(upper)
