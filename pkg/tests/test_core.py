from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubetest.core import (
    BitString,
    DimensionMismatchError,
    IndexSet,
    RngStream,
    derive_generator,
    flip_set,
    precedes,
    rng_draw,
)


class TestFlipSet:
    def test_empty_set_is_identity(self):
        x = BitString.zeros(4)
        assert flip_set(x, IndexSet(4, [])) == x

    def test_all_flip(self):
        x = BitString.zeros(4)
        assert flip_set(x, IndexSet(4, [0, 1, 2, 3])) == BitString.ones(4)

    def test_single_coordinate(self):
        x = BitString.from_bits([1, 0, 1])
        assert x.flip_one(1) == BitString.from_bits([1, 1, 1])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            BitString.zeros(4).flip(IndexSet(5, [0]))

    def test_out_of_range_coordinate(self):
        with pytest.raises(ValueError):
            BitString.zeros(4).flip([4])

    @given(st.integers(0, 2**32 - 1), st.sets(st.integers(0, 31)))
    @settings(max_examples=200)
    def test_involution(self, bits, coords):
        x = BitString(32, bits)
        s = IndexSet(32, coords)
        assert x.flip(s).flip(s) == x
        assert x.flip(s).n == x.n


class TestPrecedes:
    def test_bottom_below_top(self):
        assert precedes(BitString.zeros(3), BitString.ones(3))

    def test_strictness(self):
        x = BitString.from_bits([1, 0, 1])
        assert not precedes(x, x)

    def test_incomparable(self):
        assert not precedes(BitString.from_bits([1, 0]), BitString.from_bits([0, 1]))
        assert not precedes(BitString.from_bits([0, 1]), BitString.from_bits([1, 0]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            precedes(BitString.zeros(3), BitString.zeros(4))

    @given(st.lists(st.integers(0, 2**16 - 1), min_size=3, max_size=3))
    @settings(max_examples=300)
    def test_strict_partial_order(self, triple):
        a, b, c = (BitString(16, v) for v in triple)
        assert not precedes(a, a)
        if precedes(a, b):
            assert not precedes(b, a)
        if precedes(a, b) and precedes(b, c):
            assert precedes(a, c)


class TestBitString:
    def test_weight(self):
        assert BitString.from_bits([1, 0, 1, 1]).weight == 3
        assert BitString.zeros(10).weight == 0

    def test_hex_roundtrip(self):
        x = BitString.from_bits([1, 0, 1, 1, 0, 0, 1])
        assert BitString.from_hex(7, x.to_hex()) == x

    def test_json_roundtrip(self):
        x = BitString(12, 0xABC)
        assert BitString.from_json(x.to_json()) == x

    def test_to_array_matches_indexing(self):
        x = BitString(9, 0b101100101)
        arr = x.to_array()
        assert [int(v) for v in arr] == [x[i] for i in range(9)]

    def test_large_dimension(self):
        x = BitString.ones(4096)
        assert x.weight == 4096
        assert x.flip_one(4095).weight == 4095

    def test_immutability(self):
        x = BitString.zeros(4)
        with pytest.raises(AttributeError):
            x.bits = 3


class TestIndexSet:
    def test_rejects_duplicval_out_of_range(self):
        with pytest.raises(ValueError):
            IndexSet(4, [4])

    def test_json_is_one_based(self):
        s = IndexSet(5, [0, 3])
        assert s.to_json()["members"] == [1, 4]
        assert IndexSet.from_json(s.to_json()) == s


class TestRngStream:
    def test_range_one_always_one(self):
        s = RngStream(1, "t")
        assert all(rng_draw(s, 1) == 1 for _ in range(50))

    def test_replay_determinism(self):
        a = RngStream(99, "tag", (1, 2))
        b = RngStream(99, "tag", (1, 2))
        assert [a.draw(1000) for _ in range(10_000)] == [
            b.draw(1000) for _ in range(10_000)
        ]

    def test_distinct_tags_differ(self):
        a = RngStream(99, "tag-a")
        b = RngStream(99, "tag-b")
        assert [a.draw(10**9) for _ in range(20)] != [
            b.draw(10**9) for _ in range(20)
        ]

    def test_child_streams_differ(self):
        s = RngStream(7, "t")
        assert [s.child(0).draw(10**9) for _ in range(10)] != [
            s.child(1).draw(10**9) for _ in range(10)
        ]

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            RngStream(0).draw(0)

    def test_uniformity_chi_square(self):
        # frequency of each value over 1e6 draws with range 16 within 5
        # sigma of 1/16, plus the chi-square statistic within 5 sigma of
        # its mean (15) for 15 degrees of freedom.
        s = RngStream(123, "chi")
        m, k = 1_000_000, 16
        counts = np.zeros(k, dtype=np.int64)
        for _ in range(m):
            counts[s.draw(k) - 1] += 1
        p = 1.0 / k
        sigma = math.sqrt(m * p * (1 - p))
        assert np.all(np.abs(counts - m * p) < 5 * sigma)
        chi2 = float(((counts - m * p) ** 2 / (m * p)).sum())
        dof = k - 1
        assert abs(chi2 - dof) < 5 * math.sqrt(2 * dof)

    def test_sample_without_replacement(self):
        s = RngStream(5, "swr")
        got = s.sample_without_replacement(range(100), 30)
        assert len(got) == 30 and len(set(got)) == 30
        with pytest.raises(ValueError):
            s.sample_without_replacement(range(3), 4)


class TestDeriveGenerator:
    def test_deterministic(self):
        a = derive_generator(3, "role", 1).integers(0, 1000, size=50)
        b = derive_generator(3, "role", 1).integers(0, 1000, size=50)
        assert np.array_equal(a, b)

    def test_distinct_paths_differ(self):
        a = derive_generator(3, "role", 1).integers(0, 1000, size=50)
        b = derive_generator(3, "role", 2).integers(0, 1000, size=50)
        assert not np.array_equal(a, b)
