from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from cubetest.core import BitString, ResourceLimitError, RngStream
from cubetest.distance import (
    FarnessEstimate,
    count_violating_edges,
    directional_edge_counts,
    estimate_witness_density,
    exact_dist_mono,
    exact_dist_unate,
    exhaustive_witness_density,
    middle_layer_indices,
    unate_dist_lower_bound,
    unate_no_family_stats,
    witness_edge_family,
    witness_edge_at,
)
from cubetest.families import QuadrantInstance, MonoInstance, UnateInstance


def table_of(fn, n):
    return np.array([fn(BitString(n, v)) for v in range(1 << n)], dtype=np.uint8)


class TestExactDistMono:
    def test_monotone_or_is_zero(self):
        t = table_of(lambda x: int(x.weight > 0), 4)
        assert exact_dist_mono(t) == Fraction(0)

    def test_antidictator_half(self):
        t = table_of(lambda x: 1 - x[0], 3)
        assert exact_dist_mono(t) == Fraction(1, 2)

    def test_yes_world_instances_are_monotone(self):
        for s in range(5):
            inst = MonoInstance.sample(9, "yes", seed=s)
            assert exact_dist_mono(inst.truth_table(), 9) == 0

    def test_matches_edge_scan_zero_iff(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            t = rng.integers(0, 2, size=64).astype(np.uint8)
            d = exact_dist_mono(t, 6)
            assert (d == 0) == (count_violating_edges(t, 6) == 0)

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            exact_dist_mono(np.zeros(1 << 15, dtype=np.uint8))

    def test_single_violating_pair(self):
        # f equals 1 only at the bottom: one disjoint violating pair
        t = np.zeros(8, dtype=np.uint8)
        t[0] = 1
        assert exact_dist_mono(t, 3) == Fraction(1, 8)


class TestExactDistUnate:
    def test_antidictator_is_unate(self):
        t = table_of(lambda x: 1 - x[0], 3)
        assert exact_dist_unate(t) == 0

    def test_never_exceeds_mono_distance(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            t = rng.integers(0, 2, size=32).astype(np.uint8)
            assert exact_dist_unate(t, 5) <= exact_dist_mono(t, 5)

    def test_orientation_invariance(self):
        rng = np.random.default_rng(13)
        idx = np.arange(1 << 6)
        for _ in range(10):
            t = rng.integers(0, 2, size=64).astype(np.uint8)
            base = exact_dist_unate(t, 6)
            for r in rng.integers(0, 64, size=5):
                assert exact_dist_unate(t[idx ^ int(r)], 6) == base

    def test_fi_small_dimension(self):
        inst = QuadrantInstance(4, 2)
        assert exact_dist_unate(inst.truth_table(), cap=6) >= Fraction(1, 8)


class TestUnateLowerBound:
    def test_monotone_is_zero(self):
        t = table_of(lambda x: int(x.weight >= 2), 4)
        assert unate_dist_lower_bound(t) == 0

    def test_fi_exact_eighth(self):
        # single direction carries 2^{n-1} edges of each polarity
        inst = QuadrantInstance(6, 3)
        assert unate_dist_lower_bound(inst.truth_table()) == Fraction(1, 8)

    def test_lower_bounds_exact(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            t = rng.integers(0, 2, size=64).astype(np.uint8)
            assert unate_dist_lower_bound(t) <= exact_dist_unate(t, 6)

    def test_directional_sets_are_edge_disjoint(self):
        rng = np.random.default_rng(5)
        t = rng.integers(0, 2, size=256).astype(np.uint8)
        for i, (mono, anti) in enumerate(directional_edge_counts(t, 8)):
            assert len(set(mono)) == len(mono)
            assert not (set(mono) & set(anti))


class TestWitnessEdges:
    def test_non_cell_routes_are_excluded(self):
        inst = MonoInstance.sample(16, "no", seed=1)
        zero_route = None
        rng = RngStream(0, "xp")
        while zero_route is None:
            x = BitString.random(16, rng)
            if inst.weight_class(x) == "middle" and inst.route(x).kind == "zero":
                zero_route = x
        assert witness_edge_at(inst, zero_route) is None

    def test_zero_value_excluded(self, rng):
        inst = MonoInstance.sample(16, "no", seed=2)
        checked = 0
        while checked < 50:
            x = BitString.random(16, rng)
            if inst.weight_class(x) != "middle":
                continue
            if inst.value(x) == 0:
                checked += 1
                assert witness_edge_at(inst, x) is None

    def test_yes_world_rejected(self):
        inst = MonoInstance.sample(16, "yes", seed=1)
        with pytest.raises(ValueError, match="no-world"):
            witness_edge_at(inst, BitString.from_indices(16, range(8)))

    def test_witnesses_reverify(self):
        for s in range(5):
            inst = MonoInstance.sample(16, "no", seed=s)
            fam = witness_edge_family(inst)
            assert fam, "expected a nonempty witness family"
            seen = set()
            for x, xs in fam:
                assert x.precedes(xs)
                assert inst.value(x) == 1 and inst.value(xs) == 0
                assert x not in seen and xs not in seen
                seen.add(x)
                seen.add(xs)

    def test_pointwise_matches_scan(self, rng):
        inst = MonoInstance.sample(16, "no", seed=4)
        members = {x for x, _ in witness_edge_family(inst)}
        for _ in range(800):
            x = BitString.random(16, rng)
            if inst.weight_class(x) != "middle":
                continue
            assert (witness_edge_at(inst, x) is not None) == (x in members)

    def test_family_density_lower_bounds_distance(self):
        inst = MonoInstance.sample(14, "no", seed=0, term_len=4)
        fam = witness_edge_family(inst)
        dist = exact_dist_mono(inst.truth_table(), 14)
        assert Fraction(len(fam), 1 << 14) <= dist

    def test_estimate_gives_certified_half_bound(self):
        # estimate * middle fraction / 2 is a (weak) certified lower bound
        inst = MonoInstance.sample(14, "no", seed=1, term_len=4)
        est = estimate_witness_density(inst, 20000, RngStream(9, "half"))
        mid_frac = len(middle_layer_indices(14, inst.band_low, inst.band_high)) / (
            1 << 14
        )
        dist = exact_dist_mono(inst.truth_table(), 14)
        exact_pr = exhaustive_witness_density(inst)
        assert exact_pr * mid_frac / 2 <= dist
        # and the estimator tracks the exact probability
        assert abs(est.estimate - exact_pr) <= 4 * max(est.ci_halfwidth / 1.96, 1e-4)

    def test_estimator_validation(self):
        inst = MonoInstance.sample(16, "no", seed=3)
        with pytest.raises(ValueError, match="samples"):
            estimate_witness_density(inst, 0)

    def test_estimator_agrees_with_exhaustive(self):
        inst = MonoInstance.sample(16, "no", seed=3)
        exact = exhaustive_witness_density(inst)
        est = estimate_witness_density(inst, 20000, RngStream(5, "mc"))
        assert abs(est.estimate - exact) <= 3 * max(est.ci_halfwidth / 1.96, 1e-4)


class TestUnateFamilyStats:
    def test_yes_world_min_sum_zero(self):
        inst = UnateInstance.sample(16, "yes", seed=2)
        stats = unate_no_family_stats(inst, exhaustive=True)
        assert stats.min_sum == 0.0
        # monotone side may be populated; the anti side must be empty
        assert all(est.estimate == 0.0 for est in stats.minus.values())

    def test_exhaustive_vs_sampled(self):
        inst = UnateInstance.sample(16, "no", seed=6)
        exact = unate_no_family_stats(inst, exhaustive=True)
        sampled = unate_no_family_stats(
            inst, samples=30000, rng=RngStream(1, "ustats")
        )
        for k, est in sampled.plus.items():
            sigma = max(est.ci_halfwidth / 1.96, 1e-4)
            assert abs(est.estimate - exact.plus[k].estimate) <= 4 * sigma
        for k, est in sampled.minus.items():
            sigma = max(est.ci_halfwidth / 1.96, 1e-4)
            assert abs(est.estimate - exact.minus[k].estimate) <= 4 * sigma

    def test_member_edges_are_bichromatic(self, rng):
        from cubetest.distance import _unate_point_class

        inst = UnateInstance.sample(16, "no", seed=7)
        checked = 0
        while checked < 200:
            y = BitString.random(16, rng)
            cls = _unate_point_class(inst, y)
            if cls is None:
                continue
            checked += 1
            k, _ = cls
            assert inst.base_value(y) != inst.base_value(y.flip_one(k))

    def test_validation(self):
        inst = UnateInstance.sample(16, "no", seed=1)
        with pytest.raises(ValueError, match="samples"):
            unate_no_family_stats(inst, samples=0)


class TestFarnessEstimate:
    def test_hits_constructor(self):
        est = FarnessEstimate.from_hits(250, 1000, seed=3)
        assert est.estimate == 0.25
        assert est.ci_halfwidth == pytest.approx(
            1.96 * (0.25 * 0.75 / 1000) ** 0.5
        )

    def test_middle_layer_enumeration(self):
        idx = middle_layer_indices(16, 4, 12)
        w = np.array([bin(v).count("1") for v in idx])
        assert w.min() >= 4 and w.max() <= 12
        assert len(idx) == sum(
            1 for v in range(1 << 16) if 4 <= bin(v).count("1") <= 12
        )


class TestExactMiddleSampler:
    def test_uniform_over_band(self):
        from cubetest.distance import sample_middle_layer_exact

        rng = RngStream(4, "exact-mid")
        counts = {}
        for _ in range(4000):
            x = sample_middle_layer_exact(8, 3, 5, rng)
            assert 3 <= x.weight <= 5
            counts[x.bits] = counts.get(x.bits, 0) + 1
        support = len(middle_layer_indices(8, 3, 5))
        assert len(counts) > support * 0.9
