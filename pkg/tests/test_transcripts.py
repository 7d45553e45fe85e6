from __future__ import annotations

import pytest

from cubetest.core import BitString, RngStream
from cubetest.families import MonoInstance, OneLevelInstance, UnateInstance
from cubetest.sigoracle import (
    ClausePattern,
    FullSignature,
    OutOfBandError,
    TermPattern,
    UnateSignature,
    mono_full_signature,
)
from cubetest.transcripts import (
    ClassifierConfig,
    EdgeClass,
    MonoTranscript,
    OneLevelSignatureOracle,
    SingleLevelTranscript,
    UnateSignatureOracle,
    UnateTranscript,
    breached_terms,
    check_balanced_step,
    classify_mono_edge,
    classify_nonadaptive_outcome,
    classify_unate_edge,
    consistency_status,
    induced_mono_tuple,
    induced_single_level_tuple,
)

from conftest import random_middle


def full_sig(term, clause=None, a=None, b=None):
    return FullSignature(term, clause, a, b)


def point(n, ones):
    return BitString.from_indices(n, ones)


class TestMonoTranscriptUpdates:
    def test_singleton_creation(self):
        t = MonoTranscript(16)
        x = point(16, [0, 2, 4, 6, 8])
        sig = full_sig(TermPattern("unique", 4), ClausePattern("unique", 2), a=1)
        t.extend(x, sig)
        assert t.I == {4}
        assert t.J[4] == {2}
        assert t.P[4] == [0] and t.Pij[(4, 2)] == [0]
        assert t.A1[4] == {0, 2, 4, 6, 8}
        assert t.A0[4] == set(range(16)) - {0, 2, 4, 6, 8}
        assert t.rho[(4, 2)] == {0: 1}

    def test_zero_signature_feeds_every_r(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2]),
            full_sig(TermPattern("multi", 1, 5), None),
        )
        before_p = {i: list(v) for i, v in t.P.items()}
        t.extend(point(16, [3, 4, 5]), full_sig(TermPattern("none"), None))
        assert {i: list(v) for i, v in t.P.items()} == before_p
        assert t.R[1] == [1] and t.R[5] == [1]

    def test_r_backfill_on_new_term(self):
        t = MonoTranscript(16)
        t.extend(point(16, [0, 1]), full_sig(TermPattern("none"), None))
        t.extend(
            point(16, [2, 3]),
            full_sig(TermPattern("unique", 7), ClausePattern("all_one")),
        )
        # the earlier query is known not to satisfy term 7
        assert t.R[7] == [0]

    def test_star_entries_do_not_backfill(self):
        t = MonoTranscript(16)
        # multi pattern (1,3): entries beyond 3 are unknown
        t.extend(point(16, [0]), full_sig(TermPattern("multi", 1, 3), None))
        t.extend(
            point(16, [1]),
            full_sig(TermPattern("unique", 9), ClausePattern("all_one")),
        )
        assert t.R[9] == []  # first query's entry at 9 is unknown, not 0
        assert t.R[1] == [1] and t.R[3] == [1]

    def test_incremental_equals_scratch_random(self, rng):
        for seed in range(60):
            inst = MonoInstance.sample(16, "no", seed=seed)
            t = MonoTranscript(16)
            pairs = []
            for _ in range(20):
                x = random_middle(inst, rng)
                sig = mono_full_signature(inst, x)
                t.extend(x, sig)
                pairs.append((x, sig))
            ref = induced_mono_tuple(pairs)
            assert t.I == ref.I and t.J == ref.J
            assert t.P == ref.P and t.R == ref.R
            assert t.Pij == ref.Pij and t.Rij == ref.Rij
            assert t.A1 == ref.A1 and t.A0 == ref.A0
            assert t.Aij1 == ref.Aij1 and t.Aij0 == ref.Aij0
            assert t.rho == ref.rho

    def test_axioms_on_random_transcripts(self, rng):
        for seed in range(40):
            inst = MonoInstance.sample(16, "yes", seed=seed)
            t = MonoTranscript(16)
            for _ in range(30):
                x = random_middle(inst, rng)
                t.extend(x, mono_full_signature(inst, x))
            assert t.check_axioms() == []
            assert t.cross_check_instance(inst) == []

    def test_extend_validates(self):
        t = MonoTranscript(16)
        with pytest.raises(ValueError):
            t.extend(point(8, [0]), full_sig(TermPattern("none"), None))
        with pytest.raises(ValueError):
            t.extend(point(16, [0]), UnateSignature(TermPattern("none")))


class TestConsistency:
    def test_statuses(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1]),
            full_sig(TermPattern("unique", 2), ClausePattern("unique", 1), a=0),
        )
        assert consistency_status(t, 2, 1) == "zero_consistent"
        t.extend(
            point(16, [0, 2]),
            full_sig(TermPattern("unique", 2), ClausePattern("unique", 1), a=1),
        )
        assert consistency_status(t, 2, 1) == "inconsistent"
        with pytest.raises(KeyError):
            consistency_status(t, 2, 9)


class TestMonoClassifier:
    def setup_method(self):
        self.cfg_loose = ClassifierConfig(16, alpha=4.0, mono_drop_threshold=4)
        self.cfg_std = ClassifierConfig(16, alpha=4.0)

    def test_first_query_is_clean(self):
        t = MonoTranscript(16)
        edge = classify_mono_edge(
            t,
            point(16, [0, 1]),
            full_sig(TermPattern("unique", 1), ClausePattern("all_one")),
            self.cfg_std,
        )
        assert edge.kind is None

    def test_e1_large_one_drop(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3, 4, 5, 6, 7]),
            full_sig(TermPattern("unique", 3), ClausePattern("all_one")),
        )
        x = point(16, [0, 8, 9, 10, 11, 12, 13, 14])  # kills ones 1..7 of A_{3,1}
        sig = full_sig(TermPattern("unique", 3), ClausePattern("all_one"))
        edge = classify_mono_edge(t, x, sig, self.cfg_loose)
        assert edge == EdgeClass("E1", 3)

    def test_e2_large_zero_drop(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3]),
            full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0),
        )
        # joins the same cell while setting many common zeros to one
        x = point(16, [0, 1, 2, 3, 8, 9, 10, 11, 12])
        sig = full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0)
        edge = classify_mono_edge(t, x, sig, self.cfg_loose)
        assert edge == EdgeClass("E2", 3, 5)

    def test_e3_zero_consistent_flip(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3]),
            full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0),
        )
        x = point(16, [0, 1, 2, 4])
        sig = full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=1)
        edge = classify_mono_edge(t, x, sig, self.cfg_std)
        assert edge == EdgeClass("E3", 3, 5)

    def test_e4_one_consistent_flip(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3]),
            full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=1),
        )
        x = point(16, [0, 1, 2, 4])
        sig = full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0)
        edge = classify_mono_edge(t, x, sig, self.cfg_std)
        assert edge == EdgeClass("E4", 3, 5)

    def test_e3_requires_not_e2(self):
        # same flip as E3 but with a huge zero-drop: E2 wins, E3 excluded
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3]),
            full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0),
        )
        x = point(16, [0, 1, 2, 3, 8, 9, 10, 11, 12])
        sig = full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=1)
        edge = classify_mono_edge(t, x, sig, self.cfg_loose)
        assert edge.kind == "E2"

    def test_ambiguous_reports_lowest(self):
        # E1 (term drop) and E2 (cell drop) at the same edge
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3, 4, 5, 6, 7]),
            full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0),
        )
        x = point(16, [0, 8, 9, 10, 11, 12, 13, 14])
        sig = full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0)
        edge = classify_mono_edge(t, x, sig, self.cfg_loose)
        assert edge.kind == "E1"
        assert set(edge.ambiguous) == {"E1", "E2"}

    def test_silent_after_first_bad_edge(self):
        t = MonoTranscript(16)
        t.extend(
            point(16, [0, 1, 2, 3]),
            full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=0),
        )
        t.bad_edge = EdgeClass("E3", 3, 5)
        x = point(16, [0, 1, 2, 4])
        sig = full_sig(TermPattern("unique", 3), ClausePattern("unique", 5), a=1)
        assert classify_mono_edge(t, x, sig, self.cfg_std).kind is None


class TestUnateTranscript:
    def test_oracle_reveals_on_breach(self):
        inst = UnateInstance.from_parts(
            16,
            "no",
            m_members=range(8),
            terms=[[0], [1, 2, 3, 4, 5], [6, 7]],
            dictators=[(8, True), (9, False), (10, False)],
        )
        oracle = UnateSignatureOracle(inst)
        x1 = point(16, [0, 8])
        sig, revealed = oracle.query(x1)
        assert sig.term == TermPattern("unique", 0)
        assert revealed == {}
        # same routing, conflicting dictator value -> inconsistent -> breached
        x2 = point(16, [0])
        sig2, revealed2 = oracle.query(x2)
        assert sig2.a != sig.a
        assert revealed2 == {0: 8}
        assert oracle.transcript.I_B == {0}
        assert oracle.transcript.delta[0] == 8

    def test_breach_by_overlap_shrink(self):
        inst = UnateInstance.from_parts(
            100,
            "no",
            m_members=range(50),
            terms=[[0], [40, 41, 42]],
            dictators=[(70, False), (51, False)],
        )
        oracle = UnateSignatureOracle(inst)
        m_part = list(range(25))  # in-band half of M, term 0 satisfied
        oracle.query(point(100, m_part + list(range(50, 75))))
        t = oracle.transcript
        assert t.I_S == {0}
        assert len(t.common_coords(0) & t.Mbar) == 50
        # second query agrees on only 5 complement coordinates but keeps
        # the dictator value consistent (coordinate 70 stays 1)
        sig, revealed = oracle.query(point(100, m_part + list(range(70, 100))))
        assert consistency_status(t, 0) == "one_consistent"
        assert 0 in t.I_B and revealed == {0: 70}

    def test_breached_monotone_and_scratch_equal(self, rng):
        for seed in range(20):
            inst = UnateInstance.sample(16, "no", seed=seed)
            oracle = UnateSignatureOracle(inst)
            prev: set = set()
            for _ in range(25):
                x = BitString.random(16, rng)
                try:
                    oracle.query(x)
                except OutOfBandError:
                    continue
                t = oracle.transcript
                assert prev <= t.I_B  # breached stays breached
                prev = set(t.I_B)
                scratch_b, scratch_s = breached_terms(t)
                assert scratch_b == frozenset(t.I_B)
                assert scratch_s == frozenset(t.I_S)

    def test_single_level_scratch_equivalence(self, rng):
        for seed in range(20):
            inst = OneLevelInstance.sample(16, "no", seed=seed)
            oracle = OneLevelSignatureOracle(inst)
            t = SingleLevelTranscript(16)
            pairs = []
            for _ in range(20):
                x = random_middle(inst, rng)
                sig = oracle.query(x)
                t.extend(x, sig)
                pairs.append((x, sig))
            ref = induced_single_level_tuple(pairs)
            assert t.I == ref.I and t.P == ref.P and t.R == ref.R
            assert t.A1 == ref.A1 and t.A0 == ref.A0 and t.rho == ref.rho

    def test_reveal_required(self):
        t = UnateTranscript(16, range(8))
        sig1 = UnateSignature(TermPattern("unique", 0), a=1)
        sig2 = UnateSignature(TermPattern("unique", 0), a=0)
        t.extend(point(16, [0, 8]), sig1, reveal={})
        with pytest.raises(ValueError, match="no revelation"):
            t.extend(point(16, [0]), sig2)


class TestUnateClassifier:
    def test_first_query_clean(self):
        t = UnateTranscript(16, range(8))
        cfg = ClassifierConfig(16)
        sig = UnateSignature(TermPattern("unique", 0), a=1)
        edge = classify_unate_edge(t, point(16, [0, 8]), sig, {}, cfg)
        assert edge.kind is None

    def test_e1_agreement_drop(self):
        cfg = ClassifierConfig(16, unate_drop_threshold=6)
        t = UnateTranscript(16, range(8))
        t.extend(point(16, [0, 1, 2, 8, 9]), UnateSignature(TermPattern("unique", 0), a=1), reveal={})
        x = point(16, [0, 3, 4, 10, 11, 12])  # disagrees widely inside A_0
        sig = UnateSignature(TermPattern("unique", 0), a=1)
        edge = classify_unate_edge(t, x, sig, {}, cfg)
        assert edge == EdgeClass("E1", 0)

    def test_e2_breach_count(self):
        # standard cap at n=16 is below 1, so the first breach trips E2
        cfg = ClassifierConfig(16)
        assert cfg.breach_cap < 1
        inst = UnateInstance.from_parts(
            16,
            "no",
            m_members=range(8),
            terms=[[0], [1, 2, 3, 4, 5], [6, 7]],
            dictators=[(8, False), (9, False), (10, False)],
        )
        oracle = UnateSignatureOracle(inst)
        oracle.query(point(16, [0, 8]))
        x = point(16, [0])
        edge = oracle.classify_next(x, cfg)
        assert edge.kind == "E2"

    def test_e3_special_variable_collision(self):
        # cap raised so two breaches are allowed; they share delta -> E3
        cfg = ClassifierConfig(16, breach_count_cap=5)
        inst = UnateInstance.from_parts(
            16,
            "no",
            m_members=range(8),
            terms=[[0], [1], [6, 7]],
            dictators=[(8, False), (8, True), (10, False)],
        )
        oracle = UnateSignatureOracle(inst)
        oracle.query(point(16, [0, 8]))
        oracle.query(point(16, [0]))  # breach term 0 (inconsistent)
        assert oracle.transcript.I_B == {0}
        oracle.query(point(16, [1, 8]))
        x = point(16, [1])  # breaches term 1, delta collision at 8
        edge = oracle.classify_next(x, cfg)
        assert edge == EdgeClass("E3", 0, 1)

    def test_priority_e1_over_e2(self):
        cfg = ClassifierConfig(16, unate_drop_threshold=4)
        inst = UnateInstance.from_parts(
            16,
            "no",
            m_members=range(8),
            terms=[[0], [1, 2, 3, 4, 5], [6, 7]],
            dictators=[(8, False), (9, False), (10, False)],
        )
        oracle = UnateSignatureOracle(inst)
        oracle.query(point(16, [0, 8, 9, 10, 11]))
        # large disagreement AND an inconsistency-breach at once
        x = point(16, [0, 12, 13, 14, 15])
        edge = oracle.classify_next(x, cfg)
        assert edge.kind == "E1"


class TestBalance:
    def test_single_prior_query_vacuous(self):
        t = UnateTranscript(16, range(8))
        t.extend(point(16, [0, 8]), UnateSignature(TermPattern("unique", 0), a=1), reveal={})
        assert check_balanced_step(t, point(16, [1, 9]))

    def test_repeat_query_vacuous(self):
        t = UnateTranscript(16, range(8))
        x = point(16, [0, 8])
        t.extend(x, UnateSignature(TermPattern("unique", 0), a=1), reveal={})
        assert check_balanced_step(t, x)

    def test_adversarial_flip_fails(self):
        # disagreements all outside M (or 0->1 inside M): delta large but
        # delta_1 empty
        cfg = ClassifierConfig(16, balance_delta_threshold=6, balance_floor=2)
        t = UnateTranscript(16, range(8))
        t.extend(
            point(16, [0, 1, 8, 9, 10, 11, 12, 13]),
            UnateSignature(TermPattern("unique", 0), a=1),
            reveal={},
        )
        x = point(16, [0, 1, 2, 3])  # flips complement ones down, M zeros up
        assert not check_balanced_step(t, x, cfg=cfg)

    def test_subset_form_is_stronger(self, rng):
        # the per-term check inspects the agreement set of each P_i, which
        # the subset form also covers (as Q = P_i): failing per-term must
        # fail the subset form; the converse need not hold
        cfg = ClassifierConfig(16, balance_delta_threshold=5, balance_floor=2)
        seen_fail = 0
        for seed in range(20):
            inst = UnateInstance.sample(16, "no", seed=seed)
            oracle = UnateSignatureOracle(inst)
            g = RngStream(seed, "balance")
            added = 0
            while added < 5:
                x = BitString.random(16, g)
                try:
                    oracle.query(x)
                    added += 1
                except OutOfBandError:
                    continue
            for _ in range(10):
                probe = BitString.random(16, g)
                per_pi = check_balanced_step(oracle.transcript, probe, cfg=cfg)
                if not per_pi:
                    seen_fail += 1
                    assert not check_balanced_step(
                        oracle.transcript, probe, mode="all_subsets", cfg=cfg
                    )
        assert seen_fail > 0  # the loosened thresholds make failures reachable


class TestNonadaptiveOutcome:
    def test_singletons_good(self):
        t = SingleLevelTranscript(16)
        t.extend(point(16, [0, 1, 2, 3, 4, 5, 6, 7]), UnateSignature(TermPattern("unique", 0), a=1))
        t.extend(point(16, [1, 2, 3, 4, 5, 6, 7, 8]), UnateSignature(TermPattern("unique", 1), a=0))
        cfg = ClassifierConfig(16, alpha=4.0)
        assert classify_nonadaptive_outcome(t, cfg).label == "good"

    def test_inconsistent_is_bad(self):
        t = SingleLevelTranscript(16)
        t.extend(point(16, [0, 1, 2, 3, 4, 5, 6, 7]), UnateSignature(TermPattern("unique", 0), a=1))
        t.extend(point(16, [0, 1, 2, 3, 4, 5, 6, 9]), UnateSignature(TermPattern("unique", 0), a=0))
        cfg = ClassifierConfig(16, alpha=4.0)
        out = classify_nonadaptive_outcome(t, cfg)
        assert out.label == "bad" and out.reason == "inconsistent"

    def test_low_shared_ones_is_bad(self):
        # shared-ones floor at alpha=1: 8 - 4*4 < 0 is vacuous, so pin the
        # floor explicitly
        cfg = ClassifierConfig(16, shared_ones_floor=2)
        t = SingleLevelTranscript(16)
        t.extend(point(16, [0, 1, 2, 3, 4, 5, 6, 7]), UnateSignature(TermPattern("unique", 0), a=1))
        t.extend(point(16, [0, 8, 9, 10, 11, 12, 13, 14]), UnateSignature(TermPattern("unique", 0), a=1))
        out = classify_nonadaptive_outcome(t, cfg)
        assert out.label == "bad" and out.reason == "low_shared_ones"
        assert out.i == 0

    def test_matches_consistency_helper(self, rng):
        cfg = ClassifierConfig(16, alpha=4.0)
        for seed in range(15):
            inst = OneLevelInstance.sample(16, "no", seed=seed)
            oracle = OneLevelSignatureOracle(inst)
            t = SingleLevelTranscript(16)
            for _ in range(15):
                x = random_middle(inst, rng)
                t.extend(x, oracle.query(x))
            out = classify_nonadaptive_outcome(t, cfg)
            any_incons = any(
                consistency_status(t, i) == "inconsistent" for i in t.I
            )
            if any_incons:
                assert out.label == "bad"


class TestTranscriptDump:
    def test_mono_dump_schema(self, rng):
        import json

        inst = MonoInstance.sample(16, "no", seed=3)
        t = MonoTranscript(16)
        for _ in range(6):
            x = random_middle(inst, rng)
            sig = mono_full_signature(inst, x)
            t.edge_classes.append(
                classify_mono_edge(t, x, sig, ClassifierConfig(16))
                or None
            )
            t.extend(x, sig)
        lines = t.dump_jsonl().splitlines()
        assert len(lines) == 6
        sizes_prev = 0
        for line in lines:
            rec = json.loads(line)
            assert {"x", "signature", "sizes"} <= set(rec)
            assert rec["sizes"]["queries"] == sizes_prev + 1
            sizes_prev += 1

    def test_unate_dump_records_breaches(self):
        import json

        inst = UnateInstance.from_parts(
            16,
            "no",
            m_members=range(8),
            terms=[[0], [1, 2, 3, 4, 5], [6, 7]],
            dictators=[(8, False), (9, False), (10, False)],
        )
        oracle = UnateSignatureOracle(inst)
        oracle.query(point(16, [0, 8]))
        oracle.query(point(16, [0]))
        lines = [json.loads(l) for l in oracle.transcript.dump_jsonl().splitlines()]
        assert len(lines) == 2
        assert "breach_events" not in lines[0]
        assert lines[1]["breach_events"] == {"0": 8}
