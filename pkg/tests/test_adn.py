"""Diagonal construction over the split layout and its bounded verifier."""

import dataclasses
import json

import pytest

from kleenelab.adn import (CONDITION_2, CONDITION_3, DELTA_MARKER,
                           EMPTY_DIAGONAL, KILLED, NONE_YET, PSI_LAYOUT,
                           WAITING, CandidateRecord, DeltaSpec,
                           DiagonalEngine, DiagonalState, PsiSpec, adn_verify,
                           audit_diagonal, check_kills,
                           constructed_delta_spec, constructed_psi_spec,
                           delta, delta_code, diagonal_state_from_dict,
                           diagonal_step, psi, psi_code, psi_divergent,
                           run_diagonal, secondary_point, witness_point)
from kleenelab.lang import (LEFT, LOOP, RIGHT, apply, comp, const, const_code,
                            encode, eq, identity_code, ifz, loop_code,
                            nonempty_canonical_code, pair, triple, untriple)
from kleenelab.notions import (CURRENT_OBSERVATION, FREEZE_RULE,
                               MONOTONE_MEMBERSHIP, PERMANENT, PROVISIONAL,
                               EvidenceFact, check_permanence)

NONEMPTY = nonempty_canonical_code()
LOOPC = loop_code()
MARK = nonempty_canonical_code()
GRID8 = tuple((y, 256) for y in range(8))


@pytest.fixture(scope="module")
def state200():
    return run_diagonal(8, 200)


class TestLayout:
    def test_witness_points(self):
        assert [witness_point(e) for e in range(8)] == [5, 8, 12, 17, 23, 30, 38, 47]
        assert [secondary_point(e) for e in range(8)] == [14, 19, 25, 32, 40, 49, 59, 70]
        for e in range(8):
            assert witness_point(e) == pair(e, 2) == triple(e, 0, 1)
            assert secondary_point(e) == pair(e, 4) == triple(e, 1, 1)

    def test_divergent_region_is_structural(self):
        assert psi_divergent(witness_point(3))
        assert psi_divergent(secondary_point(3))
        assert psi_divergent(triple(0, 0, 7))
        assert not psi_divergent(triple(9, 9, 0))
        assert untriple(witness_point(3)) == (3, 0, 1)

    def test_marker_is_the_canonical_nonempty_code(self):
        assert DELTA_MARKER() == NONEMPTY == 640881812


class TestPsi:
    def test_code_is_stable(self):
        assert psi_code() == 1416796790648833592322

    def test_defined_region_runs_the_program(self):
        out = psi(triple(54, 3, 0), 100)
        assert (out.converged, out.value, out.steps_used) == (True, 5, 15)
        assert psi(triple(0, 7, 0), 100).value == 7
        assert psi(triple(1, 4, 0), 100).value == 5

    def test_divergent_region_never_converges(self):
        assert not psi(witness_point(0), 5000).converged
        assert not psi(triple(0, 0, 5), 5000).converged

    def test_defined_region_can_still_diverge(self):
        # layout puts (looping program, 0) in the defined region; psi
        # inherits the divergence rather than deciding it
        assert not psi(triple(LOOPC, 0, 0), 5000).converged


class TestDelta:
    def test_code_matches_its_construction(self):
        expected = ifz(eq(comp(RIGHT, LEFT), const(2)),
                       ifz(eq(apply(comp(LEFT, LEFT), LEFT), RIGHT),
                           const(NONEMPTY), LOOP),
                       LOOP)
        assert delta_code() == encode(expected)

    def test_defined_exactly_at_the_observed_value(self):
        w = witness_point(54)
        hit = delta(w, 5, 1000)
        assert (hit.converged, hit.value, hit.steps_used) == (True, MARK, 24)
        assert not delta(w, 6, 1000).converged

    def test_self_referential_witness(self):
        w = witness_point(identity_code())
        assert w == 5
        assert delta(w, w, 1000).value == MARK
        assert not delta(w, 4, 1000).converged

    def test_off_shape_points_diverge(self):
        assert not delta(secondary_point(0), 14, 1000).converged
        assert not delta(triple(0, 0, 0), 0, 1000).converged


class TestDiagonalRun:
    def test_two_hundred_stages(self, state200):
        assert state200.stage == 200
        assert state200.candidate_bound == 8
        assert state200.psi_layout == PSI_LAYOUT
        assert state200.per_candidate == (
            CandidateRecord(e=0, witness=5, status=KILLED, observed=5,
                            kill_stage=1, secondary=14, secondary_observed=14),
            CandidateRecord(e=1, witness=8, status=KILLED, observed=9,
                            kill_stage=1, secondary=19, secondary_observed=20),
            CandidateRecord(e=2, witness=12, status=KILLED, observed=2,
                            kill_stage=2, secondary=25, secondary_observed=2),
            CandidateRecord(e=3, witness=17, status=KILLED, observed=2,
                            kill_stage=3, secondary=32, secondary_observed=4),
            CandidateRecord(e=4, witness=23, status=KILLED, observed=0,
                            kill_stage=4, secondary=40, secondary_observed=0),
            CandidateRecord(e=5, witness=30, status=WAITING, observed=None,
                            kill_stage=None, secondary=49,
                            secondary_observed=None),
            CandidateRecord(e=6, witness=38, status=KILLED, observed=0,
                            kill_stage=6, secondary=59, secondary_observed=0),
            CandidateRecord(e=7, witness=47, status=KILLED, observed=4512,
                            kill_stage=7, secondary=70,
                            secondary_observed=9940),
        )

    def test_delta_entries_follow_the_kills(self, state200):
        assert state200.delta_defined == (
            (5, 5, MARK), (8, 9, MARK), (12, 2, MARK), (17, 2, MARK),
            (23, 0, MARK), (38, 0, MARK), (47, 4512, MARK),
        )

    def test_honest_state_passes_both_audits(self, state200):
        assert audit_diagonal(state200) == []
        assert check_kills(state200, 10_000) == []

    def test_determinism_and_lookup(self, state200):
        assert run_diagonal(8, 200) == state200
        assert state200.record_of(5).status == WAITING
        assert state200.record_of(99) is None

    def test_negative_stages_rejected(self):
        with pytest.raises(ValueError):
            run_diagonal(8, -1)


class TestEnginePurity:
    def test_bounded_chain_matches_the_run(self):
        cur = dataclasses.replace(EMPTY_DIAGONAL, candidate_bound=8)
        for _ in range(60):
            cur = diagonal_step(cur)
        assert cur == run_diagonal(8, 60)

    def test_unbounded_chain_matches_the_run(self):
        cur = EMPTY_DIAGONAL
        for _ in range(10):
            cur = diagonal_step(cur)
        unb = run_diagonal(None, 10)
        assert cur == unb
        # without a bound every index up to the stage is admitted
        assert [r.e for r in unb.per_candidate] == list(range(11))

    def test_resume_matches_uninterrupted(self, state200):
        eng = DiagonalEngine(start=run_diagonal(8, 90))
        eng.run_to(200)
        assert eng.export() == state200


class TestCheckKills:
    def test_starved_delta_budget_is_reported(self, state200):
        assert check_kills(state200, 5) == [
            f"candidate {e}: delta program misses its own kill"
            for e in (0, 1, 2, 3, 4, 6, 7)
        ]

    def test_forged_observed_value(self, state200):
        recs = list(state200.per_candidate)
        recs[0] = dataclasses.replace(recs[0], observed=6)
        forged = dataclasses.replace(state200, per_candidate=tuple(recs))
        out = check_kills(forged, 10_000)
        assert "candidate 0: recorded kill does not replay" in out

    def test_forged_kill_stage(self, state200):
        recs = list(state200.per_candidate)
        recs[0] = dataclasses.replace(recs[0], kill_stage=0)
        forged = dataclasses.replace(state200, per_candidate=tuple(recs))
        out = check_kills(forged, 10_000)
        assert out == ["candidate 0: recorded kill does not replay"]


def mk_state(records, entries, stage=10):
    return DiagonalState(stage=stage, delta_defined=tuple(entries),
                         psi_layout=PSI_LAYOUT,
                         per_candidate=tuple(records), candidate_bound=None)


HONEST_REC = CandidateRecord(e=0, witness=5, status=KILLED, observed=5,
                             kill_stage=1, secondary=14, secondary_observed=None)


class TestForgedDiagonalStates:
    def test_non_canonical_marker(self):
        state = mk_state([HONEST_REC], [(5, 5, 999)])
        assert audit_diagonal(state) == [
            "delta entry (5,5) carries a non-canonical marker",
        ]

    def test_two_values_over_one_witness(self):
        state = mk_state([HONEST_REC], [(5, 5, MARK), (5, 6, MARK)])
        assert audit_diagonal(state) == [
            "delta defined at 2 points over witness 5",
            "delta entry (5,6) but candidate 0 was observed at 5",
        ]

    def test_stray_entry(self):
        state = mk_state([HONEST_REC], [(5, 5, MARK), (6, 0, MARK)])
        assert audit_diagonal(state) == [
            "delta entry at 6, not the witness of a killed candidate",
        ]

    def test_entry_disagrees_with_the_observation(self):
        state = mk_state([HONEST_REC], [(5, 7, MARK)])
        assert audit_diagonal(state) == [
            "delta entry (5,7) but candidate 0 was observed at 5",
        ]

    def test_entry_in_the_defined_region(self):
        rec = dataclasses.replace(HONEST_REC, witness=triple(0, 0, 0))
        state = mk_state([rec], [(0, 5, MARK)])
        assert audit_diagonal(state) == [
            "delta entry at 0 lies in the defined region",
            "candidate 0 has off-layout witness points",
        ]

    def test_shared_witness(self):
        rec1 = CandidateRecord(e=1, witness=5, status=WAITING, observed=None,
                               kill_stage=None, secondary=secondary_point(1),
                               secondary_observed=None)
        state = mk_state([HONEST_REC, rec1], [(5, 5, MARK)])
        assert audit_diagonal(state) == [
            "witness 5 shared by candidates 0 and 1",
            "candidate 1 has off-layout witness points",
        ]

    def test_kill_without_observation(self):
        rec = dataclasses.replace(HONEST_REC, observed=None)
        state = mk_state([rec], [])
        assert audit_diagonal(state) == [
            "candidate 0 killed without an observed value",
        ]

    def test_broken_secondary_obligation(self):
        rec = dataclasses.replace(HONEST_REC, observed=3, secondary_observed=9)
        state = mk_state([rec], [(5, 3, MARK), (14, 9, MARK)])
        assert audit_diagonal(state) == [
            "delta entry at 14, not the witness of a killed candidate",
            "secondary obligation broken at candidate 0",
        ]


class TestVerifier:
    def test_killed_candidate_fails_condition_3(self):
        verdicts = adn_verify(identity_code(), constructed_psi_spec(),
                              constructed_delta_spec(), n_bound=5,
                              budget=10_000, grid=GRID8)
        assert [(v.n, v.violated, v.status) for v in verdicts] == [
            (0, NONE_YET, "ok"), (1, NONE_YET, "ok"), (2, NONE_YET, "ok"),
            (3, NONE_YET, "ok"), (4, NONE_YET, "ok"), (5, CONDITION_3, "ok"),
        ]
        cert = verdicts[5].evidence
        assert cert.kind == PERMANENT
        assert cert.witness == (5, 5)
        assert cert.stage_or_budget == 24
        assert cert.evidence == (
            EvidenceFact(element=pair(5, 5), set_id=f"graph:{delta_code()}",
                         stage=24, member=True, basis=MONOTONE_MEMBERSHIP),
            EvidenceFact(element=5, set_id="psi-domain", stage=0,
                         member=False, basis=FREEZE_RULE),
        )
        assert check_permanence(cert) == []

    def test_partial_candidate_reports_divergence(self):
        verdicts = adn_verify(5, constructed_psi_spec(),
                              constructed_delta_spec(), n_bound=3,
                              budget=10_000, grid=GRID8)
        assert [(v.n, v.violated, v.status) for v in verdicts] == [
            (0, NONE_YET, "ok"), (1, NONE_YET, "f-diverged"),
            (2, NONE_YET, "f-diverged"), (3, NONE_YET, "f-diverged"),
        ]

    def test_everywhere_divergent_candidate(self):
        verdicts = adn_verify(LOOPC, constructed_psi_spec(),
                              constructed_delta_spec(), n_bound=2,
                              budget=2000, grid=GRID8)
        assert all(v.status == "f-diverged" and v.violated == NONE_YET
                   and v.evidence is None for v in verdicts)

    def test_unsettled_psi(self):
        spec = PsiSpec(code=LOOPC, divergent=lambda n: False)
        verdicts = adn_verify(identity_code(), spec, constructed_delta_spec(),
                              n_bound=3, budget=200, grid=GRID8)
        assert all(v.status == "psi-unsettled" and v.violated == NONE_YET
                   for v in verdicts)

    def test_domain_separation_on_the_candidate_side(self):
        verdicts = adn_verify(const_code(NONEMPTY),
                              PsiSpec(code=const_code(LOOPC),
                                      divergent=lambda n: False),
                              constructed_delta_spec(), n_bound=1,
                              budget=2000, grid=((0, 400),))
        for v in verdicts:
            assert v.violated == CONDITION_2
            assert v.status == "ok"
            cert = v.evidence
            assert cert.kind == PROVISIONAL
            assert cert.witness == (v.n, NONEMPTY, LOOPC, 0)
            assert cert.stage_or_budget == 400
            assert cert.evidence == (
                EvidenceFact(element=0, set_id=f"domain:{NONEMPTY}",
                             stage=400, member=True,
                             basis=MONOTONE_MEMBERSHIP),
                EvidenceFact(element=0, set_id=f"domain:{LOOPC}",
                             stage=400, member=False,
                             basis=CURRENT_OBSERVATION),
            )

    def test_domain_separation_on_the_psi_side(self):
        verdicts = adn_verify(const_code(LOOPC),
                              PsiSpec(code=const_code(NONEMPTY),
                                      divergent=lambda n: False),
                              constructed_delta_spec(), n_bound=0,
                              budget=2000, grid=((0, 400),))
        cert = verdicts[0].evidence
        assert verdicts[0].violated == CONDITION_2
        assert cert.witness == (0, LOOPC, NONEMPTY, 0)
        assert cert.evidence == (
            EvidenceFact(element=0, set_id=f"domain:{LOOPC}", stage=400,
                         member=False, basis=CURRENT_OBSERVATION),
            EvidenceFact(element=0, set_id=f"domain:{NONEMPTY}", stage=400,
                         member=True, basis=MONOTONE_MEMBERSHIP),
        )

    def test_matching_specs_raise_nothing(self):
        spec = PsiSpec(code=const_code(NONEMPTY), divergent=lambda n: False)
        verdicts = adn_verify(const_code(NONEMPTY), spec,
                              constructed_delta_spec(), n_bound=3,
                              budget=2000, grid=GRID8)
        assert all(v.violated == NONE_YET and v.status == "ok"
                   for v in verdicts)

    def test_grid_is_normalized(self):
        out = adn_verify(identity_code(), constructed_psi_spec(),
                         constructed_delta_spec(), n_bound=0, budget=500,
                         grid=[[0, 50], [1, 50]])
        assert out[0].grid == ((0, 50), (1, 50))


class TestSerialization:
    def test_state_round_trip(self, state200):
        blob = json.dumps(state200.to_dict())
        assert diagonal_state_from_dict(json.loads(blob)) == state200

    def test_empty_round_trip(self):
        assert diagonal_state_from_dict(EMPTY_DIAGONAL.to_dict()) == EMPTY_DIAGONAL

    def test_verdict_dict_shape(self):
        verdicts = adn_verify(identity_code(), constructed_psi_spec(),
                              constructed_delta_spec(), n_bound=5,
                              budget=10_000, grid=((0, 64),))
        d = verdicts[5].to_dict()
        assert d["violated"] == CONDITION_3
        assert d["status"] == "ok"
        assert d["evidence"]["kind"] == PERMANENT
        assert d["grid"] == [[0, 64]]
        none = verdicts[0].to_dict()
        assert none["evidence"] is None
