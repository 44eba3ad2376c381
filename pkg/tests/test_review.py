"""Labels, consensus mechanics, queue ordering, audit-log replay."""

import itertools
import json

import pytest

from glsb.review import (
    Q1_TD_TYPES,
    Q2_INDICATORS,
    STATUS_AGREED,
    STATUS_CONFLICT,
    STATUS_PENDING,
    STATUS_RESOLVED,
    VERDICT_FALSE_POSITIVE,
    VERDICT_VALID,
    Label,
    LabelSchema,
    LabelValidationError,
    ReviewStore,
    UnknownDiscussionError,
    consensus_for,
    replay_states,
    screening_queue,
    submit_label,
    valid_set,
)

SCHEMA = LabelSchema()


def label(
    discussion_id=1, reviewer="r1", verdict=VERDICT_VALID, rule=None,
    codes=("process",), q2=(), token=None, created_at="2024-06-01T00:00:00+00:00",
):
    return Label(
        discussion_id=discussion_id,
        reviewer_id=reviewer,
        verdict=verdict,
        triggered_rule=rule,
        codes={Q1_TD_TYPES: list(codes), Q2_INDICATORS: list(q2)},
        created_at=created_at,
        request_token=token,
    )


def fp(discussion_id=1, reviewer="r1", rule="R2", token=None):
    return label(discussion_id, reviewer, VERDICT_FALSE_POSITIVE, rule, codes=())


@pytest.fixture
def store(tmp_path):
    return ReviewStore(tmp_path / "labels.jsonl")


class TestValidation:
    def test_false_positive_requires_rule(self):
        bad = label(verdict=VERDICT_FALSE_POSITIVE, codes=())
        with pytest.raises(LabelValidationError, match="triggered_rule"):
            bad.validate(SCHEMA)

    def test_unknown_rule_rejected(self):
        with pytest.raises(LabelValidationError, match="unknown rule"):
            fp(rule="R9").validate(SCHEMA)

    def test_valid_requires_type_codes(self):
        with pytest.raises(LabelValidationError, match="at least one type"):
            label(codes=()).validate(SCHEMA)

    def test_codes_must_be_in_vocabulary(self):
        with pytest.raises(LabelValidationError, match="outside the vocabulary"):
            label(codes=("not_a_type",)).validate(SCHEMA)

    def test_unknown_discussion_rejected(self, tmp_path):
        gated = ReviewStore(tmp_path / "l.jsonl", allowed_ids={1, 2})
        with pytest.raises(UnknownDiscussionError):
            submit_label(label(discussion_id=9), SCHEMA, gated)


class TestConsensus:
    def test_single_label_pending(self, store):
        state = submit_label(label(reviewer="r1"), SCHEMA, store)
        assert state.status == STATUS_PENDING

    def test_two_identical_labels_agree(self, store):
        submit_label(label(reviewer="r1", codes=("process", "people")), SCHEMA, store)
        state = submit_label(
            label(reviewer="r2", codes=("people", "process")), SCHEMA, store
        )
        assert state.status == STATUS_AGREED
        assert state.resolved_verdict == VERDICT_VALID
        assert state.codes[Q1_TD_TYPES] == ["people", "process"]

    def test_verdict_disagreement_is_conflict(self, store):
        submit_label(label(reviewer="r1"), SCHEMA, store)
        state = submit_label(fp(reviewer="r2"), SCHEMA, store)
        assert state.status == STATUS_CONFLICT

    def test_code_set_disagreement_is_conflict(self, store):
        submit_label(label(reviewer="r1", codes=("process",)), SCHEMA, store)
        state = submit_label(label(reviewer="r2", codes=("people",)), SCHEMA, store)
        assert state.status == STATUS_CONFLICT

    def test_third_reviewer_majority_resolves(self, store):
        submit_label(label(reviewer="r1"), SCHEMA, store)
        submit_label(fp(reviewer="r2"), SCHEMA, store)
        state = submit_label(label(reviewer="r3"), SCHEMA, store)
        assert state.status == STATUS_RESOLVED
        assert state.resolved_verdict == VERDICT_VALID

    def test_majority_codes_are_union_of_majority_side(self, store):
        submit_label(
            label(reviewer="r1", codes=("process",), q2=("ind_a",)), SCHEMA, store
        )
        submit_label(fp(reviewer="r2"), SCHEMA, store)
        state = submit_label(
            label(reviewer="r3", codes=("people",), q2=("ind_b",)), SCHEMA, store
        )
        assert state.codes[Q1_TD_TYPES] == ["people", "process"]
        assert state.codes[Q2_INDICATORS] == ["ind_a", "ind_b"]

    def test_resubmission_replaces_but_is_audited(self, store):
        submit_label(label(reviewer="r1"), SCHEMA, store)
        state = submit_label(fp(reviewer="r1"), SCHEMA, store)
        assert state.status == STATUS_PENDING  # still one effective reviewer
        assert len(store.labels_for(1)) == 2  # both submissions audited

    def test_q2_differences_do_not_block_agreement(self, store):
        submit_label(label(reviewer="r1", q2=("seen by r1",)), SCHEMA, store)
        state = submit_label(label(reviewer="r2", q2=("seen by r2",)), SCHEMA, store)
        assert state.status == STATUS_AGREED
        assert state.codes[Q2_INDICATORS] == ["seen by r1", "seen by r2"]


class TestOrderIndependence:
    def outcomes(self, labels):
        seen = set()
        for perm in itertools.permutations(labels):
            state = consensus_for(1, list(perm))
            seen.add(
                (
                    state.status,
                    state.resolved_verdict,
                    json.dumps(state.codes, sort_keys=True),
                )
            )
        return seen

    def test_exhaustive_three_reviewer_permutations(self):
        verdict_space = [VERDICT_VALID, VERDICT_FALSE_POSITIVE]
        for combo in itertools.product(verdict_space, repeat=3):
            labels = [
                label(reviewer=f"r{i}") if v == VERDICT_VALID else fp(reviewer=f"r{i}")
                for i, v in enumerate(combo)
            ]
            outcomes = self.outcomes(labels)
            assert len(outcomes) == 1, combo
            status, verdict, _codes = next(iter(outcomes))
            assert status == STATUS_RESOLVED
            majority = (
                VERDICT_VALID
                if combo.count(VERDICT_VALID) >= 2
                else VERDICT_FALSE_POSITIVE
            )
            assert verdict == majority

    def test_exhaustive_two_reviewer_permutations(self):
        cases = [
            ([label(reviewer="r1"), label(reviewer="r2")], STATUS_AGREED),
            ([label(reviewer="r1"), fp(reviewer="r2")], STATUS_CONFLICT),
            ([fp(reviewer="r1"), fp(reviewer="r2")], STATUS_AGREED),
        ]
        for labels, expected in cases:
            outcomes = self.outcomes(labels)
            assert len(outcomes) == 1
            assert next(iter(outcomes))[0] == expected

    def test_four_way_tie_stays_in_conflict(self):
        labels = [
            label(reviewer="r1"), label(reviewer="r2"),
            fp(reviewer="r3"), fp(reviewer="r4"),
        ]
        state = consensus_for(1, labels)
        assert state.status == STATUS_CONFLICT


class TestQueue:
    def test_everything_labeled_means_empty_queue(self, store):
        submit_label(label(1, "r1"), SCHEMA, store)
        assert screening_queue([1], store, "r1") == []

    def test_conflicts_come_first(self, store):
        submit_label(label(5, "r1"), SCHEMA, store)
        submit_label(fp(5, "r2"), SCHEMA, store)
        queue = screening_queue([1, 2, 3, 5], store, "r3")
        assert queue == [5, 1, 2, 3]

    def test_finalized_items_never_queued(self, store):
        submit_label(label(1, "r1"), SCHEMA, store)
        submit_label(label(1, "r2"), SCHEMA, store)
        assert screening_queue([1, 2], store, "r3") == [2]

    def test_mid_stream_fixture_ordering(self, store):
        # 10 discussions, two reviewers mid-stream; expectation derived by hand
        for d in (1, 2, 3, 4):
            submit_label(label(d, "r1"), SCHEMA, store)
            submit_label(label(d, "r2"), SCHEMA, store)  # agreed
        submit_label(label(5, "r1"), SCHEMA, store)
        submit_label(fp(5, "r2"), SCHEMA, store)  # conflict
        submit_label(label(6, "r1"), SCHEMA, store)  # pending, r1 done
        submit_label(label(7, "r2"), SCHEMA, store)  # pending, r2 done
        # r1 already labeled the conflict on 5, so it needs a third reviewer,
        # not r1; only r3 sees it, and ahead of the pending tier
        queue_r1 = screening_queue(range(1, 11), store, "r1")
        assert queue_r1 == [7, 8, 9, 10]
        queue_r2 = screening_queue(range(1, 11), store, "r2")
        assert queue_r2 == [6, 8, 9, 10]
        queue_r3 = screening_queue(range(1, 11), store, "r3")
        assert queue_r3 == [5, 6, 7, 8, 9, 10]


class TestValidSet:
    def test_no_consensus_is_empty(self, store):
        submit_label(label(1, "r1"), SCHEMA, store)
        assert valid_set([1, 2], store) == set()

    def test_counts_agreed_and_resolved_valid(self, store):
        submit_label(label(1, "r1"), SCHEMA, store)
        submit_label(label(1, "r2"), SCHEMA, store)
        submit_label(fp(2, "r1"), SCHEMA, store)
        submit_label(fp(2, "r2"), SCHEMA, store)
        submit_label(label(3, "r1"), SCHEMA, store)
        submit_label(fp(3, "r2"), SCHEMA, store)
        submit_label(label(3, "r3"), SCHEMA, store)
        assert valid_set([1, 2, 3], store) == {1, 3}

    def test_matches_brute_force_scan(self, store):
        import random

        rng = random.Random(12)
        for d in range(1, 30):
            for r in ("r1", "r2", "r3")[: rng.randint(1, 3)]:
                if rng.random() < 0.5:
                    submit_label(label(d, r), SCHEMA, store)
                else:
                    submit_label(fp(d, r), SCHEMA, store)
        got = valid_set(range(1, 30), store)
        brute = set()
        for d in range(1, 30):
            state = consensus_for(d, store.labels_for(d))
            if (
                state.status in (STATUS_AGREED, STATUS_RESOLVED)
                and state.resolved_verdict == VERDICT_VALID
            ):
                brute.add(d)
        assert got == brute

    def test_never_valid_and_conflicted_at_once(self, store):
        submit_label(label(1, "r1"), SCHEMA, store)
        submit_label(fp(1, "r2"), SCHEMA, store)
        state = consensus_for(1, store.labels_for(1))
        assert state.status == STATUS_CONFLICT
        assert valid_set([1], store) == set()


class TestStoreAndReplay:
    def test_log_replay_reproduces_states_byte_identically(self, tmp_path):
        path = tmp_path / "labels.jsonl"
        store = ReviewStore(path)
        submit_label(label(1, "r1"), SCHEMA, store)
        submit_label(label(1, "r2"), SCHEMA, store)
        submit_label(label(2, "r1"), SCHEMA, store)
        submit_label(fp(2, "r2"), SCHEMA, store)
        submit_label(fp(2, "r3"), SCHEMA, store)
        live = {
            cid: json.dumps(state.to_json(), sort_keys=True)
            for cid, state in replay_states(store).items()
        }
        reloaded = ReviewStore(path)
        replayed = {
            cid: json.dumps(state.to_json(), sort_keys=True)
            for cid, state in replay_states(reloaded).items()
        }
        assert live == replayed

    def test_append_only_log_grows(self, tmp_path):
        path = tmp_path / "labels.jsonl"
        store = ReviewStore(path)
        submit_label(label(1, "r1"), SCHEMA, store)
        first = path.read_text()
        submit_label(label(1, "r2"), SCHEMA, store)
        assert path.read_text().startswith(first)

    def test_request_token_idempotent(self, store):
        state1 = submit_label(label(1, "r1", token="tok-1"), SCHEMA, store)
        state2 = submit_label(label(1, "r1", token="tok-1"), SCHEMA, store)
        assert len(store.labels_for(1)) == 1
        assert state1.to_json() == state2.to_json()
