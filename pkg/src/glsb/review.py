"""Human screening workflow: labels, consensus, and the audit log.

Each reviewer independently labels a discussion as valid or a false
positive (naming the exclusion rule that fired) and records codes for the
three extraction questions. Consensus is a pure function of the append-only
label log: one label is pending, two labels agree when verdict and the
type-code set (Q1) match, and three or more labels resolve by strict
majority verdict with codes merged by union across the majority side.
Free-form extractions (Q2/Q3) are merged by union rather than compared for
equality; they are reconciled by discussion, not by string match.

Resubmission by the same reviewer replaces their effective label but every
submission stays in the log, so replaying the log reproduces every
consensus state.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

Q1_TD_TYPES = "q1_td_types"
Q2_INDICATORS = "q2_indicators"
Q3_PRACTICES = "q3_practices"
QUESTIONS = (Q1_TD_TYPES, Q2_INDICATORS, Q3_PRACTICES)

VERDICT_VALID = "valid"
VERDICT_FALSE_POSITIVE = "false_positive"

STATUS_PENDING = "pending"
STATUS_AGREED = "agreed"
STATUS_CONFLICT = "conflict"
STATUS_RESOLVED = "resolved"

# Technical-debt type vocabulary (the taxonomy the default coding uses);
# projects can swap in their own list.
DEFAULT_TD_TYPES = (
    "architecture",
    "automation_test",
    "build",
    "code",
    "defect",
    "design",
    "documentation",
    "infrastructure",
    "people",
    "process",
    "requirements",
    "service",
    "test",
    "usability",
    "versioning",
)

DEFAULT_RULES = {
    "R1": "discussion does not concern technical debt",
    "R2": "no real present-or-past situation is described",
    "R3": "debt indicators do not come from the question's author",
    "R4": "recommended practice lacks backing from other users",
}


class LabelValidationError(Exception):
    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name
        self.message = message


class UnknownDiscussionError(Exception):
    pass


@dataclass(frozen=True)
class LabelSchema:
    questions: tuple[str, ...] = QUESTIONS
    td_type_vocabulary: tuple[str, ...] = DEFAULT_TD_TYPES
    exclusion_rules: dict = field(default_factory=lambda: dict(DEFAULT_RULES))

    def __post_init__(self) -> None:
        if not self.td_type_vocabulary:
            raise ValueError("td_type_vocabulary must be non-empty")
        if not self.exclusion_rules:
            raise ValueError("exclusion_rules must be non-empty")

    def to_json(self) -> dict:
        return {
            "questions": list(self.questions),
            "td_type_vocabulary": list(self.td_type_vocabulary),
            "exclusion_rules": dict(self.exclusion_rules),
        }

    @classmethod
    def from_json(cls, d: dict) -> "LabelSchema":
        return cls(
            questions=tuple(d.get("questions") or QUESTIONS),
            td_type_vocabulary=tuple(d["td_type_vocabulary"]),
            exclusion_rules=dict(d["exclusion_rules"]),
        )


@dataclass(frozen=True)
class Label:
    discussion_id: int
    reviewer_id: str
    verdict: str
    codes: dict  # question key -> list of code strings
    triggered_rule: str | None = None
    free_notes: str = ""
    created_at: str = ""  # ISO timestamp, caller-supplied for replayability
    request_token: str | None = None

    def validate(self, schema: LabelSchema) -> None:
        if self.verdict not in (VERDICT_VALID, VERDICT_FALSE_POSITIVE):
            raise LabelValidationError("verdict", f"unknown verdict {self.verdict!r}")
        if self.verdict == VERDICT_FALSE_POSITIVE:
            if not self.triggered_rule:
                raise LabelValidationError(
                    "triggered_rule", "required for a false-positive verdict"
                )
            if self.triggered_rule not in schema.exclusion_rules:
                raise LabelValidationError(
                    "triggered_rule", f"unknown rule {self.triggered_rule!r}"
                )
        else:
            td_types = self.codes.get(Q1_TD_TYPES) or []
            if not td_types:
                raise LabelValidationError(
                    Q1_TD_TYPES, "a valid verdict needs at least one type code"
                )
            unknown = set(td_types) - set(schema.td_type_vocabulary)
            if unknown:
                raise LabelValidationError(
                    Q1_TD_TYPES, f"codes outside the vocabulary: {sorted(unknown)}"
                )

    def q1_set(self) -> frozenset:
        return frozenset(self.codes.get(Q1_TD_TYPES) or ())

    def to_json(self) -> dict:
        return {
            "discussion_id": self.discussion_id,
            "reviewer_id": self.reviewer_id,
            "verdict": self.verdict,
            "triggered_rule": self.triggered_rule,
            "codes": {k: list(v) for k, v in sorted(self.codes.items())},
            "free_notes": self.free_notes,
            "created_at": self.created_at,
            "request_token": self.request_token,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Label":
        return cls(
            discussion_id=d["discussion_id"],
            reviewer_id=d["reviewer_id"],
            verdict=d["verdict"],
            triggered_rule=d.get("triggered_rule"),
            codes={k: list(v) for k, v in (d.get("codes") or {}).items()},
            free_notes=d.get("free_notes", ""),
            created_at=d.get("created_at", ""),
            request_token=d.get("request_token"),
        )


@dataclass(frozen=True)
class ConsensusState:
    discussion_id: int
    status: str
    resolved_verdict: str | None
    codes: dict  # merged codes once agreed/resolved
    reviewers: tuple[str, ...]

    def is_final(self) -> bool:
        return self.status in (STATUS_AGREED, STATUS_RESOLVED)

    def to_json(self) -> dict:
        return {
            "discussion_id": self.discussion_id,
            "status": self.status,
            "resolved_verdict": self.resolved_verdict,
            "codes": {k: list(v) for k, v in sorted(self.codes.items())},
            "reviewers": list(self.reviewers),
        }


def effective_labels(labels: Iterable[Label]) -> list[Label]:
    """Latest label per reviewer, in log order of first appearance."""
    latest: dict[str, Label] = {}
    for label in labels:
        latest[label.reviewer_id] = label
    return list(latest.values())


def _merge_codes(labels: list[Label]) -> dict:
    merged: dict[str, list[str]] = {}
    for label in labels:
        for question, codes in label.codes.items():
            merged.setdefault(question, [])
            merged[question] = sorted(set(merged[question]) | set(codes))
    return merged


def consensus_for(discussion_id: int, labels: Iterable[Label]) -> ConsensusState:
    """Compute the consensus state from the labels on one discussion.

    Works on the effective (latest per reviewer) labels, so the outcome
    depends only on that set, never on arrival order.
    """
    effective = [l for l in effective_labels(labels) if l.discussion_id == discussion_id]
    reviewers = tuple(sorted(l.reviewer_id for l in effective))

    if len(effective) == 0:
        return ConsensusState(discussion_id, STATUS_PENDING, None, {}, ())
    if len(effective) == 1:
        return ConsensusState(discussion_id, STATUS_PENDING, None, {}, reviewers)
    if len(effective) == 2:
        a, b = effective
        if a.verdict == b.verdict and a.q1_set() == b.q1_set():
            return ConsensusState(
                discussion_id,
                STATUS_AGREED,
                a.verdict,
                _merge_codes(effective),
                reviewers,
            )
        return ConsensusState(discussion_id, STATUS_CONFLICT, None, {}, reviewers)

    tally: dict[str, int] = {}
    for label in effective:
        tally[label.verdict] = tally.get(label.verdict, 0) + 1
    best = sorted(tally.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(best) > 1 and best[0][1] == best[1][1]:
        # An even split has no majority; stays in conflict awaiting another vote.
        return ConsensusState(discussion_id, STATUS_CONFLICT, None, {}, reviewers)
    verdict = best[0][0]
    majority = [l for l in effective if l.verdict == verdict]
    return ConsensusState(
        discussion_id, STATUS_RESOLVED, verdict, _merge_codes(majority), reviewers
    )


# ---------------------------------------------------------------------------
# Append-only label store
# ---------------------------------------------------------------------------

class ReviewStore:
    """Append-only audit log of labels for one project.

    Appends are serialized and flushed to disk before being acknowledged.
    All reads come from the in-memory replica, which is rebuilt from the log
    on open (the log is the single source of truth).
    """

    def __init__(self, path: Path, allowed_ids: set | None = None) -> None:
        self.path = Path(path)
        self.allowed_ids = allowed_ids
        self._lock = threading.Lock()
        self._labels: list[Label] = []
        self._by_discussion: dict[int, list[Label]] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._remember(Label.from_json(json.loads(line)))

    def _remember(self, label: Label) -> None:
        self._labels.append(label)
        self._by_discussion.setdefault(label.discussion_id, []).append(label)

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> list[Label]:
        return list(self._labels)

    def labels_for(self, discussion_id: int) -> list[Label]:
        return list(self._by_discussion.get(discussion_id, ()))

    def find_token(self, token: str) -> Label | None:
        for label in self._labels:
            if label.request_token == token:
                return label
        return None

    def append(self, label: Label) -> None:
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(label.to_json(), sort_keys=True))
                fh.write("\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._remember(label)

    def discussion_ids(self) -> list[int]:
        return sorted(self._by_discussion)


def submit_label(label: Label, schema: LabelSchema, store: ReviewStore) -> ConsensusState:
    """Validate, append to the audit log, and return the new consensus state.

    A repeated request token is served from the log without a second append
    (idempotent retry). A resubmission by the same reviewer is appended and
    replaces their effective label.
    """
    if store.allowed_ids is not None and label.discussion_id not in store.allowed_ids:
        raise UnknownDiscussionError(
            f"discussion {label.discussion_id} is not in the active iteration"
        )
    label.validate(schema)
    if label.request_token:
        existing = store.find_token(label.request_token)
        if existing is not None:
            return consensus_for(
                existing.discussion_id, store.labels_for(existing.discussion_id)
            )
    store.append(label)
    return consensus_for(label.discussion_id, store.labels_for(label.discussion_id))


def screening_queue(
    candidate_ids: Iterable[int], store: ReviewStore, reviewer_id: str
) -> list[int]:
    """Discussions awaiting this reviewer: conflicts first, then pending,
    ascending id within each tier. Finalized discussions never appear."""
    conflicts = []
    pending = []
    for cid in sorted(set(candidate_ids)):
        labels = store.labels_for(cid)
        if any(l.reviewer_id == reviewer_id for l in effective_labels(labels)):
            continue
        state = consensus_for(cid, labels)
        if state.status == STATUS_CONFLICT:
            conflicts.append(cid)
        elif state.status == STATUS_PENDING:
            pending.append(cid)
    return conflicts + pending


def valid_set(candidate_ids: Iterable[int], store: ReviewStore) -> set:
    """Ids whose consensus is final with a valid verdict."""
    out = set()
    for cid in set(candidate_ids):
        state = consensus_for(cid, store.labels_for(cid))
        if state.is_final() and state.resolved_verdict == VERDICT_VALID:
            out.add(cid)
    return out


def replay_states(store: ReviewStore) -> dict[int, ConsensusState]:
    """Recompute every discussion's consensus purely from the log."""
    return {
        cid: consensus_for(cid, store.labels_for(cid))
        for cid in store.discussion_ids()
    }
