"""Bundled synthetic project fixture.

Builds a complete, deterministic review project with engineered counts at
realistic single-iteration scale: strategy-level candidate counts
34/50/104/156, unique counts 25/47/61/111 plus 47 multi-provenance
discoveries (overlap classes 37/4/2/1/1/1/1, 291 unique), a 226-candidate
/ 108-valid search start set, and labels yielding 15/19/59/69
strategy-level valid and 130 unique valid discussions.

Everything goes through the real pipeline: corpus store -> project ->
search start set -> label replay -> snowball iteration -> label replay.
The builder verifies each engineered count as it goes and raises if any
drifts, so downstream tests can trust the fixture's advertised numbers
(written to fixture-manifest.json inside the project directory).
"""

from __future__ import annotations

import json
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from . import review, snowball
from .ingest import CorpusStore, write_store
from .metrics import percent_int
from .project import Project, ProjectConfig, default_config
from .records import (
    ANSWER,
    LINK_LINKED,
    ORIGIN_API,
    QUESTION,
    CommentRecord,
    PostLinkRecord,
    PostRecord,
    RelatedEdgeRecord,
)

# Filler vocabulary; nothing here may contain a search term as a substring.
WORDS = (
    "sprint", "planning", "velocity", "team", "standup", "backlog",
    "refactor", "release", "testing", "meeting", "estimate", "deadline",
    "scope", "quality", "deploy", "pipeline", "roadmap", "stakeholder",
    "burndown", "capacity", "retrospective", "workflow", "milestone",
    "feature", "delivery",
)
TAG_POOL = ("agile", "scrum", "kanban", "management", "planning-tags",
            "estimation", "teamwork", "delivery-process")

SEARCH_TERMS = ("debt", "shortcut")

START_COUNT = 108
SEARCH_SCREENED = 226

# (strategies, candidate count, valid count) — the provenance classes.
CLASSES = (
    (("LinkedBSB",), 25, 11),
    (("LinkedFSB",), 47, 18),
    (("RelatedBSB",), 61, 31),
    (("RelatedFSB",), 111, 41),
    (("RelatedBSB", "RelatedFSB"), 37, 25),
    (("LinkedBSB", "RelatedBSB", "RelatedFSB"), 4, 1),
    (("LinkedBSB", "RelatedFSB"), 2, 1),
    (("LinkedBSB", "LinkedFSB", "RelatedBSB", "RelatedFSB"), 1, 1),
    (("LinkedBSB", "RelatedBSB"), 1, 1),
    (("LinkedBSB", "LinkedFSB"), 1, 0),
    (("LinkedFSB", "RelatedFSB"), 1, 0),
)

EXPECTED_STRATEGY_CANDIDATES = {
    "LinkedBSB": 34, "LinkedFSB": 50, "RelatedBSB": 104, "RelatedFSB": 156,
}
EXPECTED_STRATEGY_VALID = {
    "LinkedBSB": 15, "LinkedFSB": 19, "RelatedBSB": 59, "RelatedFSB": 69,
}
EXPECTED_UNIQUE = 291
EXPECTED_UNIQUE_VALID = 130

_BASE_TIME = datetime(2024, 5, 1, tzinfo=timezone.utc)

Q1_ROTATION = (
    ("process",), ("people",), ("process", "people"), ("code",), ("design",),
)
RULE_ROTATION = ("R1", "R2", "R3", "R4")


@dataclass
class FixtureExpectations:
    project_id: str
    search_candidates: int
    search_valid: int
    strategy_candidates: dict
    strategy_valid: dict
    unique_candidates: int
    unique_valid: int
    overlap: list  # (sorted strategy list, count), count-descending
    excluded: dict  # reason -> count
    frontier: dict
    precision_pct: dict  # rendered integer percents per source
    combined_pct: int
    recall_gain_pct: int
    ui_valid_id: int
    ui_false_positive_id: int
    ui_conflict_id: int

    def to_json(self) -> dict:
        return {
            "project_id": self.project_id,
            "search_candidates": self.search_candidates,
            "search_valid": self.search_valid,
            "strategy_candidates": self.strategy_candidates,
            "strategy_valid": self.strategy_valid,
            "unique_candidates": self.unique_candidates,
            "unique_valid": self.unique_valid,
            "overlap": [
                {"provenance": list(prov), "count": count}
                for prov, count in self.overlap
            ],
            "excluded": self.excluded,
            "frontier": self.frontier,
            "precision_pct": self.precision_pct,
            "combined_pct": self.combined_pct,
            "recall_gain_pct": self.recall_gain_pct,
            "ui_valid_id": self.ui_valid_id,
            "ui_false_positive_id": self.ui_false_positive_id,
            "ui_conflict_id": self.ui_conflict_id,
        }


@dataclass
class _Plan:
    store: CorpusStore = field(default_factory=CorpusStore)
    start_ids: list = field(default_factory=list)
    screened_ids: list = field(default_factory=list)
    candidates: list = field(default_factory=list)  # (qid, strategies, valid)
    iter0_labels: list = field(default_factory=list)
    iter1_labels: list = field(default_factory=list)
    ui_valid_id: int = 0
    ui_false_positive_id: int = 0
    ui_conflict_id: int = 0


class _Ids:
    def __init__(self) -> None:
        self.answer = 100000
        self.comment = 500000
        self.postlink = 700000

    def next_answer(self) -> int:
        self.answer += 1
        return self.answer

    def next_comment(self) -> int:
        self.comment += 1
        return self.comment

    def next_postlink(self) -> int:
        self.postlink += 1
        return self.postlink


def _words(seed: int, n: int, extra: str | None = None) -> str:
    toks = [WORDS[(seed * 7 + k * 3) % len(WORDS)] for k in range(n)]
    if extra is not None:
        toks.insert(min(2, len(toks)), extra)
    return " ".join(toks)


def _stamp(n: int) -> datetime:
    return _BASE_TIME + timedelta(minutes=n)


def _build_discussion(
    plan: _Plan,
    ids: _Ids,
    qid: int,
    *,
    n_answers: int,
    question_score: int,
    answer_score: int = 0,
    self_answered: bool = False,
    term: str | None = None,
    term_field: str = "body",
) -> None:
    """Append one question, its answers, and optional comment to the store."""
    owner = (qid % 37) + 1
    title_term = term if term_field == "title" else None
    body_term = term if term_field == "body" else None
    question = PostRecord(
        id=qid,
        post_kind=QUESTION,
        title=f"How to handle {_words(qid, 4, title_term)}?",
        body=f"<p>{_words(qid + 1, 12, body_term)}</p>",
        tags=(TAG_POOL[qid % len(TAG_POOL)], TAG_POOL[(qid + 3) % len(TAG_POOL)]),
        score=question_score,
        owner_id=owner,
        created_at=_stamp(qid % 5000),
    )
    plan.store.posts.append(question)
    first_answer_id = None
    for a in range(n_answers):
        aid = ids.next_answer()
        if first_answer_id is None:
            first_answer_id = aid
        answer_term = term if term_field == "answer" and a == 0 else None
        answer_owner = owner if self_answered else ((qid + a) % 37) + 40
        plan.store.posts.append(
            PostRecord(
                id=aid,
                post_kind=ANSWER,
                parent_id=qid,
                body=f"<p>{_words(qid + 2 + a, 10, answer_term)}</p>",
                score=answer_score,
                owner_id=answer_owner,
                created_at=_stamp(qid % 5000 + a + 1),
            )
        )
    if term_field == "comment" and term is not None:
        plan.store.comments.append(
            CommentRecord(
                id=ids.next_comment(),
                post_id=qid,
                body=_words(qid + 9, 8, term),
                score=1,
                author_id=((qid + 5) % 37) + 80,
            )
        )
    elif qid % 6 == 0:
        plan.store.comments.append(
            CommentRecord(
                id=ids.next_comment(),
                post_id=first_answer_id or qid,
                body=_words(qid + 11, 6),
                score=0,
                author_id=((qid + 7) % 37) + 80,
            )
        )


def _first_answer_id(plan: _Plan, qid: int) -> int:
    for post in plan.store.posts:
        if post.post_kind == ANSWER and post.parent_id == qid:
            return post.id
    raise RuntimeError(f"no answer for {qid}")


def _build_corpus(plan: _Plan) -> None:
    ids = _Ids()
    term_fields = ("title", "body", "answer", "comment")

    # -- search era: 226 screened (first 108 valid) + 3 matched-but-filtered
    for i in range(SEARCH_SCREENED):
        qid = 1000 + i
        term = SEARCH_TERMS[i % 2]
        term_field = term_fields[i % 4]
        if i < START_COUNT:
            n_answers = 5 if i % 5 == 0 else 4
            disc_score = 8 + (1 if i % 3 == 0 else 0) + (1 if i % 7 == 0 else 0)
            answer_score = 1
            question_score = disc_score - n_answers * answer_score
        else:
            n_answers = 1 + (i % 3)
            answer_score = 0
            question_score = i % 5
        _build_discussion(
            plan, ids, qid,
            n_answers=n_answers,
            question_score=question_score,
            answer_score=answer_score,
            term=term,
            term_field=term_field,
        )
        plan.screened_ids.append(qid)
        if i < START_COUNT:
            plan.start_ids.append(qid)
    # matched but dropped by the structural filters
    _build_discussion(plan, ids, 1226, n_answers=0, question_score=2, term="debt")
    _build_discussion(
        plan, ids, 1227, n_answers=2, question_score=2, self_answered=True,
        term="shortcut",
    )
    _build_discussion(
        plan, ids, 1228, n_answers=1, question_score=-5, answer_score=1, term="debt"
    )

    # -- snowball candidates
    related_rank: dict[int, int] = {}

    def next_rank(source: int) -> int:
        related_rank[source] = related_rank.get(source, 0) + 1
        return related_rank[source]

    def add_linked(source_post: int, target_post: int) -> None:
        plan.store.postlinks.append(
            PostLinkRecord(
                id=ids.next_postlink(),
                source_post_id=source_post,
                target_post_id=target_post,
                link_kind=LINK_LINKED,
                created_at=_stamp(6000),
            )
        )

    def add_related(source_q: int, target_q: int) -> None:
        plan.store.related_edges.append(
            RelatedEdgeRecord(
                source_question_id=source_q,
                target_question_id=target_q,
                rank=next_rank(source_q),
                origin=ORIGIN_API,
            )
        )

    j = 0
    for strategies, count, valid_count in CLASSES:
        related_reached = any(s.startswith("Related") for s in strategies)
        for k in range(count):
            qid = 2000 + j
            if related_reached:
                n_answers = 4 + (j % 2)
                question_score = 8 + (j % 5)
                answer_score = 1
            else:
                n_answers = 1 + (j % 3)
                question_score = j % 4
                answer_score = 0
            _build_discussion(
                plan, ids, qid,
                n_answers=n_answers,
                question_score=question_score,
                answer_score=answer_score,
            )
            plan.candidates.append((qid, strategies, k < valid_count))
            j += 1

    # edges (after all posts exist so answer-post lifting can be exercised)
    for j, (qid, strategies, _valid) in enumerate(plan.candidates):
        for k_idx, strategy in enumerate(strategies):
            partner = plan.start_ids[(j * 4 + k_idx) % START_COUNT]
            if strategy == "LinkedBSB":
                source_post = partner if j % 2 == 0 else _first_answer_id(plan, partner)
                add_linked(source_post, qid)
            elif strategy == "LinkedFSB":
                source_post = qid if j % 2 == 0 else _first_answer_id(plan, qid)
                add_linked(source_post, partner)
            elif strategy == "RelatedBSB":
                add_related(partner, qid)
            elif strategy == "RelatedFSB":
                add_related(qid, partner)

    # -- exclusion-path extras (never counted in the engineered totals)
    start0 = plan.start_ids[0]
    start1 = plan.start_ids[1]
    add_linked(start0, start1)  # intra-start link, swallowed by the frontier
    add_linked(start0, 9901)  # external endpoint (no such post)
    add_related(start1, 9902)  # external endpoint via related
    _build_discussion(
        plan, ids, 9903, n_answers=1, question_score=5, self_answered=True
    )
    add_related(plan.start_ids[2], 9903)  # incomplete
    _build_discussion(plan, ids, 9904, n_answers=1, question_score=-3, answer_score=1)
    add_linked(9904, plan.start_ids[3])  # untrustworthy, reached forward
    add_related(plan.start_ids[4], plan.screened_ids[150])  # already examined
    for extra, qid in enumerate((9905, 9906, 9907)):
        _build_discussion(plan, ids, qid, n_answers=2, question_score=3)
        add_related(plan.start_ids[5 + extra], qid)  # below both thresholds


def _plan_iter0_labels(plan: _Plan) -> None:
    t = 0

    def label(qid, reviewer, verdict, rule=None, codes=(), note=""):
        nonlocal t
        t += 1
        plan.iter0_labels.append(
            review.Label(
                discussion_id=qid,
                reviewer_id=reviewer,
                verdict=verdict,
                triggered_rule=rule,
                codes={
                    review.Q1_TD_TYPES: list(codes),
                    review.Q2_INDICATORS: [f"indicator_{reviewer}_{qid}"] if codes else [],
                    review.Q3_PRACTICES: [f"practice_{qid}"] if codes else [],
                },
                free_notes=note,
                created_at=(_BASE_TIME + timedelta(days=30, seconds=t)).isoformat(),
            )
        )

    for i, qid in enumerate(plan.screened_ids):
        destined_valid = i < START_COUNT
        codes = Q1_ROTATION[i % len(Q1_ROTATION)]
        rule = RULE_ROTATION[i % len(RULE_ROTATION)]
        if i == 5:
            label(qid, "r1", review.VERDICT_VALID, codes=codes)
            label(qid, "r2", review.VERDICT_FALSE_POSITIVE, rule="R1")
            label(qid, "r3", review.VERDICT_VALID, codes=codes)
        elif i == 113:
            label(qid, "r1", review.VERDICT_FALSE_POSITIVE, rule="R2")
            label(qid, "r2", review.VERDICT_VALID, codes=codes)
            label(qid, "r3", review.VERDICT_FALSE_POSITIVE, rule="R2")
        elif destined_valid:
            label(qid, "r1", review.VERDICT_VALID, codes=codes)
            label(qid, "r2", review.VERDICT_VALID, codes=codes)
        else:
            label(qid, "r1", review.VERDICT_FALSE_POSITIVE, rule=rule)
            label(qid, "r2", review.VERDICT_FALSE_POSITIVE, rule=rule)


def _plan_iter1_labels(plan: _Plan) -> None:
    plan.ui_valid_id = 2133
    plan.ui_false_positive_id = 2174
    plan.ui_conflict_id = 2243
    t = 0

    def label(qid, reviewer, verdict, rule=None, codes=()):
        nonlocal t
        t += 1
        plan.iter1_labels.append(
            review.Label(
                discussion_id=qid,
                reviewer_id=reviewer,
                verdict=verdict,
                triggered_rule=rule,
                codes={
                    review.Q1_TD_TYPES: list(codes),
                    review.Q2_INDICATORS: [f"indicator_{reviewer}_{qid}"] if codes else [],
                    review.Q3_PRACTICES: [f"practice_{qid}"] if codes else [],
                },
                created_at=(_BASE_TIME + timedelta(days=60, seconds=t)).isoformat(),
            )
        )

    for j, (qid, _strategies, destined_valid) in enumerate(plan.candidates):
        codes = Q1_ROTATION[j % len(Q1_ROTATION)]
        rule = "R2" if qid == plan.ui_false_positive_id else RULE_ROTATION[j % 4]
        if qid == plan.ui_conflict_id:
            # left unresolved on purpose: the screening UI's third reviewer
            # resolves it
            label(qid, "r1", review.VERDICT_VALID, codes=("process",))
            label(qid, "r2", review.VERDICT_FALSE_POSITIVE, rule="R2")
        elif j == 0:
            label(qid, "r1", review.VERDICT_VALID, codes=codes)
            label(qid, "r2", review.VERDICT_FALSE_POSITIVE, rule="R3")
            label(qid, "r3", review.VERDICT_VALID, codes=codes)
        elif j == 110:
            label(qid, "r1", review.VERDICT_FALSE_POSITIVE, rule="R2")
            label(qid, "r2", review.VERDICT_VALID, codes=codes)
            label(qid, "r3", review.VERDICT_FALSE_POSITIVE, rule="R2")
        elif j == 254:
            label(qid, "r1", review.VERDICT_VALID, codes=("process",))
            label(qid, "r2", review.VERDICT_VALID, codes=("people",))
            label(qid, "r3", review.VERDICT_VALID, codes=("process",))
        elif destined_valid:
            label(qid, "r1", review.VERDICT_VALID, codes=codes)
            label(qid, "r2", review.VERDICT_VALID, codes=codes)
        else:
            label(qid, "r1", review.VERDICT_FALSE_POSITIVE, rule=rule)
            label(qid, "r2", review.VERDICT_FALSE_POSITIVE, rule=rule)


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise RuntimeError(f"fixture engineering drift: {message}")


def fixture_config() -> ProjectConfig:
    config = default_config(terms=SEARCH_TERMS)
    config.frontier = None  # derive thresholds from the start-set averages
    return config


def build_fixture_project(dest: Path, project_id: str = "demo-fixture") -> FixtureExpectations:
    """Materialize the fixture project at ``dest`` and return its numbers."""
    dest = Path(dest)
    plan = _Plan()
    _build_corpus(plan)
    _plan_iter0_labels(plan)
    _plan_iter1_labels(plan)

    with tempfile.TemporaryDirectory() as tmp:
        corpus_src = Path(tmp) / "corpus_src"
        write_store(plan.store, corpus_src)
        project = Project.create(dest, corpus_src, fixture_config(), project_id)

    outcome = project.run_startset()
    record = outcome["iteration"]
    _check(record["matched"] == SEARCH_SCREENED + 3, f"matched {record['matched']}")
    _check(record["screened"] == SEARCH_SCREENED, f"screened {record['screened']}")

    for lab in plan.iter0_labels:
        project.submit_label(lab)
    start = project.start_set_for_next()
    _check(len(start.ids) == START_COUNT, f"start set {len(start.ids)}")

    outcome = project.run_snowball_iteration()
    frontier = outcome["iteration"]["frontier"]
    _check(
        frontier["min_answers"] == 4 and frontier["min_score"] == 8,
        f"derived frontier {frontier}",
    )
    candidates = project.iteration_candidates(1)
    passed = [c for c in candidates if c.passed_filters]
    _check(len(passed) == EXPECTED_UNIQUE, f"unique candidates {len(passed)}")
    counts = snowball.strategy_counts(candidates)
    _check(
        counts == EXPECTED_STRATEGY_CANDIDATES,
        f"strategy candidates {counts}",
    )

    for lab in plan.iter1_labels:
        project.submit_label(lab)

    report = project.build_report()
    overlap_rows = sorted(
        ((tuple(sorted(prov)), count) for prov, count in report.overlap.items()),
        key=lambda row: (-row[1], row[0]),
    )
    excluded: dict[str, int] = {}
    for c in candidates:
        if c.excluded_reason:
            excluded[c.excluded_reason] = excluded.get(c.excluded_reason, 0) + 1

    expectations = FixtureExpectations(
        project_id=project_id,
        search_candidates=report.sources["search"].candidates,
        search_valid=report.sources["search"].valid,
        strategy_candidates={s: report.sources[s].candidates for s in snowball.STRATEGIES},
        strategy_valid={s: report.sources[s].valid for s in snowball.STRATEGIES},
        unique_candidates=report.sources["AllSB"].candidates,
        unique_valid=report.sources["AllSB"].valid,
        overlap=overlap_rows,
        excluded=excluded,
        frontier=frontier,
        precision_pct={
            name: percent_int(stats.precision)
            for name, stats in report.sources.items()
        },
        combined_pct=percent_int(report.combined),
        recall_gain_pct=percent_int(report.gain),
        ui_valid_id=plan.ui_valid_id,
        ui_false_positive_id=plan.ui_false_positive_id,
        ui_conflict_id=plan.ui_conflict_id,
    )
    _check(
        expectations.strategy_valid == EXPECTED_STRATEGY_VALID,
        f"strategy valid {expectations.strategy_valid}",
    )
    _check(
        expectations.unique_valid == EXPECTED_UNIQUE_VALID,
        f"unique valid {expectations.unique_valid}",
    )

    (dest / "fixture-manifest.json").write_text(
        json.dumps(expectations.to_json(), indent=2, sort_keys=True) + "\n",
        "utf-8",
    )
    return expectations
