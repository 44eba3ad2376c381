"""Shared record factories for the test suite."""

from datetime import datetime, timezone

import pytest

from glsb.corpus import Discussion, assemble
from glsb.records import ANSWER, QUESTION, CommentRecord, PostRecord

T0 = datetime(2021, 9, 7, tzinfo=timezone.utc)

_ids = {"post": 10_000, "comment": 90_000}


def next_post_id() -> int:
    _ids["post"] += 1
    return _ids["post"]


def make_question(
    qid=None, *, title="A question", body="<p>body text</p>", tags=("agile",),
    score=0, owner_id=1, accepted_answer_id=None,
) -> PostRecord:
    return PostRecord(
        id=qid if qid is not None else next_post_id(),
        post_kind=QUESTION,
        title=title,
        body=body,
        tags=tuple(tags),
        score=score,
        owner_id=owner_id,
        accepted_answer_id=accepted_answer_id,
        created_at=T0,
    )


def make_answer(parent_id, *, aid=None, body="<p>an answer</p>", score=0, owner_id=2) -> PostRecord:
    return PostRecord(
        id=aid if aid is not None else next_post_id(),
        post_kind=ANSWER,
        parent_id=parent_id,
        body=body,
        score=score,
        owner_id=owner_id,
        created_at=T0,
    )


def make_comment(post_id, *, cid=None, body="a comment", score=0, author_id=3) -> CommentRecord:
    _ids["comment"] += 1
    return CommentRecord(
        id=cid if cid is not None else _ids["comment"],
        post_id=post_id,
        body=body,
        score=score,
        author_id=author_id,
    )


def make_discussion(
    qid=None, *, n_answers=1, question_score=0, answer_score=0,
    question_owner=1, answer_owners=None, title="A question",
    body="<p>body text</p>", tags=("agile",), comments=(),
) -> Discussion:
    q = make_question(
        qid, title=title, body=body, tags=tags, score=question_score,
        owner_id=question_owner,
    )
    answers = []
    for k in range(n_answers):
        owner = answer_owners[k] if answer_owners else question_owner + 1 + k
        answers.append(make_answer(q.id, score=answer_score, owner_id=owner))
    comment_records = [make_comment(q.id, body=c) for c in comments]
    result = assemble([q, *answers], comment_records)
    return result.discussions[0]


@pytest.fixture
def citation_example_ids():
    """Ids used in the worked citation example."""
    return {"target": 26011, "linked_sources": [26070, 28023], "related_source": 29724}
