"""Discussion assembly and structural quality filters.

A discussion is a question plus its answers and the comments attached to
any of its posts. Two derived predicates gate screening:

* complete — at least one answer authored by someone other than the
  question's author. A missing owner id (deleted account) counts as a
  distinct author; discussions whose completeness rests only on such
  answers are flagged in the diagnostics.
* trustworthy — the discussion score (question score plus all answer
  scores; comment scores are not posts and do not count) is >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .records import ANSWER, QUESTION, CommentRecord, PostRecord


@dataclass(frozen=True)
class Discussion:
    question: PostRecord
    answers: tuple[PostRecord, ...]
    comments: dict  # post id -> list[CommentRecord]

    @property
    def id(self) -> int:
        return self.question.id

    @property
    def answer_count(self) -> int:
        return len(self.answers)

    @property
    def discussion_score(self) -> int:
        return self.question.score + sum(a.score for a in self.answers)

    @property
    def complete(self) -> bool:
        return any(_distinct_author(self.question, a) for a in self.answers)

    @property
    def trustworthy(self) -> bool:
        return self.discussion_score >= 0

    def all_comments(self) -> list[CommentRecord]:
        out: list[CommentRecord] = []
        for post_id in sorted(self.comments):
            out.extend(self.comments[post_id])
        return out


def _distinct_author(question: PostRecord, answer: PostRecord) -> bool:
    # A deleted (missing) owner id is never considered the same author.
    if question.owner_id is None or answer.owner_id is None:
        return True
    return question.owner_id != answer.owner_id


@dataclass
class AssembleResult:
    discussions: list[Discussion]
    orphan_answers: list[PostRecord] = field(default_factory=list)
    orphan_comments: list[CommentRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def by_id(self) -> dict[int, Discussion]:
        return {d.id: d for d in self.discussions}


def assemble(
    posts: list[PostRecord], comments: list[CommentRecord]
) -> AssembleResult:
    """Group records into Discussions.

    Orphans (answers whose parent question is absent, comments on unknown
    posts) go to the diagnostics lists instead of being silently dropped.
    Output is sorted by question id; answers sorted by post id.
    """
    questions: dict[int, PostRecord] = {}
    answers_by_parent: dict[int, list[PostRecord]] = {}
    result = AssembleResult(discussions=[])

    for post in posts:
        if post.post_kind == QUESTION:
            questions[post.id] = post
        elif post.post_kind == ANSWER:
            answers_by_parent.setdefault(post.parent_id, []).append(post)

    post_to_question: dict[int, int] = {qid: qid for qid in questions}
    for parent_id, answer_list in answers_by_parent.items():
        if parent_id in questions:
            for a in answer_list:
                post_to_question[a.id] = parent_id
        else:
            result.orphan_answers.extend(answer_list)

    comments_by_post: dict[int, list[CommentRecord]] = {}
    for comment in comments:
        if comment.post_id in post_to_question:
            comments_by_post.setdefault(comment.post_id, []).append(comment)
        else:
            result.orphan_comments.append(comment)

    for qid in sorted(questions):
        question = questions[qid]
        answer_list = tuple(
            sorted(answers_by_parent.get(qid, []), key=lambda a: a.id)
        )
        comment_map = {
            pid: sorted(comments_by_post.get(pid, []), key=lambda c: c.id)
            for pid in [qid, *[a.id for a in answer_list]]
            if pid in comments_by_post
        }
        discussion = Discussion(question, answer_list, comment_map)
        if discussion.complete and not any(
            a.owner_id is not None
            and question.owner_id is not None
            and a.owner_id != question.owner_id
            for a in answer_list
        ):
            result.notes.append(
                f"discussion {qid}: complete only via deleted-user answers"
            )
        result.discussions.append(discussion)

    result.orphan_answers.sort(key=lambda a: a.id)
    result.orphan_comments.sort(key=lambda c: c.id)
    return result


def filter_complete(
    discussions: list[Discussion],
) -> tuple[list[Discussion], list[Discussion]]:
    """Split discussions into (kept, removed) by the completeness predicate."""
    kept = [d for d in discussions if d.complete]
    removed = [d for d in discussions if not d.complete]
    return kept, removed


def filter_trustworthy(
    discussions: list[Discussion],
) -> tuple[list[Discussion], list[Discussion]]:
    """Split discussions into (kept, removed) by non-negative discussion score."""
    kept = [d for d in discussions if d.trustworthy]
    removed = [d for d in discussions if not d.trustworthy]
    return kept, removed
