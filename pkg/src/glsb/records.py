"""Normalized record types produced by ingestion.

All records are plain immutable dataclasses with a stable JSON wire form
(`to_json` / record-specific `*_from_json`), used both by the corpus store
(one record per line, UTF-8) and by the HTTP service.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Iterator

QUESTION = "question"
ANSWER = "answer"

LINK_LINKED = "linked"
LINK_DUPLICATE = "duplicate"

ORIGIN_API = "api"
ORIGIN_LOCAL = "local"


def parse_timestamp(raw: str) -> datetime:
    """Parse a dump timestamp ('2021-09-07T12:34:56.123') as UTC."""
    dt = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat()


@dataclass(frozen=True)
class PostRecord:
    id: int
    post_kind: str  # QUESTION or ANSWER
    body: str  # HTML, stored verbatim
    score: int
    created_at: datetime
    parent_id: int | None = None  # answers only
    title: str | None = None  # questions only
    tags: tuple[str, ...] = ()  # questions only, lowercase
    owner_id: int | None = None
    accepted_answer_id: int | None = None  # questions only

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "post_kind": self.post_kind,
            "parent_id": self.parent_id,
            "title": self.title,
            "body": self.body,
            "tags": list(self.tags),
            "score": self.score,
            "owner_id": self.owner_id,
            "accepted_answer_id": self.accepted_answer_id,
            "created_at": format_timestamp(self.created_at),
        }


def post_from_json(d: dict) -> PostRecord:
    return PostRecord(
        id=d["id"],
        post_kind=d["post_kind"],
        parent_id=d.get("parent_id"),
        title=d.get("title"),
        body=d["body"],
        tags=tuple(d.get("tags") or ()),
        score=d["score"],
        owner_id=d.get("owner_id"),
        accepted_answer_id=d.get("accepted_answer_id"),
        created_at=parse_timestamp(d["created_at"]),
    )


@dataclass(frozen=True)
class CommentRecord:
    id: int
    post_id: int
    body: str  # plain text
    score: int
    author_id: int | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "post_id": self.post_id,
            "body": self.body,
            "score": self.score,
            "author_id": self.author_id,
        }


def comment_from_json(d: dict) -> CommentRecord:
    return CommentRecord(
        id=d["id"],
        post_id=d["post_id"],
        body=d["body"],
        score=d["score"],
        author_id=d.get("author_id"),
    )


@dataclass(frozen=True)
class PostLinkRecord:
    id: int
    source_post_id: int
    target_post_id: int
    link_kind: str  # LINK_LINKED or LINK_DUPLICATE
    created_at: datetime

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source_post_id": self.source_post_id,
            "target_post_id": self.target_post_id,
            "link_kind": self.link_kind,
            "created_at": format_timestamp(self.created_at),
        }


def postlink_from_json(d: dict) -> PostLinkRecord:
    return PostLinkRecord(
        id=d["id"],
        source_post_id=d["source_post_id"],
        target_post_id=d["target_post_id"],
        link_kind=d["link_kind"],
        created_at=parse_timestamp(d["created_at"]),
    )


@dataclass(frozen=True)
class RelatedEdgeRecord:
    source_question_id: int
    target_question_id: int
    rank: int  # 1-based position in the source's related list
    origin: str  # ORIGIN_API or ORIGIN_LOCAL

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        if self.source_question_id == self.target_question_id:
            raise ValueError("related edge may not be a self-edge")

    def to_json(self) -> dict:
        return {
            "source_question_id": self.source_question_id,
            "target_question_id": self.target_question_id,
            "rank": self.rank,
            "origin": self.origin,
        }


def related_edge_from_json(d: dict) -> RelatedEdgeRecord:
    return RelatedEdgeRecord(
        source_question_id=d["source_question_id"],
        target_question_id=d["target_question_id"],
        rank=d["rank"],
        origin=d["origin"],
    )


# ---------------------------------------------------------------------------
# Newline-delimited record IO
# ---------------------------------------------------------------------------

def dump_jsonl(records: Iterable, fh: IO[str]) -> int:
    """Write records (anything with to_json) one per line; returns count."""
    n = 0
    for rec in records:
        fh.write(json.dumps(rec.to_json(), sort_keys=True, ensure_ascii=False))
        fh.write("\n")
        n += 1
    return n


def load_jsonl(fh: IO[str], from_json) -> Iterator:
    for line in fh:
        line = line.strip()
        if line:
            yield from_json(json.loads(line))


@dataclass
class ParseStats:
    """Per-file accounting: parsed + skipped + row errors = total rows."""

    total_rows: int = 0
    parsed: int = 0
    skipped_kinds: int = 0
    row_errors: list[str] = field(default_factory=list)

    @property
    def skipped(self) -> int:
        return self.skipped_kinds + len(self.row_errors)
