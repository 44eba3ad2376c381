"""Start-set construction by string matching over discussion fields.

Matching is case-insensitive over tag-stripped text. Substring mode fires
on any occurrence; token mode requires the term to equal a whole
whitespace/punctuation-delimited token (so "shortcut" does not hit
"shortcuts"). Substring is the default: broad recall, screened later.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Discussion
from .textutil import strip_html

FIELD_QUESTION_TITLE = "question_title"
FIELD_QUESTION_BODY = "question_body"
FIELD_QUESTION_TAGS = "question_tags"
FIELD_ANSWER_BODY = "answer_body"
FIELD_COMMENT_BODY = "comment_body"

ALL_FIELDS = (
    FIELD_QUESTION_TITLE,
    FIELD_QUESTION_BODY,
    FIELD_QUESTION_TAGS,
    FIELD_ANSWER_BODY,
    FIELD_COMMENT_BODY,
)

MODE_SUBSTRING = "substring"
MODE_TOKEN = "token"

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class SearchSpec:
    terms: tuple[str, ...]
    fields: tuple[str, ...] = ALL_FIELDS
    match_mode: str = MODE_SUBSTRING

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("terms must be non-empty")
        if not self.fields:
            raise ValueError("fields must be non-empty")
        unknown = set(self.fields) - set(ALL_FIELDS)
        if unknown:
            raise ValueError(f"unknown fields: {sorted(unknown)}")
        if self.match_mode not in (MODE_SUBSTRING, MODE_TOKEN):
            raise ValueError(f"unknown match_mode: {self.match_mode}")
        object.__setattr__(self, "terms", tuple(t.lower() for t in self.terms))

    def to_json(self) -> dict:
        return {
            "terms": list(self.terms),
            "fields": list(self.fields),
            "match_mode": self.match_mode,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SearchSpec":
        return cls(
            terms=tuple(d["terms"]),
            fields=tuple(d.get("fields") or ALL_FIELDS),
            match_mode=d.get("match_mode", MODE_SUBSTRING),
        )


@dataclass(frozen=True, order=True)
class HitLocation:
    field: str
    ref_id: int  # question/answer id for post fields, comment id for comments

    def to_json(self) -> dict:
        return {"field": self.field, "ref_id": self.ref_id}


def _field_texts(discussion: Discussion, fields) -> list[tuple[str, int, str]]:
    """Yield (field, ref_id, lowercased plain text) for the selected fields."""
    out = []
    q = discussion.question
    for f in fields:
        if f == FIELD_QUESTION_TITLE:
            out.append((f, q.id, strip_html(q.title or "").lower()))
        elif f == FIELD_QUESTION_BODY:
            out.append((f, q.id, strip_html(q.body).lower()))
        elif f == FIELD_QUESTION_TAGS:
            out.append((f, q.id, " ".join(q.tags).lower()))
        elif f == FIELD_ANSWER_BODY:
            for a in discussion.answers:
                out.append((f, a.id, strip_html(a.body).lower()))
        elif f == FIELD_COMMENT_BODY:
            for c in discussion.all_comments():
                out.append((f, c.id, strip_html(c.body).lower()))
    return out


def _text_matches(term: str, text: str, mode: str) -> bool:
    if mode == MODE_SUBSTRING:
        return term in text
    return term in _TOKEN_SPLIT.split(text)


def match(
    spec: SearchSpec, discussions: list[Discussion]
) -> list[tuple[int, list[HitLocation]]]:
    """Find discussions where any term occurs in any selected field.

    Returns (discussion id, sorted unique hit locations) pairs, sorted by
    discussion id. An empty corpus yields an empty result.
    """
    results = []
    for d in sorted(discussions, key=lambda d: d.id):
        hits: set[HitLocation] = set()
        for fname, ref_id, text in _field_texts(d, spec.fields):
            if any(_text_matches(t, text, spec.match_mode) for t in spec.terms):
                hits.add(HitLocation(fname, ref_id))
        if hits:
            results.append((d.id, sorted(hits)))
    return results


def term_frequency(term: str, discussions: list[Discussion]) -> int:
    """Number of discussions the single term matches across all fields."""
    spec = SearchSpec(terms=(term,), fields=ALL_FIELDS)
    return len(match(spec, discussions))
