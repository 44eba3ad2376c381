"""Local approximation of the platform's related-link generation.

The platform classifies discussions as related through a field-weighted
full-text similarity query (tag matches weighted 10, title matches 5, body
matches 1) whose exact parameters are proprietary. This module implements a
documented, reproducible stand-in: a three-field inverted index over
question documents and a more-like-this scorer defined as

    score(cand) = sum over query terms t, fields f of
        tf(t, cand, f) * idf_f(t) * weight_f / sqrt(len_f(cand))

    idf_f(t) = ln(1 + N_f / df_f(t))

where N_f counts documents with a non-empty field f, df_f(t) counts
documents whose field f contains t, and len_f is the field's token count.
Query terms are the source document's top ``max_query_terms`` terms by
tf*idf summed over fields (ties broken by term, ascending). Candidates tie-
break by ascending question id. The idf shape avoids division trouble at
df = N; the sqrt length normalization damps long-body dominance. Both are
deliberate, documented choices validated against a brute-force oracle
rather than against the live platform.

The "body" field is the question body plus all answer bodies; a
question-only mode is available via ``body_includes_answers=False``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .corpus import Discussion
from .records import ORIGIN_LOCAL, RelatedEdgeRecord
from .textutil import strip_html

FIELD_TAGS = "tags"
FIELD_TITLE = "title"
FIELD_BODY = "body"
FIELDS = (FIELD_TAGS, FIELD_TITLE, FIELD_BODY)

# Small English function-word list; tunable via SimilarityConfig.stopwords.
DEFAULT_STOPWORDS = frozenset(
    """a an and are as at be but by for if in into is it no not of on or
    such that the their then there these they this to was will with""".split()
)

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class SimilarityConfig:
    weight_tags: float = 10.0
    weight_title: float = 5.0
    weight_body: float = 1.0
    max_query_terms: int = 25
    top_k: int = 10
    stopwords: frozenset = DEFAULT_STOPWORDS
    min_token_len: int = 2
    stem: bool = False  # plural-stripping stemmer, off by default
    body_includes_answers: bool = True

    def __post_init__(self) -> None:
        if min(self.weight_tags, self.weight_title, self.weight_body) <= 0:
            raise ValueError("field weights must be > 0")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.max_query_terms < 1:
            raise ValueError("max_query_terms must be >= 1")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    @property
    def weights(self) -> dict[str, float]:
        return {
            FIELD_TAGS: self.weight_tags,
            FIELD_TITLE: self.weight_title,
            FIELD_BODY: self.weight_body,
        }

    def to_json(self) -> dict:
        return {
            "weight_tags": self.weight_tags,
            "weight_title": self.weight_title,
            "weight_body": self.weight_body,
            "max_query_terms": self.max_query_terms,
            "top_k": self.top_k,
            "stopwords": sorted(self.stopwords),
            "min_token_len": self.min_token_len,
            "stem": self.stem,
            "body_includes_answers": self.body_includes_answers,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SimilarityConfig":
        kwargs = dict(d)
        if "stopwords" in kwargs:
            kwargs["stopwords"] = frozenset(kwargs["stopwords"])
        return cls(**kwargs)


def _stem(token: str) -> str:
    # Minimal plural stripping; deliberately simplistic, default-off.
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith("es") and len(token) > 3:
        return token[:-2]
    if token.endswith("s") and not token.endswith("ss") and len(token) > 3:
        return token[:-1]
    return token


def tokenize(text: str, config: SimilarityConfig = SimilarityConfig()) -> list[str]:
    """HTML-strip, lowercase, split on non-alphanumerics, drop short tokens
    and stopwords; order preserved."""
    tokens = []
    for tok in _TOKEN_SPLIT.split(strip_html(text).lower()):
        if len(tok) < config.min_token_len or tok in config.stopwords:
            continue
        if config.stem:
            tok = _stem(tok)
        tokens.append(tok)
    return tokens


# ---------------------------------------------------------------------------
# Index
# ---------------------------------------------------------------------------

@dataclass
class Index:
    """Per-field postings over question documents.

    postings[field][term] is a list of (question id, term frequency) sorted
    by question id; doc_terms is the forward index (field -> qid -> term ->
    tf); doc_len[field][qid] is the field's token count; N[field] counts
    documents with a non-empty field.
    """

    config: SimilarityConfig
    postings: dict = field(default_factory=dict)
    doc_terms: dict = field(default_factory=dict)
    doc_len: dict = field(default_factory=dict)
    N: dict = field(default_factory=dict)
    doc_ids: list[int] = field(default_factory=list)

    def df(self, fname: str, term: str) -> int:
        return len(self.postings[fname].get(term, ()))

    def idf(self, fname: str, term: str) -> float:
        df = self.df(fname, term)
        if df == 0:
            return 0.0
        return math.log(1.0 + self.N[fname] / df)

    def tf(self, fname: str, qid: int, term: str) -> int:
        return self.doc_terms[fname].get(qid, {}).get(term, 0)

    def field_terms(self, fname: str, qid: int) -> dict[str, int]:
        return self.doc_terms[fname].get(qid, {})


def _document_fields(d: Discussion, config: SimilarityConfig) -> dict[str, list[str]]:
    body_text = d.question.body
    if config.body_includes_answers:
        body_text = " ".join([d.question.body, *[a.body for a in d.answers]])
    return {
        FIELD_TAGS: [t.lower() for t in d.question.tags],  # tags are whole terms
        FIELD_TITLE: tokenize(d.question.title or "", config),
        FIELD_BODY: tokenize(body_text, config),
    }


def build_index(discussions: list[Discussion], config: SimilarityConfig) -> Index:
    """Index question documents over the tags/title/body fields.

    Deterministic for a given corpus and config; an empty corpus yields an
    empty (valid) index.
    """
    index = Index(config=config)
    for fname in FIELDS:
        index.postings[fname] = {}
        index.doc_terms[fname] = {}
        index.doc_len[fname] = {}
        index.N[fname] = 0

    for d in sorted(discussions, key=lambda d: d.id):
        index.doc_ids.append(d.id)
        for fname, tokens in _document_fields(d, config).items():
            index.doc_len[fname][d.id] = len(tokens)
            if tokens:
                index.N[fname] += 1
            counts: dict[str, int] = {}
            for tok in tokens:
                counts[tok] = counts.get(tok, 0) + 1
            index.doc_terms[fname][d.id] = counts
            for term, count in counts.items():
                index.postings[fname].setdefault(term, []).append((d.id, count))

    # Documents are indexed in ascending id order so postings arrive sorted.
    return index


# ---------------------------------------------------------------------------
# More-like-this scoring
# ---------------------------------------------------------------------------

def select_query_terms(source: int, index: Index) -> list[str]:
    """The source document's top terms by tf*idf summed over fields.

    Deterministic: descending aggregate score, then ascending term.
    """
    agg: dict[str, float] = {}
    for fname in FIELDS:
        for term, count in index.field_terms(fname, source).items():
            agg[term] = agg.get(term, 0.0) + count * index.idf(fname, term)
    ranked = sorted(agg.items(), key=lambda kv: (-kv[1], kv[0]))
    return [term for term, _score in ranked[: index.config.max_query_terms]]


def score_candidates(
    query_terms: list[str], index: Index, exclude: int
) -> dict[int, float]:
    """Accumulate the weighted tf-idf score for every candidate document.

    Contributions are added in (query term, field) order so a brute-force
    scorer walking the same order produces bit-identical sums.
    """
    weights = index.config.weights
    scores: dict[int, float] = {}
    for term in query_terms:
        for fname in FIELDS:
            plist = index.postings[fname].get(term)
            if not plist:
                continue
            idf = index.idf(fname, term)
            w = weights[fname]
            for doc_id, tf in plist:
                if doc_id == exclude:
                    continue
                norm = math.sqrt(index.doc_len[fname][doc_id])
                contribution = tf * idf * w / norm
                scores[doc_id] = scores.get(doc_id, 0.0) + contribution
    return scores


def more_like_this(
    source: int, index: Index, config: SimilarityConfig | None = None
) -> list[tuple[int, float]]:
    """Rank the corpus against one source question.

    Returns up to top_k (question id, score) pairs, score descending with
    ascending-id tie-break; the source never appears in its own results.
    """
    if config is not None and config != index.config:
        raise ValueError("index was built with a different config")
    cfg = index.config
    if source not in index.doc_len[FIELD_BODY]:
        raise KeyError(f"unknown source question id: {source}")

    query_terms = select_query_terms(source, index)
    scores = score_candidates(query_terms, index, exclude=source)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[: cfg.top_k]


def generate_related_edges(
    index: Index, config: SimilarityConfig | None = None
) -> list[RelatedEdgeRecord]:
    """Run more_like_this for every indexed question; origin=local edges.

    Top-k truncation means edges need not be symmetric.
    """
    edges = []
    for qid in index.doc_ids:
        for rank, (target, _score) in enumerate(more_like_this(qid, index, config), 1):
            edges.append(
                RelatedEdgeRecord(
                    source_question_id=qid,
                    target_question_id=target,
                    rank=rank,
                    origin=ORIGIN_LOCAL,
                )
            )
    return edges


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def brute_force_more_like_this(
    source: int, discussions: list[Discussion], config: SimilarityConfig
) -> list[tuple[int, float]]:
    """Exhaustive reference scorer: recounts df/tf/lengths from scratch and
    evaluates every candidate directly with the scoring formula.

    Kept independent of the Index machinery on purpose: it is the oracle the
    engine is validated against.
    """
    docs = {d.id: _document_fields(d, config) for d in discussions}
    if source not in docs:
        raise KeyError(f"unknown source question id: {source}")

    counts = {
        qid: {fname: _count(tokens) for fname, tokens in fields.items()}
        for qid, fields in docs.items()
    }
    lengths = {
        qid: {fname: len(tokens) for fname, tokens in fields.items()}
        for qid, fields in docs.items()
    }
    n_field = {
        fname: sum(1 for qid in docs if lengths[qid][fname] > 0) for fname in FIELDS
    }

    def df(fname: str, term: str) -> int:
        return sum(1 for qid in docs if term in counts[qid][fname])

    def idf(fname: str, term: str) -> float:
        d = df(fname, term)
        return math.log(1.0 + n_field[fname] / d) if d else 0.0

    agg: dict[str, float] = {}
    for fname in FIELDS:
        for term, tf in counts[source][fname].items():
            agg[term] = agg.get(term, 0.0) + tf * idf(fname, term)
    query_terms = [
        t for t, _s in sorted(agg.items(), key=lambda kv: (-kv[1], kv[0]))
    ][: config.max_query_terms]

    weights = {
        FIELD_TAGS: config.weight_tags,
        FIELD_TITLE: config.weight_title,
        FIELD_BODY: config.weight_body,
    }
    results = []
    for qid in sorted(docs):
        if qid == source:
            continue
        score = 0.0
        for term in query_terms:
            for fname in FIELDS:
                tf = counts[qid][fname].get(term, 0)
                if tf == 0:
                    continue
                score += tf * idf(fname, term) * weights[fname] / math.sqrt(
                    lengths[qid][fname]
                )
        if score != 0.0:
            results.append((qid, score))
    results.sort(key=lambda kv: (-kv[1], kv[0]))
    return results[: config.top_k]


def _count(tokens: list[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for tok in tokens:
        out[tok] = out.get(tok, 0) + 1
    return out
