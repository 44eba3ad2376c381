"""One snowballing iteration over the discussion graph.

Four strategies run from the start set: backward (outgoing edges) and
forward (incoming edges) over each of the linked and related edge kinds.
Every reached discussion becomes a single Candidate whose provenance is the
set of all strategies that reached it.

The per-candidate exclusion pipeline applies one uniform order to all four
strategies: external endpoint, incomplete, untrustworthy, already examined,
then frontier thresholds. Thresholds only concern edge kinds listed in
FrontierFilter.apply_to; a candidate is rejected below_threshold only when
every kind in its provenance is subject to them, so (with the default
apply_to={related}) a discussion also reached via a linked edge survives.
Thresholds compare answer_count against min_answers and the question post's
own score against min_score (the question score, not the discussion score
used by the trustworthiness filter).

A single invocation performs one iteration; multi-iteration studies loop
externally, adding each iteration's screened-valid discussions to the next
start set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .corpus import Discussion
from .linkgraph import (
    KIND_LINKED,
    KIND_RELATED,
    DiscussionGraph,
    in_neighbors,
    out_neighbors,
)

LINKED_BSB = "LinkedBSB"
LINKED_FSB = "LinkedFSB"
RELATED_BSB = "RelatedBSB"
RELATED_FSB = "RelatedFSB"
STRATEGIES = (LINKED_BSB, LINKED_FSB, RELATED_BSB, RELATED_FSB)

STRATEGY_KIND = {
    LINKED_BSB: KIND_LINKED,
    LINKED_FSB: KIND_LINKED,
    RELATED_BSB: KIND_RELATED,
    RELATED_FSB: KIND_RELATED,
}

EXCLUDED_EXTERNAL = "external"
EXCLUDED_INCOMPLETE = "incomplete"
EXCLUDED_UNTRUSTWORTHY = "untrustworthy"
EXCLUDED_EXAMINED = "already_examined"
EXCLUDED_THRESHOLD = "below_threshold"


@dataclass(frozen=True)
class StartSet:
    project_id: str
    ids: frozenset
    iteration: int = 0  # 0 = search-based start set

    def __post_init__(self) -> None:
        if self.iteration < 0:
            raise ValueError("iteration must be >= 0")
        object.__setattr__(self, "ids", frozenset(self.ids))


@dataclass(frozen=True)
class FrontierFilter:
    min_answers: int = 0
    min_score: int = 0
    apply_to: frozenset = frozenset({KIND_RELATED})

    def __post_init__(self) -> None:
        if self.min_answers < 0 or self.min_score < 0:
            raise ValueError("thresholds must be >= 0")
        kinds = frozenset(self.apply_to)
        unknown = kinds - {KIND_LINKED, KIND_RELATED}
        if unknown:
            raise ValueError(f"unknown edge kinds in apply_to: {sorted(unknown)}")
        object.__setattr__(self, "apply_to", kinds)

    def to_json(self) -> dict:
        return {
            "min_answers": self.min_answers,
            "min_score": self.min_score,
            "apply_to": sorted(self.apply_to),
        }

    @classmethod
    def from_json(cls, d: dict) -> "FrontierFilter":
        return cls(
            min_answers=d["min_answers"],
            min_score=d["min_score"],
            apply_to=frozenset(d.get("apply_to") or {KIND_RELATED}),
        )


@dataclass(frozen=True)
class Candidate:
    discussion_id: int
    provenance: frozenset  # non-empty subset of STRATEGIES
    passed_filters: bool
    excluded_reason: str | None = None

    def __post_init__(self) -> None:
        if not self.provenance:
            raise ValueError("provenance must be non-empty")
        if self.passed_filters != (self.excluded_reason is None):
            raise ValueError("passed_filters must mirror excluded_reason")

    def to_json(self) -> dict:
        return {
            "discussion_id": self.discussion_id,
            "provenance": sorted(self.provenance),
            "passed_filters": self.passed_filters,
            "excluded_reason": self.excluded_reason,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Candidate":
        return cls(
            discussion_id=d["discussion_id"],
            provenance=frozenset(d["provenance"]),
            passed_filters=d["passed_filters"],
            excluded_reason=d.get("excluded_reason"),
        )


def start_set_averages(
    start: StartSet, corpus: dict[int, Discussion]
) -> tuple[Fraction, Fraction]:
    """Exact mean answer count and mean discussion score over the start set.

    Rounding is left to the caller; the default frontier thresholds take
    the floor of each mean.
    """
    if not start.ids:
        raise ValueError("start set is empty")
    missing = [i for i in start.ids if i not in corpus]
    if missing:
        raise KeyError(f"start ids not in corpus: {sorted(missing)}")
    n = len(start.ids)
    answers = Fraction(sum(corpus[i].answer_count for i in start.ids), n)
    score = Fraction(sum(corpus[i].discussion_score for i in start.ids), n)
    return answers, score


def default_filter_from_start(
    start: StartSet, corpus: dict[int, Discussion]
) -> FrontierFilter:
    """Thresholds defaulted to the floor of the start-set averages."""
    avg_answers, avg_score = start_set_averages(start, corpus)
    return FrontierFilter(
        min_answers=max(0, int(avg_answers.__floor__())),
        min_score=max(0, int(avg_score.__floor__())),
    )


def run_iteration(
    start: StartSet,
    graph: DiscussionGraph,
    corpus: dict[int, Discussion],
    frontier: FrontierFilter,
    examined: set,
) -> list[Candidate]:
    """Compute the candidate list for one snowballing iteration.

    ``examined`` must contain every start id (discussions screened in any
    earlier round, valid or not, are never re-surfaced). The output contains
    one Candidate per reached discussion, passed or excluded with a reason,
    sorted by discussion id.
    """
    examined = set(examined)
    if not start.ids <= examined:
        raise ValueError("examined must be a superset of the start ids")

    reached: dict[int, set] = {}
    strategy_neighbors = {
        LINKED_BSB: out_neighbors(graph, start.ids, KIND_LINKED),
        LINKED_FSB: in_neighbors(graph, start.ids, KIND_LINKED),
        RELATED_BSB: out_neighbors(graph, start.ids, KIND_RELATED),
        RELATED_FSB: in_neighbors(graph, start.ids, KIND_RELATED),
    }
    for strategy, ids in strategy_neighbors.items():
        for i in ids:
            reached.setdefault(i, set()).add(strategy)

    candidates = []
    for cid in sorted(reached):
        provenance = frozenset(reached[cid])
        reason = _exclusion_reason(cid, provenance, graph, corpus, frontier, examined)
        candidates.append(
            Candidate(
                discussion_id=cid,
                provenance=provenance,
                passed_filters=reason is None,
                excluded_reason=reason,
            )
        )
    return candidates


def _exclusion_reason(
    cid: int,
    provenance: frozenset,
    graph: DiscussionGraph,
    corpus: dict[int, Discussion],
    frontier: FrontierFilter,
    examined: set,
) -> str | None:
    if cid not in corpus:
        return EXCLUDED_EXTERNAL
    discussion = corpus[cid]
    if not discussion.complete:
        return EXCLUDED_INCOMPLETE
    if not discussion.trustworthy:
        return EXCLUDED_UNTRUSTWORTHY
    if cid in examined:
        return EXCLUDED_EXAMINED
    kinds = {STRATEGY_KIND[s] for s in provenance}
    if kinds <= frontier.apply_to:
        if (
            discussion.answer_count < frontier.min_answers
            or discussion.question.score < frontier.min_score
        ):
            return EXCLUDED_THRESHOLD
    return None


def overlap_table(candidates: list[Candidate]) -> dict[frozenset, int]:
    """Histogram of multi-strategy provenance sets among passed candidates.

    Single-provenance candidates are excluded; the counts sum to the number
    of passed candidates reached by two or more strategies.
    """
    table: dict[frozenset, int] = {}
    for c in candidates:
        if c.passed_filters and len(c.provenance) >= 2:
            table[c.provenance] = table.get(c.provenance, 0) + 1
    return table


def strategy_counts(candidates: list[Candidate]) -> dict[str, int]:
    """Passed candidates per strategy; multi-provenance counted per strategy."""
    counts = {s: 0 for s in STRATEGIES}
    for c in candidates:
        if c.passed_filters:
            for s in c.provenance:
                counts[s] += 1
    return counts
