"""Evaluation measures for a review project and report emission.

All ratios are exact fractions; rounding happens only at rendering, where
percentages are rendered both as round-half-up integers and with one
decimal place (integer rendering hides distinctions near .5, so reports
always carry the extra precision). "Recall" here is the
relative gain of new valid discussions over the start set, labeled
"relative recall gain" to avoid overclaiming true IR recall.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .linkgraph import CitationCounts
from .snowball import STRATEGIES, Candidate, overlap_table, strategy_counts

SOURCE_SEARCH = "search"
SOURCE_ALL_SB = "AllSB"
SOURCES = (SOURCE_SEARCH, *STRATEGIES, SOURCE_ALL_SB)


def precision(candidates: int, valid: int) -> Fraction | None:
    """valid/candidates as an exact fraction; None (absent) when there are
    no candidates to divide by."""
    if candidates < 0 or valid < 0 or valid > candidates:
        raise ValueError(f"need 0 <= valid <= candidates, got ({candidates}, {valid})")
    if candidates == 0:
        return None
    return Fraction(valid, candidates)


def combined_precision(sources: list[tuple[int, int]]) -> Fraction | None:
    """Pooled precision: sum of valids over sum of candidates."""
    total_candidates = 0
    total_valid = 0
    for candidates, valid in sources:
        if candidates < 0 or valid < 0 or valid > candidates:
            raise ValueError(f"invalid source pair ({candidates}, {valid})")
        total_candidates += candidates
        total_valid += valid
    if total_candidates == 0:
        return None
    return Fraction(total_valid, total_candidates)


def recall_gain(start_valid: int, new_valid: int) -> Fraction | None:
    """New valid discussions relative to the start set size."""
    if start_valid < 0 or new_valid < 0:
        raise ValueError("counts must be >= 0")
    if start_valid == 0:
        return None
    return Fraction(new_valid, start_valid)


def round_half_up(value: Fraction, decimals: int = 0) -> Fraction:
    scale = Fraction(10) ** decimals
    return Fraction((value * scale + Fraction(1, 2)).__floor__(), 1) / scale


def percent_int(value: Fraction) -> int:
    return int(round_half_up(value * 100))


def percent_1dp(value: Fraction) -> str:
    scaled = round_half_up(value * 100, 1)
    whole = scaled.__floor__()
    tenths = int((scaled - whole) * 10)
    return f"{whole}.{tenths}"


def format_percent(value: Fraction | None) -> str:
    if value is None:
        return "n/a"
    return f"{percent_int(value)}% ({percent_1dp(value)}%)"


@dataclass(frozen=True)
class SourceStats:
    candidates: int
    valid: int

    @property
    def precision(self) -> Fraction | None:
        return precision(self.candidates, self.valid)

    def to_json(self) -> dict:
        p = self.precision
        return {
            "candidates": self.candidates,
            "valid": self.valid,
            "precision": None if p is None else [p.numerator, p.denominator],
            "precision_pct": None if p is None else percent_int(p),
            "precision_pct_1dp": None if p is None else percent_1dp(p),
        }


@dataclass
class MetricsReport:
    sources: dict = field(default_factory=dict)  # source name -> SourceStats
    combined: Fraction | None = None  # search pooled with all snowballing
    gain: Fraction | None = None
    overlap: dict = field(default_factory=dict)  # provenance frozenset -> count
    top_cited: list = field(default_factory=list)  # (id, CitationCounts)
    generated_at: str = ""


def build_report(
    search_stats: SourceStats | None,
    candidates: list[Candidate],
    valid_ids: set,
    top_cited: list[tuple[int, CitationCounts]],
    generated_at: str,
) -> MetricsReport:
    """Assemble the report from one snowball iteration's outcomes.

    Per-strategy rows count a multi-provenance candidate once per strategy;
    the all-snowballing row counts unique candidates.
    """
    report = MetricsReport(generated_at=generated_at)
    passed = [c for c in candidates if c.passed_filters]
    per_strategy = strategy_counts(candidates)
    for strategy in STRATEGIES:
        strategy_valid = sum(
            1
            for c in passed
            if strategy in c.provenance and c.discussion_id in valid_ids
        )
        report.sources[strategy] = SourceStats(per_strategy[strategy], strategy_valid)
    unique_valid = sum(1 for c in passed if c.discussion_id in valid_ids)
    report.sources[SOURCE_ALL_SB] = SourceStats(len(passed), unique_valid)

    if search_stats is not None:
        report.sources[SOURCE_SEARCH] = search_stats
        report.combined = combined_precision(
            [
                (len(passed), unique_valid),
                (search_stats.candidates, search_stats.valid),
            ]
        )
        report.gain = recall_gain(search_stats.valid, unique_valid)

    report.overlap = overlap_table(candidates)
    report.top_cited = list(top_cited)
    return report


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

FORMAT_STRUCTURED = "structured"
FORMAT_TABLE = "table"


def _overlap_rows(report: MetricsReport) -> list[tuple[list[str], int]]:
    rows = [(sorted(prov), count) for prov, count in report.overlap.items()]
    rows.sort(key=lambda row: (-row[1], row[0]))
    return rows


def emit_report(report: MetricsReport, fmt: str = FORMAT_STRUCTURED) -> bytes:
    if fmt == FORMAT_STRUCTURED:
        return _emit_structured(report)
    if fmt == FORMAT_TABLE:
        return _emit_table(report)
    raise ValueError(f"unknown report format: {fmt}")


def _fraction_json(value: Fraction | None):
    return None if value is None else [value.numerator, value.denominator]


def _emit_structured(report: MetricsReport) -> bytes:
    lines = []

    def emit(record: dict) -> None:
        lines.append(json.dumps(record, sort_keys=True, ensure_ascii=False))

    for source in SOURCES:
        if source in report.sources:
            emit({"record": "source", "source": source, **report.sources[source].to_json()})
    for prov, count in _overlap_rows(report):
        emit({"record": "overlap", "provenance": prov, "count": count})
    for qid, counts in report.top_cited:
        emit({"record": "top_cited", "discussion_id": qid, **counts.to_json()})
    emit(
        {
            "record": "summary",
            "combined_precision": _fraction_json(report.combined),
            "combined_precision_pct": None
            if report.combined is None
            else percent_int(report.combined),
            "recall_gain": _fraction_json(report.gain),
            "recall_gain_pct": None if report.gain is None else percent_int(report.gain),
            "generated_at": report.generated_at,
        }
    )
    return ("\n".join(lines) + "\n").encode("utf-8")


_SOURCE_TITLES = {
    SOURCE_SEARCH: "Search",
    "LinkedBSB": "Linked BSB",
    "LinkedFSB": "Linked FSB",
    "RelatedBSB": "Related BSB",
    "RelatedFSB": "Related FSB",
    SOURCE_ALL_SB: "All snowballing",
}

_STRATEGY_SHORT = {
    "LinkedBSB": "LB",
    "LinkedFSB": "LF",
    "RelatedBSB": "RB",
    "RelatedFSB": "RF",
}


def _emit_table(report: MetricsReport) -> bytes:
    out = ["# Review metrics", ""]
    out.append("## Precision by source")
    out.append("")
    for source in SOURCES:
        stats = report.sources.get(source)
        if stats is None:
            out.append(f"- {_SOURCE_TITLES[source]}: absent")
            continue
        out.append(
            f"- {_SOURCE_TITLES[source]}: {stats.candidates} candidates, "
            f"{stats.valid} valid, precision {format_percent(stats.precision)}"
        )
    out.append("")
    out.append(f"- Combined (search + snowballing): {format_percent(report.combined)}")
    if report.gain is None:
        out.append("- Relative recall gain: n/a")
    else:
        out.append(
            f"- Relative recall gain: {percent_int(report.gain)}% "
            f"({percent_1dp(report.gain)}%)"
        )
    out.append("")
    out.append("## Overlapping discoveries")
    out.append("")
    rows = _overlap_rows(report)
    if not rows:
        out.append("(none)")
    else:
        out.append("| Strategy combination | Discussions |")
        out.append("| --- | --- |")
        for prov, count in rows:
            combo = " + ".join(_STRATEGY_SHORT.get(s, s) for s in prov)
            out.append(f"| {combo} | {count} |")
    out.append("")
    out.append("## Most cited discussions")
    out.append("")
    if not report.top_cited:
        out.append("(none)")
    else:
        for qid, counts in report.top_cited:
            out.append(
                f"- {qid}: {counts.total} citations "
                f"({counts.linked_in} linked, {counts.related_in} related)"
            )
    out.append("")
    out.append(f"Generated at: {report.generated_at}")
    out.append("")
    return "\n".join(out).encode("utf-8")
