"""Precision/recall arithmetic and report emission."""

from fractions import Fraction

import pytest

from glsb.linkgraph import CitationCounts
from glsb.metrics import (
    FORMAT_STRUCTURED,
    FORMAT_TABLE,
    MetricsReport,
    SourceStats,
    build_report,
    combined_precision,
    emit_report,
    percent_1dp,
    percent_int,
    precision,
    recall_gain,
    round_half_up,
)
from glsb.snowball import Candidate


class TestPrecision:
    def test_forty_four_percent_pair(self):
        p = precision(34, 15)
        assert p == Fraction(15, 34)
        assert percent_int(p) == 44

    def test_second_forty_four_percent_pair(self):
        assert percent_int(precision(156, 69)) == 44

    def test_rounding_sensitive_pair(self):
        # 59/104 = 56.73%: one-decimal rendering keeps the distinction the
        # integer rendering rounds away
        p = precision(104, 59)
        assert percent_1dp(p) == "56.7"
        assert percent_int(p) == 57

    def test_zero_candidates_absent(self):
        assert precision(0, 0) is None

    def test_invalid_pairs_rejected(self):
        with pytest.raises(ValueError):
            precision(5, 6)
        with pytest.raises(ValueError):
            precision(-1, 0)

    def test_scale_invariance(self):
        for k in (1, 2, 7, 100):
            assert precision(34 * k, 15 * k) == precision(34, 15)


class TestCombinedPrecision:
    def test_pooled_pair(self):
        p = combined_precision([(291, 130), (226, 108)])
        assert p == Fraction(238, 517)
        assert percent_int(p) == 46

    def test_single_source_equals_precision(self):
        assert combined_precision([(50, 19)]) == precision(50, 19)

    def test_linked_and_related_groups(self):
        assert percent_int(combined_precision([(34, 15), (50, 19)])) == 40
        assert percent_int(combined_precision([(104, 59), (156, 69)])) == 49

    def test_between_component_min_and_max(self):
        import random

        rng = random.Random(8)
        for _ in range(200):
            pairs = [
                (c, rng.randint(0, c))
                for c in (rng.randint(1, 50) for _ in range(rng.randint(1, 5)))
            ]
            pooled = combined_precision(pairs)
            parts = [Fraction(v, c) for c, v in pairs]
            assert min(parts) <= pooled <= max(parts)

    def test_empty_is_absent(self):
        assert combined_precision([]) is None
        assert combined_precision([(0, 0)]) is None


class TestRecallGain:
    def test_fractional_gain_rendering(self):
        g = recall_gain(108, 130)
        assert percent_1dp(g) == "120.4"
        assert percent_int(g) == 120

    def test_zero_new(self):
        assert percent_int(recall_gain(108, 0)) == 0

    def test_equal_sets(self):
        assert percent_int(recall_gain(100, 100)) == 100

    def test_zero_start_absent(self):
        assert recall_gain(0, 5) is None


class TestRounding:
    def test_round_half_up_at_the_boundary(self):
        assert round_half_up(Fraction(445, 10)) == 45  # 44.5 -> 45, not banker's
        assert round_half_up(Fraction(435, 10)) == 44  # 43.5 -> 44
        assert round_half_up(Fraction(567, 10)) == 57

    def test_one_decimal(self):
        assert percent_1dp(Fraction(59, 104)) == "56.7"
        assert percent_1dp(Fraction(1, 3)) == "33.3"
        assert percent_1dp(Fraction(1, 2)) == "50.0"


def sample_report():
    candidates = [
        Candidate(discussion_id=1, provenance=frozenset({"LinkedBSB"}),
                  passed_filters=True),
        Candidate(discussion_id=2,
                  provenance=frozenset({"RelatedBSB", "RelatedFSB"}),
                  passed_filters=True),
        Candidate(discussion_id=3, provenance=frozenset({"RelatedFSB"}),
                  passed_filters=True),
        Candidate(discussion_id=4, provenance=frozenset({"RelatedBSB"}),
                  passed_filters=False, excluded_reason="below_threshold"),
    ]
    return build_report(
        search_stats=SourceStats(candidates=10, valid=6),
        candidates=candidates,
        valid_ids={1, 2},
        top_cited=[(2, CitationCounts(2, 1)), (1, CitationCounts(0, 1))],
        generated_at="2024-06-01T00:00:00+00:00",
    )


class TestBuildReport:
    def test_per_strategy_and_unique_counts(self):
        report = sample_report()
        assert report.sources["LinkedBSB"].candidates == 1
        assert report.sources["RelatedBSB"].candidates == 1  # excluded one ignored
        assert report.sources["RelatedFSB"].candidates == 2
        assert report.sources["AllSB"].candidates == 3
        assert report.sources["AllSB"].valid == 2
        assert report.sources["RelatedFSB"].valid == 1

    def test_combined_and_gain(self):
        report = sample_report()
        assert report.combined == Fraction(6 + 2, 10 + 3)
        assert report.gain == Fraction(2, 6)

    def test_overlap_histogram(self):
        report = sample_report()
        assert report.overlap == {frozenset({"RelatedBSB", "RelatedFSB"}): 1}


class TestEmit:
    def test_structured_deterministic(self):
        report = sample_report()
        assert emit_report(report) == emit_report(report)

    def test_table_deterministic_and_complete(self):
        report = sample_report()
        table = emit_report(report, FORMAT_TABLE)
        assert table == emit_report(report, FORMAT_TABLE)
        text = table.decode()
        assert "Search: 10 candidates, 6 valid" in text
        assert "All snowballing: 3 candidates, 2 valid" in text
        assert "| RB + RF | 1 |" in text
        assert "Relative recall gain: 33%" in text
        assert "2: 3 citations (2 linked, 1 related)" in text

    def test_empty_project_report(self):
        report = MetricsReport(generated_at="t0")
        structured = emit_report(report, FORMAT_STRUCTURED).decode()
        assert '"record": "summary"' in structured
        table = emit_report(report, FORMAT_TABLE).decode()
        assert "Search: absent" in table
        assert "Combined (search + snowballing): n/a" in table

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            emit_report(sample_report(), "yaml")

    def test_structured_is_valid_ndjson(self):
        import json

        payload = emit_report(sample_report()).decode()
        records = [json.loads(line) for line in payload.strip().split("\n")]
        kinds = {r["record"] for r in records}
        assert kinds == {"source", "overlap", "top_cited", "summary"}
