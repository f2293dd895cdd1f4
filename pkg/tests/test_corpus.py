"""Tests for dataset records, JSONL round-trips, and class statistics."""

from __future__ import annotations

import json

import pytest

from conftest import make_pair, write_jsonl
from relevkit.corpus import (
    DatasetError,
    LabeledPair,
    RelevanceLabel,
    iter_dataset,
    load_dataset,
    pair_to_record,
    stats,
    write_dataset,
)


class TestRelevanceLabel:
    def test_scores(self):
        assert RelevanceLabel.STRONG.score == 1.0
        assert RelevanceLabel.WEAK.score == 0.7
        assert RelevanceLabel.IRRELEVANT.score == 0.0

    def test_parse_accepts_value_strings(self):
        assert RelevanceLabel.parse("strong") is RelevanceLabel.STRONG
        assert RelevanceLabel.parse("weak") is RelevanceLabel.WEAK
        assert RelevanceLabel.parse("irrelevant") is RelevanceLabel.IRRELEVANT

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValueError, match="label must be one of"):
            RelevanceLabel.parse("relevant")


class TestLabeledPair:
    def test_empty_query_rejected(self):
        with pytest.raises(ValueError, match="empty query"):
            make_pair(query="   ")

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError, match="empty document"):
            make_pair(document=" \n ")

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            make_pair(id="")

    def test_extras_preserved(self):
        pair = LabeledPair(
            id="x", query="q", document="d", label=RelevanceLabel.WEAK, extras={"fold": 3}
        )
        assert pair.extras == {"fold": 3}


class TestIterDataset(object):
    def test_three_valid_lines(self, tmp_path):
        path = write_jsonl(
            tmp_path / "data.jsonl",
            [
                {"id": "a", "query": "q1", "document": "d1", "label": "strong"},
                {"id": "b", "query": "q2", "document": "d2", "label": "weak"},
                {"id": "c", "query": "q3", "document": "d3", "label": "irrelevant"},
            ],
        )
        pairs = load_dataset(path)
        assert [p.id for p in pairs] == ["a", "b", "c"]
        assert [p.label for p in pairs] == [
            RelevanceLabel.STRONG,
            RelevanceLabel.WEAK,
            RelevanceLabel.IRRELEVANT,
        ]

    def test_missing_label_names_line(self, tmp_path):
        path = write_jsonl(
            tmp_path / "data.jsonl",
            [
                {"id": "a", "query": "q1", "document": "d1", "label": "strong"},
                {"id": "b", "query": "q2", "document": "d2"},
            ],
        )
        with pytest.raises(DatasetError, match="line 2: missing field label"):
            load_dataset(path)

    def test_missing_query_names_line(self, tmp_path):
        path = write_jsonl(tmp_path / "data.jsonl", [{"id": "a", "document": "d", "label": "weak"}])
        with pytest.raises(DatasetError, match="line 1: missing field query"):
            load_dataset(path)

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "data.jsonl"
        path.write_text('{"id": "a", "query": "q", "document": "d", "label": "strong"}\nnot json\n')
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "data.jsonl"
        path.write_text(
            '\n{"id": "a", "query": "q", "document": "d", "label": "strong"}\n\n'
            '{"id": "b", "query": "q", "document": "d", "label": "weak"}\n'
        )
        assert [p.id for p in load_dataset(path)] == ["a", "b"]

    def test_missing_id_synthesized_from_line_number(self, tmp_path):
        path = write_jsonl(tmp_path / "data.jsonl", [{"query": "q", "document": "d", "label": "weak"}])
        (pair,) = load_dataset(path)
        assert pair.id == "line-1"

    def test_duplicate_ids_rejected(self, tmp_path):
        path = write_jsonl(
            tmp_path / "data.jsonl",
            [
                {"id": "a", "query": "q", "document": "d", "label": "strong"},
                {"id": "a", "query": "q2", "document": "d2", "label": "weak"},
            ],
        )
        with pytest.raises(DatasetError, match="duplicate id"):
            load_dataset(path)

    def test_streaming_is_lazy(self, tmp_path):
        path = write_jsonl(
            tmp_path / "data.jsonl",
            [
                {"id": "a", "query": "q", "document": "d", "label": "strong"},
                {"id": "b", "query": "q", "document": "d"},
            ],
        )
        iterator = iter_dataset(path)
        first = next(iterator)
        assert first.id == "a"
        with pytest.raises(DatasetError):
            next(iterator)


class TestRoundTrip:
    def test_write_then_load_preserves_pairs(self, tmp_path):
        pairs = [
            make_pair(id="a", query="樱花 公园", document="樱花很美。公园很大。"),
            make_pair(id="b", label=RelevanceLabel.IRRELEVANT),
            LabeledPair(
                id="c", query="q", document="d", label=RelevanceLabel.WEAK, extras={"src": "web"}
            ),
        ]
        path = tmp_path / "out.jsonl"
        assert write_dataset(path, pairs) == 3
        assert load_dataset(path) == pairs

    def test_written_files_keep_raw_unicode(self, tmp_path):
        path = tmp_path / "out.jsonl"
        write_dataset(path, [make_pair(id="a", query="樱花", document="公园。")])
        assert "樱花" in path.read_text(encoding="utf-8")

    def test_pair_to_record_is_json_ready(self):
        record = pair_to_record(make_pair(id="a", label=RelevanceLabel.WEAK))
        assert record["label"] == "weak"
        json.dumps(record)


class TestStats:
    def test_empty(self):
        result = stats([])
        assert result.to_dict() == {"strong": 0, "weak": 0, "irrelevant": 0, "total": 0}

    def test_direct_counts(self):
        result = stats(
            [
                make_pair(id="a"),
                make_pair(id="b"),
                make_pair(id="c", label=RelevanceLabel.WEAK),
            ]
        )
        assert result.strong == 2
        assert result.weak == 1
        assert result.irrelevant == 0
        assert result.total == 3

    def test_large_skewed_corpus_counts(self):
        """Counting stays exact at realistic corpus scale (46,306 records)."""
        def pairs():
            counts = (
                (RelevanceLabel.STRONG, 33_453),
                (RelevanceLabel.WEAK, 6_530),
                (RelevanceLabel.IRRELEVANT, 6_323),
            )
            serial = 0
            for label, n in counts:
                for _ in range(n):
                    yield LabeledPair(
                        id=f"r{serial}", query="q", document="d", label=label
                    )
                    serial += 1

        result = stats(pairs())
        assert result.to_dict() == {
            "strong": 33_453,
            "weak": 6_530,
            "irrelevant": 6_323,
            "total": 46_306,
        }
