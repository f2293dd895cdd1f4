"""JSONL corpora of query/document pairs with three-way relevance labels."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Iterator


class DatasetError(ValueError):
    """A dataset file failed parsing or validation."""


class RelevanceLabel(Enum):
    STRONG = "strong"
    WEAK = "weak"
    IRRELEVANT = "irrelevant"

    @property
    def score(self) -> float:
        """Graded gain used by ranking metrics."""
        return _LABEL_SCORES[self]

    @classmethod
    def parse(cls, value: Any) -> "RelevanceLabel":
        """Case-insensitive label lookup; raises ValueError for anything else."""
        if isinstance(value, str):
            try:
                return cls(value.strip().lower())
            except ValueError:
                pass
        raise ValueError(f"label must be one of strong|weak|irrelevant, got {value!r}")


_LABEL_SCORES = {
    RelevanceLabel.STRONG: 1.0,
    RelevanceLabel.WEAK: 0.7,
    RelevanceLabel.IRRELEVANT: 0.0,
}

_KNOWN_FIELDS = ("id", "query", "document", "label")


@dataclass(frozen=True)
class LabeledPair:
    """One labeled (query, document) pair.

    ``extras`` holds any unknown record fields so that writing a loaded
    dataset back out loses nothing.
    """

    id: str
    query: str
    document: str
    label: RelevanceLabel
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.query, str) or not self.query.strip():
            raise ValueError("empty query")
        if not isinstance(self.document, str) or not self.document.strip():
            raise ValueError("empty document")
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("id must be a non-empty string")


@dataclass(frozen=True)
class DatasetStats:
    strong: int
    weak: int
    irrelevant: int

    @property
    def total(self) -> int:
        return self.strong + self.weak + self.irrelevant

    def to_dict(self) -> dict[str, int]:
        return {
            "strong": self.strong,
            "weak": self.weak,
            "irrelevant": self.irrelevant,
            "total": self.total,
        }


def _pair_from_record(raw: dict[str, Any], line_no: int) -> LabeledPair:
    for name in ("query", "document", "label"):
        if name not in raw:
            raise DatasetError(f"line {line_no}: missing field {name}")
    try:
        label = RelevanceLabel.parse(raw["label"])
    except ValueError as exc:
        raise DatasetError(f"line {line_no}: {exc}") from None
    pair_id = raw.get("id")
    if pair_id is None:
        pair_id = f"line-{line_no}"
    elif not isinstance(pair_id, str) or not pair_id:
        raise DatasetError(f"line {line_no}: id must be a non-empty string")
    extras = {key: value for key, value in raw.items() if key not in _KNOWN_FIELDS}
    try:
        return LabeledPair(id=pair_id, query=raw["query"], document=raw["document"], label=label, extras=extras)
    except ValueError as exc:
        raise DatasetError(f"line {line_no}: {exc}") from None


def iter_dataset(path: str | Path) -> Iterator[LabeledPair]:
    """Stream validated pairs from a JSONL file, one record per line.

    Records without an id get a synthetic ``line-<n>`` id from their
    1-based line number. Duplicate ids, missing fields, bad labels, and
    invalid UTF-8 all raise DatasetError; blank lines are skipped.
    """
    seen_ids: set[str] = set()
    try:
        with Path(path).open("r", encoding="utf-8", errors="strict") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DatasetError(f"line {line_no}: invalid JSON: {exc.msg}") from None
                if not isinstance(raw, dict):
                    raise DatasetError(f"line {line_no}: record must be a JSON object")
                pair = _pair_from_record(raw, line_no)
                if pair.id in seen_ids:
                    raise DatasetError(f"line {line_no}: duplicate id {pair.id!r}")
                seen_ids.add(pair.id)
                yield pair
    except UnicodeDecodeError as exc:
        raise DatasetError(f"{path}: invalid UTF-8: {exc}") from None


def load_dataset(path: str | Path) -> list[LabeledPair]:
    """Load a whole JSONL dataset into memory. See iter_dataset for rules."""
    return list(iter_dataset(path))


def pair_to_record(pair: LabeledPair) -> dict[str, Any]:
    record: dict[str, Any] = {
        "id": pair.id,
        "query": pair.query,
        "document": pair.document,
        "label": pair.label.value,
    }
    for key, value in pair.extras.items():
        record.setdefault(key, value)
    return record


def write_dataset(path: str | Path, pairs: Iterable[LabeledPair]) -> int:
    """Write pairs as JSONL (labels lowercase, extras preserved); returns the count."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(json.dumps(pair_to_record(pair), ensure_ascii=False) + "\n")
            count += 1
    return count


def stats(pairs: Iterable[LabeledPair]) -> DatasetStats:
    counts = Counter(pair.label for pair in pairs)
    return DatasetStats(
        strong=counts[RelevanceLabel.STRONG],
        weak=counts[RelevanceLabel.WEAK],
        irrelevant=counts[RelevanceLabel.IRRELEVANT],
    )
