"""Shared helpers for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

from relevkit.corpus import LabeledPair, RelevanceLabel


class ScriptedProvider:
    """Replays canned completions in order and records every prompt.

    Queue items may be exceptions, which are raised instead of
    returned; that is how tests script provider failures.
    """

    name = "scripted"
    model = "scripted-0"

    def __init__(self, completions):
        self._queue = list(completions)
        self.prompts: list[str] = []

    @property
    def calls(self) -> int:
        return len(self.prompts)

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if not self._queue:
            raise AssertionError("scripted provider ran out of completions")
        item = self._queue.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def make_pair(
    id: str = "p1",
    query: str = "beef hot pot",
    document: str = (
        "Beef hot pot simmers at the table. The broth base is spicy. "
        "Mini hot pot portions sell well at lunch."
    ),
    label: RelevanceLabel = RelevanceLabel.STRONG,
) -> LabeledPair:
    return LabeledPair(id=id, query=query, document=document, label=label)


def write_jsonl(path: Path, records: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path
