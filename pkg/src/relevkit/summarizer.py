"""Extractive summaries that pack query context and document leads into one string.

Two summaries are built per (query, document) pair and joined around a
separator token:

* a query-focused part that picks, for each query token, the earliest
  sentence containing it, then grows symmetric context around those
  seeds until a token budget is hit;
* a lead-style document part that takes the first three sentences of
  every paragraph.

Both parts are verbatim sentence slices of the document, truncated only
at token boundaries, so anything the reader sees exists in the source.
"""

from __future__ import annotations

from dataclasses import dataclass

from .textseg import SegmentedDocument, segment, tokenize

_LEAD_SENTENCES_PER_PARAGRAPH = 3


@dataclass(frozen=True)
class SummaryBudget:
    """Token budgets for the two summary parts and their combined form."""

    query_focused_max: int = 128
    doc_summary_max: int = 64
    total_max: int = 192
    separator: str = "[SEP]"

    def __post_init__(self) -> None:
        for name in ("query_focused_max", "doc_summary_max", "total_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive token count")
        if self.query_focused_max + self.doc_summary_max > self.total_max:
            raise ValueError("query_focused_max + doc_summary_max must not exceed total_max")
        if not self.separator or self.separator != self.separator.strip():
            raise ValueError("separator must be non-empty without surrounding whitespace")


@dataclass(frozen=True)
class MixSummary:
    """The two summary parts plus their joined rendering.

    ``selected_sentence_indices`` are the document sentence indices kept
    in the query-focused part, strictly increasing; sentences that were
    wholly cut by truncation are not listed.
    """

    query_focused: str
    doc_summary: str
    combined: str
    selected_sentence_indices: tuple[int, ...]


def _unique_query_tokens(query: str) -> list[str]:
    return list(dict.fromkeys(token.normalized for token in tokenize(query)))


def _join_and_truncate(
    doc: SegmentedDocument, indices: list[int], max_tokens: int
) -> tuple[str, list[int]]:
    """Join sentences by index order with single spaces, then cut at a token edge.

    Returns the (possibly truncated) text and the indices that still
    contribute at least one character to it.
    """
    parts = [doc.sentences[i].text for i in indices]
    joined = " ".join(parts)
    tokens = tokenize(joined)
    if len(tokens) <= max_tokens:
        return joined, list(indices)
    cut = tokens[max_tokens - 1].byte_span[1]
    truncated = joined.encode("utf-8")[:cut].decode("utf-8")
    kept: list[int] = []
    position = 0
    for index, part in zip(indices, parts):
        if position < len(truncated):
            kept.append(index)
        position += len(part) + 1
    return truncated, kept


def _query_focused(doc: SegmentedDocument, query: str, max_tokens: int) -> tuple[str, list[int]]:
    query_tokens = _unique_query_tokens(query)
    sentence_tokens = [frozenset(t.normalized for t in s.tokens) for s in doc.sentences]

    selected: set[int] = set()
    seeds: list[int] = []
    for token in query_tokens:
        if any(token in sentence_tokens[i] for i in seeds):
            continue
        for i, tokens in enumerate(sentence_tokens):
            if token in tokens:
                selected.add(i)
                seeds.append(i)
                break
    if not seeds:
        return "", []

    counts = [len(s.tokens) for s in doc.sentences]
    total = sum(counts[i] for i in selected)
    n = len(doc.sentences)

    def block_edges(seed: int) -> tuple[int | None, int | None]:
        lo = seed
        while lo - 1 >= 0 and lo - 1 in selected:
            lo -= 1
        hi = seed
        while hi + 1 < n and hi + 1 in selected:
            hi += 1
        return (lo - 1 if lo > 0 else None), (hi + 1 if hi + 1 < n else None)

    # Round-robin growth: each seed in turn extends its contiguous block
    # by the sentence before it, then the one after. The first candidate
    # that would overshoot the budget ends expansion entirely.
    budget_hit = False
    progressed = True
    while progressed and not budget_hit:
        progressed = False
        for seed in seeds:
            for side in (0, 1):
                candidate = block_edges(seed)[side]
                if candidate is None:
                    continue
                if total + counts[candidate] > max_tokens:
                    budget_hit = True
                    break
                selected.add(candidate)
                total += counts[candidate]
                progressed = True
            if budget_hit:
                break

    return _join_and_truncate(doc, sorted(selected), max_tokens)


def _document_summary(doc: SegmentedDocument, max_tokens: int) -> str:
    lead: list[int] = []
    for paragraph in doc.paragraphs:
        lead.extend(paragraph[:_LEAD_SENTENCES_PER_PARAGRAPH])
    text, _ = _join_and_truncate(doc, lead, max_tokens)
    return text


def join_summary_parts(query_focused: str, separator: str, doc_summary: str) -> str:
    """Join the non-empty parts with single spaces; the separator always appears."""
    return " ".join(part for part in (query_focused, separator, doc_summary) if part)


def query_focused_summary(
    query: str, doc_text: str, budget: SummaryBudget | None = None
) -> tuple[str, list[int]]:
    """Extract the sentences most tied to the query, with surrounding context.

    For each distinct query token (in query order) that no chosen
    sentence covers yet, the earliest sentence containing it becomes a
    seed. Seeds then grow by adjacent sentences, round-robin, while the
    budget allows. Returns the summary text and the kept sentence
    indices; a query with no matching sentence yields ("", []).
    """
    budget = budget or SummaryBudget()
    if not query.strip():
        raise ValueError("empty query")
    return _query_focused(segment(doc_text), query, budget.query_focused_max)


def document_summary(doc_text: str, budget: SummaryBudget | None = None) -> str:
    """First sentences of each paragraph, up to three, under the token budget."""
    budget = budget or SummaryBudget()
    return _document_summary(segment(doc_text), budget.doc_summary_max)


def mix_summary(query: str, doc_text: str, budget: SummaryBudget | None = None) -> MixSummary:
    """Build both summary parts and join them as ``query part [SEP] doc part``.

    The separator is always present, even when the query matches nothing
    and the query-focused part is empty.
    """
    budget = budget or SummaryBudget()
    if not query.strip():
        raise ValueError("empty query")
    doc = segment(doc_text)
    query_focused, indices = _query_focused(doc, query, budget.query_focused_max)
    doc_part = _document_summary(doc, budget.doc_summary_max)
    combined = join_summary_parts(query_focused, budget.separator, doc_part)
    return MixSummary(
        query_focused=query_focused,
        doc_summary=doc_part,
        combined=combined,
        selected_sentence_indices=tuple(indices),
    )
