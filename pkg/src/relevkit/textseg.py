"""Rule-based paragraph, sentence, and token segmentation with byte spans.

Everything here is deterministic string scanning: no models, no
abbreviation lists. Downstream summarization relies on the spans being
exact slices of the original text, so offsets are tracked in UTF-8 bytes
and every helper round-trips through them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# ASCII terminators close a sentence only when followed by whitespace or
# the end of the text, so dotted tokens like "3.14" survive. Fullwidth
# terminators close immediately because CJK prose puts no space after
# them.
_ASCII_TERMINATORS = frozenset(".!?")
_FULLWIDTH_TERMINATORS = frozenset("。！？…；")  # 。！？…；
_TERMINATORS = _ASCII_TERMINATORS | _FULLWIDTH_TERMINATORS

# A paragraph break is one or more blank (whitespace-only) lines.
_PARAGRAPH_BREAK = re.compile(r"\n[ \t\r]*(?:\n[ \t\r]*)+")

_CJK_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
    (0x2F800, 0x2FA1F),
)


@dataclass(frozen=True)
class Token:
    """A single token; ``byte_span`` indexes the UTF-8 encoding of the source."""

    surface: str
    normalized: str
    byte_span: tuple[int, int]


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[Token, ...]
    index: int
    paragraph_index: int
    byte_span: tuple[int, int]


@dataclass(frozen=True)
class SegmentedDocument:
    """Sentences in document order plus paragraph groupings by sentence index."""

    source: str
    sentences: tuple[Sentence, ...]
    paragraphs: tuple[tuple[int, ...], ...]


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _CJK_RANGES)


def _byte_offsets(text: str) -> list[int]:
    """Map each character index (plus one past the end) to its byte offset."""
    offsets = [0] * (len(text) + 1)
    position = 0
    for i, ch in enumerate(text):
        offsets[i] = position
        position += len(ch.encode("utf-8"))
    offsets[len(text)] = position
    return offsets


def _scan_tokens(text: str, start: int, end: int, offsets: list[int]) -> list[Token]:
    tokens: list[Token] = []

    def emit(a: int, b: int) -> None:
        surface = text[a:b]
        tokens.append(Token(surface, surface.casefold(), (offsets[a], offsets[b])))

    run_start: int | None = None
    for i in range(start, end):
        ch = text[i]
        if _is_cjk(ch):
            if run_start is not None:
                emit(run_start, i)
                run_start = None
            emit(i, i + 1)
        elif ch.isalnum():
            if run_start is None:
                run_start = i
        elif run_start is not None:
            emit(run_start, i)
            run_start = None
    if run_start is not None:
        emit(run_start, end)
    return tokens


def tokenize(text: str) -> list[Token]:
    """Split text into tokens.

    Maximal runs of letters and digits form one token each, except that
    every CJK character stands alone. All other characters separate
    tokens and are dropped. ``normalized`` is the case-folded surface.
    """
    return _scan_tokens(text, 0, len(text), _byte_offsets(text))


def token_count(text: str) -> int:
    return len(tokenize(text))


def _paragraph_ranges(text: str) -> list[tuple[int, int]]:
    ranges: list[tuple[int, int]] = []
    position = 0
    for match in _PARAGRAPH_BREAK.finditer(text):
        if text[position:match.start()].strip():
            ranges.append((position, match.start()))
        position = match.end()
    if text[position:].strip():
        ranges.append((position, len(text)))
    return ranges


def _sentence_ranges(text: str, start: int, end: int) -> list[tuple[int, int]]:
    ranges: list[tuple[int, int]] = []
    i = start
    while i < end:
        while i < end and text[i].isspace():
            i += 1
        if i >= end:
            break
        sentence_start = i
        sentence_end: int | None = None
        j = i
        while j < end:
            ch = text[j]
            if ch in _TERMINATORS:
                closes = (
                    ch in _FULLWIDTH_TERMINATORS
                    or j + 1 >= end
                    or text[j + 1].isspace()
                )
                if closes:
                    j += 1
                    while j < end and text[j] in _TERMINATORS:
                        j += 1
                    sentence_end = j
                    break
            j += 1
        if sentence_end is None:
            # Trailing text with no terminator still forms a sentence.
            sentence_end = end
            while sentence_end > sentence_start and text[sentence_end - 1].isspace():
                sentence_end -= 1
        ranges.append((sentence_start, sentence_end))
        i = sentence_end
    return ranges


def segment(text: str) -> SegmentedDocument:
    """Segment text into paragraphs and sentences with byte-accurate spans.

    Raises ValueError("empty document") for empty or whitespace-only
    input. Every non-whitespace character lands in exactly one sentence
    span, and slicing the UTF-8 encoding of ``text`` at any span yields
    that sentence's (or token's) surface.
    """
    if not text.strip():
        raise ValueError("empty document")
    offsets = _byte_offsets(text)
    sentences: list[Sentence] = []
    paragraphs: list[tuple[int, ...]] = []
    for paragraph_index, (p_start, p_end) in enumerate(_paragraph_ranges(text)):
        indices: list[int] = []
        for s_start, s_end in _sentence_ranges(text, p_start, p_end):
            index = len(sentences)
            sentences.append(
                Sentence(
                    text=text[s_start:s_end],
                    tokens=tuple(_scan_tokens(text, s_start, s_end, offsets)),
                    index=index,
                    paragraph_index=paragraph_index,
                    byte_span=(offsets[s_start], offsets[s_end]),
                )
            )
            indices.append(index)
        paragraphs.append(tuple(indices))
    return SegmentedDocument(source=text, sentences=tuple(sentences), paragraphs=tuple(paragraphs))
