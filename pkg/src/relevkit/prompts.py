"""Prompt templates for query rewriting and keyword extraction."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PromptTemplate:
    """A four-part instruction prompt with slots for the target query/document."""

    role_instruction: str
    constraints: str
    few_shot_examples: tuple[tuple[str, str], ...]
    output_format_instruction: str

    def render(self, query: str | None = None, document: str | None = None) -> str:
        """Assemble the full prompt; each provided target appears exactly once.

        Targets are fenced between ``<<<`` and ``>>>`` so that offline
        providers can recover them no matter what they contain.
        """
        parts = [self.role_instruction, f"Constraints: {self.constraints}"]
        if self.few_shot_examples:
            lines = ["Examples:"]
            for given, expected in self.few_shot_examples:
                lines.append(f"- given: {given}")
                lines.append(f"  expected: {expected}")
            parts.append("\n".join(lines))
        parts.append(self.output_format_instruction)
        if query is not None:
            parts.append(f"Query:\n<<<{query}>>>")
        if document is not None:
            parts.append(f"Document:\n<<<{document}>>>")
        return "\n\n".join(parts)


SYNONYM_PROMPT = PromptTemplate(
    role_instruction="You rewrite search queries using synonyms.",
    constraints=(
        "Keep the meaning of the query but use different words. "
        "Never repeat the original query verbatim."
    ),
    few_shot_examples=(
        ("cheap flights abroad", "low cost airfare overseas"),
        ("laptop screen repair", "notebook display fixing"),
    ),
    output_format_instruction="Return one rewritten query per line and nothing else.",
)

ANTONYM_PROMPT = PromptTemplate(
    role_instruction="You rewrite search queries into antonyms.",
    constraints=(
        "Invert the intent of the query while keeping similar wording, "
        "for example by negating or swapping its key term."
    ),
    few_shot_examples=(
        ("best quiet hotels", "best noisy hotels"),
        ("opening a savings account", "closing a savings account"),
    ),
    output_format_instruction="Return one rewritten query per line and nothing else.",
)

KEYWORD_PROMPT = PromptTemplate(
    role_instruction="You extract ranked keywords from documents.",
    constraints=(
        "Choose the 3 keywords that best represent the document, ordered "
        "from most to least important. Each keyword must occur in the "
        "document. Do not reuse the query."
    ),
    few_shot_examples=(
        ("a walkthrough for growing tomatoes on a balcony", "tomatoes>balcony>walkthrough"),
    ),
    output_format_instruction=(
        "Return exactly three keywords on one line, joined by '>', like kw1>kw2>kw3."
    ),
)
