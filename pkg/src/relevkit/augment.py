"""LLM-backed training-data augmentation: query rewrites and keyword queries.

Three ops produce new labeled pairs from an existing one:

* synonym rewrites keep the source label;
* antonym rewrites of a relevant query are labeled irrelevant;
* keyword generation asks for three document keywords ranked by
  importance and emits the top one as strong and the last one as weak.
  The middle keyword is parsed but never becomes a sample, and any
  keyword whose token sequence does not occur in the document is
  dropped.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .corpus import LabeledPair, RelevanceLabel
from .parallel import imap_ordered
from .prompts import ANTONYM_PROMPT, KEYWORD_PROMPT, SYNONYM_PROMPT, PromptTemplate
from .providers import (
    CompletionParseError,
    LlmProvider,
    ProviderError,
    RetryPolicy,
    TokenBucket,
    mock_provider,
)
from .textseg import tokenize

__all__ = [
    "AugmentConfig",
    "AugmentFailure",
    "AugmentResult",
    "AugmentationAborted",
    "AugmentedSample",
    "LlmProvider",
    "PromptTemplate",
    "Provenance",
    "augment_dataset",
    "generate_queries",
    "mock_provider",
    "rewrite_antonym",
    "rewrite_synonym",
]

logger = logging.getLogger(__name__)

SYNONYM_REWRITE = "synonym_rewrite"
ANTONYM_REWRITE = "antonym_rewrite"
KEYWORD_GENERATION = "keyword_generation"

OP_SYNONYM = "syn"
OP_ANTONYM = "ant"
OP_GENERATE = "gen"
ALL_OPS = (OP_SYNONYM, OP_ANTONYM, OP_GENERATE)

_RANK_LABELS = {1: RelevanceLabel.STRONG, 3: RelevanceLabel.WEAK}

# Progressive abort needs a few calls of evidence before a failure rate
# means anything.
_MIN_CALLS_FOR_ABORT = 10


@dataclass(frozen=True)
class Provenance:
    """How a sample was produced; keyword generation also records the rank."""

    kind: str
    rank: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in (SYNONYM_REWRITE, ANTONYM_REWRITE, KEYWORD_GENERATION):
            raise ValueError(f"unknown provenance kind: {self.kind!r}")
        if self.kind == KEYWORD_GENERATION:
            if self.rank not in (1, 2, 3):
                raise ValueError("keyword generation rank must be 1, 2, or 3")
        elif self.rank is not None:
            raise ValueError("rank only applies to keyword generation")

    @property
    def tag(self) -> str:
        return self.kind if self.rank is None else f"{self.kind}:{self.rank}"


@dataclass(frozen=True)
class AugmentedSample:
    """A generated pair, its provenance, and the id of the pair it came from."""

    pair: LabeledPair
    provenance: Provenance
    source_id: str

    def __post_init__(self) -> None:
        if self.provenance.kind == ANTONYM_REWRITE and self.pair.label is not RelevanceLabel.IRRELEVANT:
            raise ValueError("antonym rewrites must be labeled irrelevant")
        if self.provenance.kind == KEYWORD_GENERATION:
            expected = _RANK_LABELS.get(self.provenance.rank)
            if expected is None:
                raise ValueError("rank-2 keywords never become samples")
            if self.pair.label is not expected:
                raise ValueError(
                    f"rank-{self.provenance.rank} keyword samples must be labeled {expected.value}"
                )


class AugmentationAborted(RuntimeError):
    """Provider failures exceeded the configured tolerance."""


@dataclass(frozen=True)
class AugmentFailure:
    source_id: str
    op: str
    error: str


@dataclass
class AugmentResult:
    samples: list[AugmentedSample]
    failures: list[AugmentFailure]
    provider_calls: int

    @property
    def failure_rate(self) -> float:
        return len(self.failures) / self.provider_calls if self.provider_calls else 0.0


@dataclass(frozen=True)
class AugmentConfig:
    """Which ops run, how often, and under what limits.

    The per-op rates gate each op per source through a hash of
    (seed, source id, op), so a given seed reproduces exactly the same
    subset no matter how the run is parallelized. The default rates are
    calibrated to roughly the 2.7x corpus growth the augmentation recipe
    is meant to deliver on skewed relevance data.
    """

    ops: tuple[str, ...] = ALL_OPS
    synonym_rate: float = 0.4
    antonym_rate: float = 0.7
    generation_rate: float = 0.4
    max_synonyms: int = 3
    max_antonyms: int = 1
    seed: int = 0
    max_inflight: int = 4
    rate_limit_per_s: float | None = None
    max_failure_rate: float = 0.2

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        unknown = set(self.ops) - set(ALL_OPS)
        if unknown:
            raise ValueError(f"unknown ops: {sorted(unknown)} (choose from {', '.join(ALL_OPS)})")
        for name in ("synonym_rate", "antonym_rate", "generation_rate", "max_failure_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be within [0, 1]")
        if self.max_synonyms < 1 or self.max_antonyms < 1:
            raise ValueError("per-source candidate caps must be at least 1")
        if self.max_inflight < 1:
            raise ValueError("max_inflight must be at least 1")
        if self.rate_limit_per_s is not None and self.rate_limit_per_s <= 0:
            raise ValueError("rate_limit_per_s must be positive")


def _complete(llm: LlmProvider, prompt: str, retry: RetryPolicy | None) -> str:
    policy = retry if retry is not None else RetryPolicy()
    return policy.run(lambda: llm.complete(prompt))


def _parse_rewrites(completion: str) -> list[str]:
    # An empty completion is a valid "no candidates" answer, not a
    # malformed one; rewrite ops simply produce nothing from it.
    return [line.strip() for line in completion.splitlines() if line.strip()]


def _parse_keywords(completion: str) -> list[str]:
    lines = [line.strip() for line in completion.splitlines() if line.strip()]
    if len(lines) != 1:
        raise CompletionParseError("expected one kw1>kw2>kw3 line", completion)
    keywords = [part.strip() for part in lines[0].split(">")]
    if len(keywords) != 3 or not all(keywords):
        raise CompletionParseError("expected exactly 3 ranked keywords", completion)
    return keywords


def _rewrite_samples(
    source: LabeledPair,
    completion: str,
    label: RelevanceLabel,
    kind: str,
    id_tag: str,
    max_candidates: int | None,
) -> list[AugmentedSample]:
    samples: list[AugmentedSample] = []
    seen: set[str] = set()
    for candidate in _parse_rewrites(completion):
        folded = candidate.casefold()
        if folded == source.query.casefold() or folded in seen:
            continue
        seen.add(folded)
        pair = LabeledPair(
            id=f"{source.id}:{id_tag}{len(samples) + 1}",
            query=candidate,
            document=source.document,
            label=label,
        )
        samples.append(AugmentedSample(pair=pair, provenance=Provenance(kind), source_id=source.id))
        if max_candidates is not None and len(samples) >= max_candidates:
            break
    return samples


def rewrite_synonym(
    source: LabeledPair,
    llm: LlmProvider,
    *,
    max_candidates: int | None = None,
    retry: RetryPolicy | None = None,
) -> list[AugmentedSample]:
    """Reword the query without changing its meaning; the label carries over.

    The completion holds one candidate per line. Candidates equal to the
    source query after case folding are dropped, as are duplicates
    within the batch.
    """
    completion = _complete(llm, SYNONYM_PROMPT.render(query=source.query), retry)
    return _rewrite_samples(source, completion, source.label, SYNONYM_REWRITE, "syn", max_candidates)


def rewrite_antonym(
    source: LabeledPair,
    llm: LlmProvider,
    *,
    max_candidates: int | None = None,
    retry: RetryPolicy | None = None,
) -> list[AugmentedSample]:
    """Invert the query's intent; every candidate is labeled irrelevant.

    Only strong or weak sources qualify: an inverted query is a
    near-miss for a document the original query actually matched.
    """
    if source.label is RelevanceLabel.IRRELEVANT:
        raise ValueError("antonym rewriting requires relevant source")
    completion = _complete(llm, ANTONYM_PROMPT.render(query=source.query), retry)
    return _rewrite_samples(
        source, completion, RelevanceLabel.IRRELEVANT, ANTONYM_REWRITE, "ant", max_candidates
    )


def _contains_token_sequence(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    target = list(needle)
    width = len(target)
    return any(list(haystack[i:i + width]) == target for i in range(len(haystack) - width + 1))


def generate_queries(
    source: LabeledPair,
    llm: LlmProvider,
    *,
    retry: RetryPolicy | None = None,
) -> list[AugmentedSample]:
    """Mint fresh queries from the document's three ranked keywords.

    The most important keyword becomes a strong pair and the least
    important a weak one; the middle rank is never emitted. A keyword is
    discarded when its normalized token sequence is absent from the
    document, since a query the document cannot answer would be
    mislabeled.
    """
    if source.label is RelevanceLabel.IRRELEVANT:
        raise ValueError("keyword generation requires relevant source")
    completion = _complete(llm, KEYWORD_PROMPT.render(query=source.query, document=source.document), retry)
    keywords = _parse_keywords(completion)
    doc_tokens = [t.normalized for t in tokenize(source.document)]
    samples: list[AugmentedSample] = []
    for rank in (1, 3):
        keyword = keywords[rank - 1]
        if not _contains_token_sequence(doc_tokens, [t.normalized for t in tokenize(keyword)]):
            continue
        pair = LabeledPair(
            id=f"{source.id}:gen{rank}",
            query=keyword,
            document=source.document,
            label=_RANK_LABELS[rank],
        )
        samples.append(
            AugmentedSample(pair=pair, provenance=Provenance(KEYWORD_GENERATION, rank), source_id=source.id)
        )
    return samples


def _gate(seed: int, source_id: str, op: str) -> float:
    """Uniform [0, 1) value fixed by (seed, source id, op)."""
    digest = hashlib.sha256(f"{seed}\x1f{source_id}\x1f{op}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def augment_dataset(
    dataset: Iterable[LabeledPair],
    llm: LlmProvider,
    config: AugmentConfig | None = None,
    *,
    retry: RetryPolicy | None = None,
) -> AugmentResult:
    """Run the enabled ops over a dataset and collect the generated samples.

    Sources stream through a bounded worker pool (provider calls may run
    concurrently, optionally rate limited). Antonym and keyword ops only
    apply to strong/weak sources. Samples are deduplicated on the
    case-folded query per source, then sorted by (source id, provenance
    tag, query) so the result is stable regardless of scheduling.

    Provider and parse failures are collected per call rather than
    raised; the run aborts with AugmentationAborted when their rate
    exceeds ``config.max_failure_rate``.
    """
    config = config or AugmentConfig()
    policy = retry if retry is not None else RetryPolicy()
    bucket = TokenBucket(config.rate_limit_per_s) if config.rate_limit_per_s else None

    def plan_ops(source: LabeledPair) -> list[tuple[str, Callable[[], list[AugmentedSample]]]]:
        relevant = source.label is not RelevanceLabel.IRRELEVANT
        plan: list[tuple[str, Callable[[], list[AugmentedSample]]]] = []
        if OP_SYNONYM in config.ops and _gate(config.seed, source.id, OP_SYNONYM) < config.synonym_rate:
            plan.append(
                (OP_SYNONYM,
                 lambda: rewrite_synonym(source, llm, max_candidates=config.max_synonyms, retry=policy))
            )
        if OP_ANTONYM in config.ops and relevant and _gate(config.seed, source.id, OP_ANTONYM) < config.antonym_rate:
            plan.append(
                (OP_ANTONYM,
                 lambda: rewrite_antonym(source, llm, max_candidates=config.max_antonyms, retry=policy))
            )
        if OP_GENERATE in config.ops and relevant and _gate(config.seed, source.id, OP_GENERATE) < config.generation_rate:
            plan.append((OP_GENERATE, lambda: generate_queries(source, llm, retry=policy)))
        return plan

    def process(source: LabeledPair) -> tuple[list[AugmentedSample], list[AugmentFailure], int]:
        samples: list[AugmentedSample] = []
        failures: list[AugmentFailure] = []
        calls = 0
        for op, call in plan_ops(source):
            if bucket is not None:
                bucket.acquire()
            calls += 1
            try:
                samples.extend(call())
            except (ProviderError, CompletionParseError) as exc:
                logger.warning("augmentation op %s failed for %s: %s", op, source.id, exc)
                failures.append(AugmentFailure(source_id=source.id, op=op, error=str(exc)))
        return samples, failures, calls

    all_samples: list[AugmentedSample] = []
    all_failures: list[AugmentFailure] = []
    total_calls = 0
    seen: set[tuple[str, str]] = set()
    for samples, failures, calls in imap_ordered(process, dataset, config.max_inflight):
        total_calls += calls
        all_failures.extend(failures)
        for sample in samples:
            key = (sample.pair.query.casefold(), sample.source_id)
            if key in seen:
                continue
            seen.add(key)
            all_samples.append(sample)
        if total_calls >= _MIN_CALLS_FOR_ABORT and len(all_failures) / total_calls > config.max_failure_rate:
            raise AugmentationAborted(
                f"aborted: {len(all_failures)} of {total_calls} provider calls failed "
                f"(tolerance {config.max_failure_rate:.0%})"
            )
    if total_calls and len(all_failures) / total_calls > config.max_failure_rate:
        raise AugmentationAborted(
            f"{len(all_failures)} of {total_calls} provider calls failed "
            f"(tolerance {config.max_failure_rate:.0%})"
        )
    all_samples.sort(key=lambda s: (s.source_id, s.provenance.tag, s.pair.query))
    return AugmentResult(samples=all_samples, failures=all_failures, provider_calls=total_calls)
