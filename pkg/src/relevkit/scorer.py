"""Heuristic relevance scoring over mix summaries, plus a synthetic benchmark.

The scorer reads two signals off a summary: how much of the query the
query-focused part covers, and how densely the document-summary
sentences mention query terms. The query-focused-only variant drops the
second signal, which removes its ability to tell strong from weak; the
synthetic experiment makes that difference measurable.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .corpus import LabeledPair, RelevanceLabel, stats
from .metrics import ScoredPrediction, multiclass_auc
from .summarizer import MixSummary, SummaryBudget, mix_summary
from .textseg import segment, tokenize

# A pair whose query-focused part covers less than this fraction of the
# query looks unanswered; at or above it, summary density decides
# between strong and weak.
IRRELEVANT_COVERAGE_THRESHOLD = 0.34
STRONG_DENSITY_THRESHOLD = 0.5

CLASS_ORDER = ("strong", "weak", "irrelevant")


@dataclass(frozen=True)
class ScorerFeatures:
    """qf_coverage: query tokens covered by the query-focused part.
    doc_density: document-summary sentences containing a query token."""

    qf_coverage: float
    doc_density: float


def _query_token_set(query: str) -> set[str]:
    return {token.normalized for token in tokenize(query)}


def _features(query_tokens: set[str], query_focused: str, doc_summary: str) -> ScorerFeatures:
    if not query_tokens:
        return ScorerFeatures(0.0, 0.0)
    coverage = 0.0
    if query_focused.strip():
        covered = {t.normalized for t in tokenize(query_focused)}
        coverage = len(query_tokens & covered) / len(query_tokens)
    density = 0.0
    if doc_summary.strip():
        sentences = segment(doc_summary).sentences
        if sentences:
            hits = sum(
                1 for sentence in sentences
                if query_tokens & {t.normalized for t in sentence.tokens}
            )
            density = hits / len(sentences)
    return ScorerFeatures(qf_coverage=coverage, doc_density=density)


def _classify(coverage: float, density: float) -> RelevanceLabel:
    if coverage < IRRELEVANT_COVERAGE_THRESHOLD:
        return RelevanceLabel.IRRELEVANT
    if density >= STRONG_DENSITY_THRESHOLD:
        return RelevanceLabel.STRONG
    return RelevanceLabel.WEAK


def compute_features(query: str, mix: MixSummary) -> ScorerFeatures:
    return _features(_query_token_set(query), mix.query_focused, mix.doc_summary)


def score(query: str, mix: MixSummary) -> tuple[RelevanceLabel, float]:
    """Label a pair from its mix summary; also returns a score in [0, 1]."""
    features = compute_features(query, mix)
    label = _classify(features.qf_coverage, features.doc_density)
    return label, 0.5 * features.qf_coverage + 0.5 * features.doc_density


def score_summary_parts(query: str, query_focused: str, doc_summary: str) -> tuple[RelevanceLabel, float]:
    """Score from bare summary fields, as emitted by the summarize pipeline."""
    features = _features(_query_token_set(query), query_focused, doc_summary)
    label = _classify(features.qf_coverage, features.doc_density)
    return label, 0.5 * features.qf_coverage + 0.5 * features.doc_density


def score_query_focused_only(query: str, query_focused: str) -> tuple[RelevanceLabel, float]:
    """Score from the query-focused part alone.

    With no document summary to measure density against, density is
    taken as 1.0 once coverage clears the floor. As a consequence this
    variant never outputs weak: anything that looks answered at all
    looks strong.
    """
    query_tokens = _query_token_set(query)
    coverage = 0.0
    if query_tokens and query_focused.strip():
        covered = {t.normalized for t in tokenize(query_focused)}
        coverage = len(query_tokens & covered) / len(query_tokens)
    density = 1.0 if coverage >= IRRELEVANT_COVERAGE_THRESHOLD else 0.0
    label = _classify(coverage, density)
    return label, 0.5 * coverage + 0.5 * density


# Filler words for synthetic sentences. Anything colliding with the
# query vocabulary is filtered out at build time so irrelevant documents
# can never contain their query by accident.
_FILLER_WORDS = (
    "stone", "window", "ticket", "morning", "crowd", "bridge", "street",
    "vendor", "signal", "paper", "bottle", "corner", "season", "silver",
    "shadow", "thread", "cloud", "engine", "letter", "harvest", "pocket",
    "tunnel", "branch", "candle", "ribbon", "saddle", "copper", "meadow",
    "timber", "anchor",
)

_DEFAULT_QUERY_VOCABULARY = (
    "sakura", "hotpot", "museum", "harbor", "shrine", "noodle", "garden",
    "skyline", "lantern", "bamboo", "opera", "canal", "pagoda", "teahouse",
    "ferry",
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a three-class synthetic corpus.

    Strong documents mention their query in a high fraction of
    sentences, weak documents in a low but positive fraction, and
    irrelevant documents never do. The bands are fractions of
    ``sentences_per_doc`` and must not overlap.
    """

    n_docs: int = 300
    sentences_per_doc: int = 10
    strong_band: tuple[float, float] = (0.6, 0.9)
    weak_band: tuple[float, float] = (0.1, 0.3)
    vocabulary: tuple[str, ...] = _DEFAULT_QUERY_VOCABULARY
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "vocabulary", tuple(self.vocabulary))
        object.__setattr__(self, "strong_band", tuple(self.strong_band))
        object.__setattr__(self, "weak_band", tuple(self.weak_band))
        if self.n_docs < 3:
            raise ValueError("n_docs must be at least 3 to cover all classes")
        if self.sentences_per_doc < 2:
            raise ValueError("sentences_per_doc must be at least 2")
        for name, band in (("strong_band", self.strong_band), ("weak_band", self.weak_band)):
            if len(band) != 2 or not 0.0 <= band[0] <= band[1] <= 1.0:
                raise ValueError(f"{name} must be an ascending pair of fractions in [0, 1]")
        if not self.weak_band[0] > 0.0:
            raise ValueError("weak_band must be strictly positive")
        if not self.strong_band[0] > self.weak_band[1]:
            raise ValueError("strong_band must sit strictly above weak_band")
        if not self.vocabulary:
            raise ValueError("vocabulary must not be empty")
        for band in (self.strong_band, self.weak_band):
            lo = math.ceil(band[0] * self.sentences_per_doc)
            hi = math.floor(band[1] * self.sentences_per_doc)
            if lo > hi:
                raise ValueError(
                    f"band {band} admits no whole sentence count out of {self.sentences_per_doc}"
                )


def _hit_count(rng: random.Random, label: RelevanceLabel, spec: SyntheticSpec) -> int:
    if label is RelevanceLabel.IRRELEVANT:
        return 0
    band = spec.strong_band if label is RelevanceLabel.STRONG else spec.weak_band
    lo = math.ceil(band[0] * spec.sentences_per_doc)
    hi = math.floor(band[1] * spec.sentences_per_doc)
    return rng.randint(max(lo, 1), hi)


def synthesize_corpus(spec: SyntheticSpec | None = None) -> list[LabeledPair]:
    """Generate labeled pairs whose query-hit rate is controlled per class.

    Classes cycle strong, weak, irrelevant, so 300 documents split
    100/100/100. Documents are two paragraphs of short filler sentences;
    relevant ones embed the query token verbatim in a class-banded
    number of sentences at random positions. Deterministic per seed.
    """
    spec = spec or SyntheticSpec()
    rng = random.Random(spec.seed)
    vocabulary = set(spec.vocabulary)
    filler = [word for word in _FILLER_WORDS if word not in vocabulary]
    if len(filler) < 8:
        raise ValueError("vocabulary overlaps too much of the filler word pool")
    cycle = (RelevanceLabel.STRONG, RelevanceLabel.WEAK, RelevanceLabel.IRRELEVANT)
    pairs: list[LabeledPair] = []
    for i in range(spec.n_docs):
        label = cycle[i % 3]
        query = rng.choice(spec.vocabulary)
        hits = _hit_count(rng, label, spec)
        hit_positions = set(rng.sample(range(spec.sentences_per_doc), hits))
        sentences: list[str] = []
        for position in range(spec.sentences_per_doc):
            words = rng.sample(filler, k=rng.randint(3, 6))
            if position in hit_positions:
                words.insert(rng.randrange(len(words) + 1), query)
            sentences.append(" ".join(words) + ".")
        half = (spec.sentences_per_doc + 1) // 2
        document = " ".join(sentences[:half])
        if spec.sentences_per_doc > half:
            document += "\n\n" + " ".join(sentences[half:])
        pairs.append(LabeledPair(id=f"synth-{i:04d}", query=query, document=document, label=label))
    return pairs


def _empty_confusion() -> dict[str, dict[str, int]]:
    return {reference: {predicted: 0 for predicted in CLASS_ORDER} for reference in CLASS_ORDER}


@dataclass(frozen=True)
class ExperimentReport:
    """Side-by-side result of mix scoring versus query-focused-only scoring."""

    n_docs: int
    seed: int
    class_counts: dict[str, int]
    auc_mix: float
    auc_qf_only: float
    auc_gap: float
    confusion_mix: dict[str, dict[str, int]]
    confusion_qf_only: dict[str, dict[str, int]]
    budget: dict[str, int | str]

    def to_dict(self) -> dict:
        return {
            "n_docs": self.n_docs,
            "seed": self.seed,
            "class_counts": self.class_counts,
            "auc_mix": self.auc_mix,
            "auc_qf_only": self.auc_qf_only,
            "auc_gap": self.auc_gap,
            "confusion_mix": self.confusion_mix,
            "confusion_qf_only": self.confusion_qf_only,
            "budget": self.budget,
        }


def run_experiment(
    spec: SyntheticSpec | None = None, budget: SummaryBudget | None = None
) -> ExperimentReport:
    """Score a synthetic corpus both ways and report AUCs and confusions.

    Every pair is summarized once; the mix scorer sees both summary
    parts while the query-focused-only scorer sees just the first. The
    report is a pure function of (spec, budget).
    """
    spec = spec or SyntheticSpec()
    budget = budget or SummaryBudget()
    pairs = synthesize_corpus(spec)
    mix_predictions: list[ScoredPrediction] = []
    qf_predictions: list[ScoredPrediction] = []
    confusion_mix = _empty_confusion()
    confusion_qf = _empty_confusion()
    for pair in pairs:
        summary = mix_summary(pair.query, pair.document, budget)
        mix_label, mix_score = score(pair.query, summary)
        qf_label, qf_score = score_query_focused_only(pair.query, summary.query_focused)
        mix_predictions.append(ScoredPrediction(pair.label, mix_score))
        qf_predictions.append(ScoredPrediction(pair.label, qf_score))
        confusion_mix[pair.label.value][mix_label.value] += 1
        confusion_qf[pair.label.value][qf_label.value] += 1
    auc_mix = multiclass_auc(mix_predictions)
    auc_qf = multiclass_auc(qf_predictions)
    counts = stats(pairs)
    return ExperimentReport(
        n_docs=spec.n_docs,
        seed=spec.seed,
        class_counts={
            "strong": counts.strong,
            "weak": counts.weak,
            "irrelevant": counts.irrelevant,
        },
        auc_mix=auc_mix,
        auc_qf_only=auc_qf,
        auc_gap=auc_mix - auc_qf,
        confusion_mix=confusion_mix,
        confusion_qf_only=confusion_qf,
        budget={
            "query_focused_max": budget.query_focused_max,
            "doc_summary_max": budget.doc_summary_max,
            "total_max": budget.total_max,
            "separator": budget.separator,
        },
    )
