"""Acceptance suite: one test per shipping criterion.

Every test prints a `[PASS]`/`[FAIL]` line naming its criterion (visible
under `pytest -s`), so a run of this module doubles as a checklist.
"""

from __future__ import annotations

import json
import random
import time
from collections import Counter
from contextlib import contextmanager

from conftest import write_jsonl
from relevkit.augment import AugmentConfig, augment_dataset
from relevkit.cli import main as cli_main
from relevkit.corpus import LabeledPair, RelevanceLabel
from relevkit.metrics import (
    GsbCounts,
    ScoredPrediction,
    delta_gsb,
    multiclass_auc,
    multiclass_auc_reference,
)
from relevkit.providers import mock_provider
from relevkit.scorer import (
    SyntheticSpec,
    run_experiment,
    score_query_focused_only,
    score_summary_parts,
)
from relevkit.summarizer import SummaryBudget, mix_summary
from relevkit.textseg import segment, token_count, tokenize

S, W, I = RelevanceLabel.STRONG, RelevanceLabel.WEAK, RelevanceLabel.IRRELEVANT


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def test_auc_fast_path_matches_brute_force_oracle():
    rng = random.Random(20260818)
    labels = (S, W, I)

    def instance(n):
        chosen = [rng.choice(labels) for _ in range(n)]
        if len(set(chosen)) < 2:
            chosen[0], chosen[1] = S, I
        scores = [
            rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) if rng.random() < 0.5 else rng.random()
            for _ in range(n)
        ]
        return [ScoredPrediction(label, score) for label, score in zip(chosen, scores)]

    sizes = [rng.randint(2, 60) for _ in range(180)] + [rng.randint(200, 500) for _ in range(19)]
    sizes.append(500)
    with criterion(
        "fast AUC equals the quadratic oracle within 1e-12 on 200 random instances in under 10s"
    ):
        started = time.perf_counter()
        worst = 0.0
        for n in sizes:
            data = instance(n)
            worst = max(worst, abs(multiclass_auc(data) - multiclass_auc_reference(data)))
        elapsed = time.perf_counter() - started
        assert len(sizes) == 200
        assert worst <= 1e-12, f"max divergence {worst}"
        assert elapsed < 10.0, f"took {elapsed:.1f}s"


def test_auc_fidelity_cases():
    with criterion("AUC fidelity: perfect order 1.0, one swap 2/3, all ties 0.0"):
        perfect = [ScoredPrediction(S, 0.9), ScoredPrediction(W, 0.5), ScoredPrediction(I, 0.1)]
        assert multiclass_auc(perfect) == 1.0
        swapped = [ScoredPrediction(S, 0.9), ScoredPrediction(W, 0.95), ScoredPrediction(I, 0.1)]
        assert multiclass_auc(swapped) == 2 / 3
        tied = [ScoredPrediction(S, 0.5), ScoredPrediction(W, 0.5), ScoredPrediction(I, 0.5)]
        assert multiclass_auc(tied) == 0.0


def test_summary_budget_invariants_hold_over_random_triples():
    rng = random.Random(4057)
    latin = [
        "park", "sakura", "beef", "hot", "pot", "river", "walk", "tea", "shop",
        "light", "noise", "garden", "stone", "market", "rain", "cloud", "ferry",
    ]
    cjk = list("樱花公园狗猫北京春天美丽游客小吃")
    terminators = [". ", "! ", "? ", "。", "！", "？", "… ", "；"]

    def random_sentence():
        words = []
        for _ in range(rng.randint(1, 9)):
            if rng.random() < 0.3:
                words.append("".join(rng.choice(cjk) for _ in range(rng.randint(1, 3))))
            else:
                words.append(rng.choice(latin))
        return " ".join(words) + rng.choice(terminators)

    def random_document():
        paragraphs = []
        for _ in range(rng.randint(1, 4)):
            paragraphs.append(
                " ".join(random_sentence() for _ in range(rng.randint(1, 6))).strip()
            )
        return "\n\n".join(paragraphs)

    def random_query():
        pool = latin + cjk + ["zebra", "quantum", "玻璃"]
        return " ".join(rng.choice(pool) for _ in range(rng.randint(1, 4)))

    with criterion(
        "1,000 random (query, document, budget) triples keep both parts on budget "
        "and fully extractive in under 30s"
    ):
        started = time.perf_counter()
        for _ in range(1000):
            qf_max = rng.randint(1, 40)
            doc_max = rng.randint(1, 25)
            budget = SummaryBudget(
                query_focused_max=qf_max,
                doc_summary_max=doc_max,
                total_max=qf_max + doc_max + rng.randint(0, 10),
            )
            document = random_document()
            mix = mix_summary(random_query(), document, budget)
            assert token_count(mix.query_focused) <= qf_max
            assert token_count(mix.doc_summary) <= doc_max
            seg = segment(document)
            if mix.selected_sentence_indices:
                joined = " ".join(
                    seg.sentences[i].text for i in mix.selected_sentence_indices
                )
                assert joined.startswith(mix.query_focused)
                for i in mix.selected_sentence_indices:
                    assert seg.sentences[i].text in document
            else:
                assert mix.query_focused == ""
            leads = [i for group in seg.paragraphs for i in group[:3]]
            lead_join = " ".join(seg.sentences[i].text for i in leads)
            assert lead_join.startswith(mix.doc_summary)
        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_mix_scorer_separates_strong_from_weak_documents():
    query = "lantern festival"
    mostly_about = (
        "The lantern festival fills the old town every February. Lantern "
        "makers work for weeks ahead of the festival. Crowds follow the "
        "lantern parade along the canal. Food stalls stay open until the "
        "last lantern goes dark."
    )
    single_mention = (
        "The old town guide covers four walking routes. Each route starts "
        "at the clock tower. Cafes along the canal open early. Maps are "
        "free at the kiosk. The lantern festival closes the longest route "
        "each February."
    )
    with criterion(
        "query-focused-only scoring calls both documents strong; mix scoring "
        "separates them into strong and weak"
    ):
        labels = {}
        for name, document in (("dense", mostly_about), ("sparse", single_mention)):
            mix = mix_summary(query, document)
            qf_label, _ = score_query_focused_only(query, mix.query_focused)
            mix_label, _ = score_summary_parts(query, mix.query_focused, mix.doc_summary)
            labels[name] = (qf_label, mix_label)
        assert labels["dense"][0] is S
        assert labels["sparse"][0] is S
        assert labels["dense"][1] is S
        assert labels["sparse"][1] is W


def test_experiment_ordering_claim():
    spec = SyntheticSpec(n_docs=300, seed=7)
    with criterion(
        "experiment with 300 docs at seed 7: auc_mix beats auc_qf_only by at "
        "least 0.05, deterministically, in under 60s"
    ):
        started = time.perf_counter()
        first = run_experiment(spec)
        second = run_experiment(spec)
        elapsed = time.perf_counter() - started
        assert first.auc_mix - first.auc_qf_only >= 0.05, (
            f"gap {first.auc_mix - first.auc_qf_only:.4f}"
        )
        assert first.to_dict() == second.to_dict()
        assert elapsed < 60.0, f"took {elapsed:.1f}s"


def _random_sources(count, seed):
    rng = random.Random(seed)
    pool = [
        "ferry", "harbor", "museum", "garden", "bridge", "market", "temple",
        "castle", "lantern", "festival", "noodle", "orchard", "stadium",
        "library", "canal", "plaza", "fountain", "tunnel", "archive", "bakery",
    ]
    labels = (S, W, I)
    sources = []
    for i in range(count):
        query = " ".join(rng.sample(pool, rng.randint(1, 3)))
        sentences = [
            " ".join(rng.sample(pool, rng.randint(3, 6))) + "."
            for _ in range(rng.randint(3, 8))
        ]
        sources.append(
            LabeledPair(
                id=f"rand-{i:04d}",
                query=query,
                document=" ".join(sentences),
                label=labels[i % 3],
            )
        )
    return sources


def test_augmentation_label_invariants_over_random_sources():
    sources = _random_sources(500, seed=606)
    config = AugmentConfig(synonym_rate=1.0, antonym_rate=1.0, generation_rate=1.0)
    with criterion(
        "500 random sources through the mock provider: every synonym keeps its "
        "source label, every antonym is irrelevant, every keyword rank maps to "
        "its class; zero violations"
    ):
        result = augment_dataset(sources, mock_provider(2), config)
        by_id = {pair.id: pair for pair in sources}
        assert result.samples, "augmentation produced no samples"
        violations = 0
        for sample in result.samples:
            source = by_id[sample.source_id]
            kind = sample.provenance.kind
            if kind == "synonym_rewrite":
                violations += sample.pair.label is not source.label
            elif kind == "antonym_rewrite":
                violations += sample.pair.label is not I
            elif sample.provenance.rank == 1:
                violations += sample.pair.label is not S
            else:
                violations += sample.pair.label is not W
        assert violations == 0


def _skewed_fixture():
    rng = random.Random(11)
    pool = [
        "ferry", "harbor", "museum", "garden", "bridge", "market", "temple", "castle",
        "lantern", "festival", "noodle", "orchard", "stadium", "library", "canal", "plaza",
    ]
    labels = [S] * 144 + [W] * 28 + [I] * 28
    pairs = []
    for i, label in enumerate(labels):
        query = " ".join(rng.sample(pool, 2))
        sentences = [" ".join(rng.sample(pool, 4)) + "." for _ in range(6)]
        pairs.append(
            LabeledPair(id=f"skew-{i:03d}", query=query, document=" ".join(sentences), label=label)
        )
    return pairs


def test_augmentation_rebalances_a_skewed_corpus():
    sources = _skewed_fixture()
    with criterion(
        "default augmentation of a 72/14/14 skewed corpus strictly grows the "
        "weak and irrelevant classes and the total by a factor in [2, 4]"
    ):
        before = Counter(pair.label for pair in sources)
        assert (before[S], before[W], before[I]) == (144, 28, 28)
        result = augment_dataset(sources, mock_provider(0), AugmentConfig())
        after = before + Counter(sample.pair.label for sample in result.samples)
        assert after[W] > before[W]
        assert after[I] > before[I]
        factor = (len(sources) + len(result.samples)) / len(sources)
        assert 2.0 <= factor <= 4.0, f"growth factor {factor:.3f}"


def test_delta_gsb_spot_checks():
    with criterion("net GSB margins: (20, 70, 10) is 0.10, all-good 1.0, symmetric 0.0"):
        assert delta_gsb(GsbCounts(good=20, same=70, bad=10)) == (20 - 10) / 100
        assert delta_gsb(GsbCounts(good=9, same=0, bad=0)) == 1.0
        assert delta_gsb(GsbCounts(good=4, same=0, bad=4)) == 0.0


def test_every_subcommand_is_deterministic(tmp_path, capsys):
    dataset = write_jsonl(
        tmp_path / "train.jsonl",
        [
            {
                "id": "a",
                "query": "boat tours",
                "document": (
                    "Boat tours leave hourly from the pier. Each boat seats twelve. "
                    "Tours pause during storms.\n\nTickets are sold at the kiosk."
                ),
                "label": "strong",
            },
            {
                "id": "b",
                "query": "harbor lights",
                "document": (
                    "The walking route follows the shore. Benches face the water. "
                    "At dusk the harbor lights come on one by one."
                ),
                "label": "weak",
            },
            {
                "id": "c",
                "query": "mountain trails",
                "document": "The bakery opens at six. Bread sells out fast.",
                "label": "irrelevant",
            },
        ],
    )

    def run(*argv):
        code = cli_main(list(argv))
        assert code == 0, f"exit {code} from {argv}"
        return capsys.readouterr().out

    def summarize(tag):
        out = tmp_path / f"sum-{tag}.jsonl"
        stdout = run("summarize", "--input", str(dataset), "--output", str(out))
        return stdout.replace(str(out), "OUT"), out.read_bytes()

    def augment(tag):
        out = tmp_path / f"aug-{tag}.jsonl"
        stdout = run("augment", "--input", str(dataset), "--output", str(out), "--seed", "5")
        return stdout.replace(str(out), "OUT"), out.read_bytes()

    def evaluate(tag):
        predictions = tmp_path / "sum-one.jsonl"
        return (run("evaluate", "--predictions", str(predictions)),)

    def gsb(tag):
        return (run("gsb", "--good", "20", "--same", "70", "--bad", "10"),)

    def stats(tag):
        return (run("stats", "--input", str(dataset)),)

    def experiment(tag):
        figures = tmp_path / f"figs-{tag}"
        stdout = run(
            "experiment", "--n-docs", "30", "--seed", "7", "--figures", str(figures)
        )
        images = tuple(path.read_bytes() for path in sorted(figures.glob("*.png")))
        assert len(images) == 3
        return (stdout, images)

    subcommands = [
        ("summarize", summarize),
        ("augment", augment),
        ("evaluate", evaluate),
        ("gsb", gsb),
        ("stats", stats),
        ("experiment", experiment),
    ]
    with criterion(
        "all six subcommands re-run with identical inputs and seeds produce "
        "byte-identical stdout and output files"
    ):
        for name, command in subcommands:
            assert command("one") == command("two"), f"{name} diverged between runs"
