"""Command line entry point.

Subcommands: summarize, augment, evaluate, gsb, stats, experiment.
Results go to standard output as JSON; logs and diagnostics go to
standard error. Exit codes: 0 success, 1 usage error, 2 data error,
3 provider error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence

from . import SCHEMA_VERSION, __version__
from .augment import ALL_OPS, AugmentConfig, AugmentationAborted, augment_dataset, mock_provider
from .corpus import DatasetError, RelevanceLabel, iter_dataset, pair_to_record, stats
from .metrics import GsbCounts, ScoredPrediction, delta_gsb, multiclass_auc
from .parallel import imap_ordered
from .providers import CompletionParseError, HttpProvider, LlmProvider, ProviderError
from .scorer import SyntheticSpec, run_experiment, score_summary_parts
from .summarizer import SummaryBudget, mix_summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3

_PROVIDERS = ("mock", "http")


class CliUsageError(Exception):
    """Bad flags or configuration, reported with exit code 1."""


@dataclass
class PipelineConfig:
    """Resolved settings shared by the subcommands.

    Values come from built-in defaults, then an optional JSON config
    file, then command line flags, later sources winning. The JSON shape
    matches what --print-config emits.
    """

    budget: SummaryBudget = field(default_factory=SummaryBudget)
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    provider: str = "mock"
    model: str = "gpt-3.5-turbo"
    timeout_s: float = 30.0
    workers: int = 1
    verbosity: str = "warning"

    def to_dict(self) -> dict[str, Any]:
        return {
            "budget": {
                "query_focused_max": self.budget.query_focused_max,
                "doc_summary_max": self.budget.doc_summary_max,
                "total_max": self.budget.total_max,
                "separator": self.budget.separator,
            },
            "augment": {
                "ops": list(self.augment.ops),
                "synonym_rate": self.augment.synonym_rate,
                "antonym_rate": self.augment.antonym_rate,
                "generation_rate": self.augment.generation_rate,
                "max_synonyms": self.augment.max_synonyms,
                "max_antonyms": self.augment.max_antonyms,
                "seed": self.augment.seed,
                "max_inflight": self.augment.max_inflight,
                "rate_limit_per_s": self.augment.rate_limit_per_s,
                "max_failure_rate": self.augment.max_failure_rate,
            },
            "provider": {"kind": self.provider, "model": self.model, "timeout_s": self.timeout_s},
            "workers": self.workers,
            "verbosity": self.verbosity,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise CliUsageError("config file must hold a JSON object")
        config = cls()
        known = {"budget", "augment", "provider", "workers", "verbosity"}
        unknown = set(data) - known
        if unknown:
            raise CliUsageError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "budget" in data:
                config.budget = _merge_dataclass(config.budget, data["budget"], "budget")
            if "augment" in data:
                config.augment = _merge_dataclass(config.augment, data["augment"], "augment")
            if "provider" in data:
                section = data["provider"]
                if not isinstance(section, dict):
                    raise CliUsageError("provider section must be an object")
                extra = set(section) - {"kind", "model", "timeout_s"}
                if extra:
                    raise CliUsageError(f"unknown provider keys: {sorted(extra)}")
                config.provider = section.get("kind", config.provider)
                config.model = section.get("model", config.model)
                config.timeout_s = section.get("timeout_s", config.timeout_s)
                if config.provider not in _PROVIDERS:
                    raise CliUsageError(f"provider kind must be one of {_PROVIDERS}")
            config.workers = data.get("workers", config.workers)
            config.verbosity = data.get("verbosity", config.verbosity)
        except ValueError as exc:
            raise CliUsageError(str(exc)) from None
        return config


def _merge_dataclass(base: Any, section: Any, name: str) -> Any:
    if not isinstance(section, dict):
        raise CliUsageError(f"{name} section must be an object")
    fields = {f.name for f in dataclasses.fields(base)}
    unknown = set(section) - fields
    if unknown:
        raise CliUsageError(f"unknown {name} keys: {sorted(unknown)}")
    overrides = dict(section)
    if "ops" in overrides and isinstance(overrides["ops"], list):
        overrides["ops"] = tuple(overrides["ops"])
    return dataclasses.replace(base, **overrides)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse reports usage problems with exit code 2; this CLI uses 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="relevkit",
        description="Build, augment, and evaluate graded search-relevance data.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__} (schema {SCHEMA_VERSION})",
    )
    parser.add_argument("--config", metavar="FILE", help="JSON config file; flags override it")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="more stderr logging (repeat for debug)",
    )
    subcommands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    summarize = subcommands.add_parser(
        "summarize", help="add query_focused, doc_summary, and mix_summary fields"
    )
    summarize.add_argument("--input", required=True, metavar="JSONL")
    summarize.add_argument("--output", required=True, metavar="JSONL")
    _add_budget_flags(summarize)
    summarize.add_argument("--workers", type=int, metavar="N", help="parallel workers (default 1)")
    _add_print_config(summarize)

    augment = subcommands.add_parser(
        "augment", help="generate rewritten and keyword-derived training pairs"
    )
    augment.add_argument("--input", required=True, metavar="JSONL")
    augment.add_argument("--output", required=True, metavar="JSONL")
    augment.add_argument("--provider", choices=_PROVIDERS, help="completion backend (default mock)")
    augment.add_argument("--seed", type=int, help="sampling and mock-provider seed")
    augment.add_argument(
        "--ops", metavar="LIST",
        help=f"comma-separated subset of {','.join(ALL_OPS)} (default all)",
    )
    augment.add_argument("--max-inflight", type=int, metavar="N", help="concurrent provider calls")
    augment.add_argument("--rate-limit", type=float, metavar="PER_S", help="provider calls per second")
    augment.add_argument("--model", help="model name for the http provider")
    augment.add_argument("--timeout", type=float, metavar="S", help="http request timeout")
    _add_print_config(augment)

    evaluate = subcommands.add_parser(
        "evaluate", help="pairwise AUC over scored predictions"
    )
    evaluate.add_argument(
        "--predictions", required=True, metavar="JSONL",
        help="records with label and score, or summarized records to score on the fly",
    )
    evaluate.add_argument("--figures", metavar="DIR", help="also render score distribution figures")
    _add_print_config(evaluate)

    gsb = subcommands.add_parser("gsb", help="net good/same/bad preference rate")
    gsb.add_argument("--good", type=int, required=True)
    gsb.add_argument("--same", type=int, required=True)
    gsb.add_argument("--bad", type=int, required=True)
    _add_print_config(gsb)

    stats_cmd = subcommands.add_parser("stats", help="per-class counts of a dataset")
    stats_cmd.add_argument("--input", required=True, metavar="JSONL")
    _add_print_config(stats_cmd)

    experiment = subcommands.add_parser(
        "experiment", help="compare mix scoring against query-focused-only scoring"
    )
    experiment.add_argument("--n-docs", type=int, metavar="N", help="synthetic corpus size (default 300)")
    experiment.add_argument("--seed", type=int, help="synthesis seed (default 0)")
    experiment.add_argument("--sentences-per-doc", type=int, metavar="N")
    _add_budget_flags(experiment)
    experiment.add_argument("--figures", metavar="DIR", help="also render report figures")
    _add_print_config(experiment)

    return parser


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--qf-max", type=int, metavar="TOKENS", help="query-focused budget (default 128)")
    parser.add_argument("--doc-max", type=int, metavar="TOKENS", help="document summary budget (default 64)")
    parser.add_argument("--total-max", type=int, metavar="TOKENS", help="combined budget (default 192)")
    parser.add_argument("--separator", metavar="TOKEN", help="separator between summary parts")


def _add_print_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--print-config", action="store_true", help="print the resolved config and exit"
    )


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig()
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliUsageError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise CliUsageError(f"config file is not valid JSON: {exc}") from None
        config = PipelineConfig.from_dict(raw)
    try:
        _apply_flags(config, args)
    except ValueError as exc:
        raise CliUsageError(str(exc)) from None
    return config


def _apply_flags(config: PipelineConfig, args: argparse.Namespace) -> None:
    budget_overrides = {
        "query_focused_max": getattr(args, "qf_max", None),
        "doc_summary_max": getattr(args, "doc_max", None),
        "total_max": getattr(args, "total_max", None),
        "separator": getattr(args, "separator", None),
    }
    live = {key: value for key, value in budget_overrides.items() if value is not None}
    if live:
        config.budget = dataclasses.replace(config.budget, **live)

    augment_overrides: dict[str, Any] = {}
    if getattr(args, "seed", None) is not None and args.command == "augment":
        augment_overrides["seed"] = args.seed
    if getattr(args, "ops", None) is not None:
        augment_overrides["ops"] = tuple(part.strip() for part in args.ops.split(",") if part.strip())
    if getattr(args, "max_inflight", None) is not None:
        augment_overrides["max_inflight"] = args.max_inflight
    if getattr(args, "rate_limit", None) is not None:
        augment_overrides["rate_limit_per_s"] = args.rate_limit
    if augment_overrides:
        config.augment = dataclasses.replace(config.augment, **augment_overrides)

    if getattr(args, "provider", None) is not None:
        config.provider = args.provider
    if getattr(args, "model", None) is not None:
        config.model = args.model
    if getattr(args, "timeout", None) is not None:
        if args.timeout <= 0:
            raise ValueError("timeout must be positive")
        config.timeout_s = args.timeout
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise ValueError("workers must be at least 1")
        config.workers = args.workers


def _build_provider(config: PipelineConfig) -> LlmProvider:
    if config.provider == "mock":
        return mock_provider(config.augment.seed)
    return HttpProvider(model=config.model, timeout_s=config.timeout_s)


def _write_jsonl(path: str, records: Iterator[dict[str, Any]]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def _cmd_summarize(args: argparse.Namespace, config: PipelineConfig) -> int:
    budget = config.budget

    def enrich(pair) -> dict[str, Any]:
        summary = mix_summary(pair.query, pair.document, budget)
        record = pair_to_record(pair)
        record["query_focused"] = summary.query_focused
        record["doc_summary"] = summary.doc_summary
        record["mix_summary"] = summary.combined
        return record

    count = _write_jsonl(args.output, imap_ordered(enrich, iter_dataset(args.input), config.workers))
    logger.info("summarized %d records", count)
    print(json.dumps({"records": count, "output": args.output}, ensure_ascii=False))
    return EXIT_OK


def _cmd_augment(args: argparse.Namespace, config: PipelineConfig) -> int:
    provider = _build_provider(config)
    result = augment_dataset(iter_dataset(args.input), provider, config.augment)
    for failure in result.failures:
        logger.warning("op %s failed for source %s: %s", failure.op, failure.source_id, failure.error)

    def records() -> Iterator[dict[str, Any]]:
        for sample in result.samples:
            record = pair_to_record(sample.pair)
            record["provenance"] = sample.provenance.tag
            record["source_id"] = sample.source_id
            yield record

    count = _write_jsonl(args.output, records())
    print(
        json.dumps(
            {
                "samples": count,
                "provider_calls": result.provider_calls,
                "failed_calls": len(result.failures),
                "output": args.output,
            },
            ensure_ascii=False,
        )
    )
    return EXIT_OK


def _iter_predictions(path: str) -> Iterator[ScoredPrediction]:
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_no}: invalid JSON: {exc.msg}") from None
            if not isinstance(raw, dict):
                raise DatasetError(f"line {line_no}: record must be a JSON object")
            if "label" not in raw:
                raise DatasetError(f"line {line_no}: missing field label")
            try:
                label = RelevanceLabel.parse(raw["label"])
            except ValueError as exc:
                raise DatasetError(f"line {line_no}: {exc}") from None
            if "score" in raw:
                value = raw["score"]
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise DatasetError(f"line {line_no}: score must be a number")
            elif {"query", "query_focused", "doc_summary"} <= raw.keys():
                # Summarized records carry no score yet; apply the
                # default heuristic scorer to their summary fields.
                _, value = score_summary_parts(raw["query"], raw["query_focused"], raw["doc_summary"])
            else:
                raise DatasetError(f"line {line_no}: missing field score")
            try:
                yield ScoredPrediction(label, float(value))
            except ValueError as exc:
                raise DatasetError(f"line {line_no}: {exc}") from None


def _cmd_evaluate(args: argparse.Namespace, config: PipelineConfig) -> int:
    predictions = list(_iter_predictions(args.predictions))
    auc = multiclass_auc(predictions)
    if args.figures:
        from .figures import render_score_histogram

        figure = render_score_histogram(predictions, Path(args.figures) / "scores_by_class.png")
        logger.info("wrote %s", figure)
    print(json.dumps({"auc": auc, "n": len(predictions)}))
    return EXIT_OK


def _cmd_gsb(args: argparse.Namespace, config: PipelineConfig) -> int:
    counts = GsbCounts(good=args.good, same=args.same, bad=args.bad)
    print(json.dumps({"delta_gsb": delta_gsb(counts), "n": counts.total}))
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace, config: PipelineConfig) -> int:
    print(json.dumps(stats(iter_dataset(args.input)).to_dict()))
    return EXIT_OK


def _cmd_experiment(args: argparse.Namespace, config: PipelineConfig) -> int:
    defaults = SyntheticSpec()
    try:
        spec = SyntheticSpec(
            n_docs=args.n_docs if args.n_docs is not None else defaults.n_docs,
            seed=args.seed if args.seed is not None else defaults.seed,
            sentences_per_doc=(
                args.sentences_per_doc
                if args.sentences_per_doc is not None
                else defaults.sentences_per_doc
            ),
        )
    except ValueError as exc:
        raise CliUsageError(str(exc)) from None
    report = run_experiment(spec, config.budget).to_dict()
    if args.figures:
        from .figures import render_experiment_figures

        paths = render_experiment_figures(report, args.figures)
        logger.info("wrote %d figures to %s", len(paths), args.figures)
    print(json.dumps(report, ensure_ascii=False))
    return EXIT_OK


_COMMANDS = {
    "summarize": _cmd_summarize,
    "augment": _cmd_augment,
    "evaluate": _cmd_evaluate,
    "gsb": _cmd_gsb,
    "stats": _cmd_stats,
    "experiment": _cmd_experiment,
}

_VERBOSITY_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


def _setup_logging(flag_count: int, verbosity: str) -> None:
    if flag_count >= 2:
        level = logging.DEBUG
    elif flag_count == 1:
        level = logging.INFO
    else:
        level = _VERBOSITY_LEVELS.get(verbosity, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        _setup_logging(args.verbose, config.verbosity)
        if getattr(args, "print_config", False):
            print(json.dumps(config.to_dict(), indent=2, ensure_ascii=False))
            return EXIT_OK
        return _COMMANDS[args.command](args, config)
    except CliUsageError as exc:
        print(f"relevkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProviderError, AugmentationAborted) as exc:
        print(f"relevkit: provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (DatasetError, CompletionParseError) as exc:
        print(f"relevkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"relevkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"relevkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
