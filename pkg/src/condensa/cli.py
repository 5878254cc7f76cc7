"""``condensa`` command line: summarize, index, search, eval, experiment.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analyzer import AnalyzerConfig, load_stopwords
from .errors import CondensaError, ConfigError, NoConvergenceError
from .evaluation import (
    auto_qrels,
    evaluate,
    load_qrels,
    write_aggregate_csv,
    write_curve_csv,
    write_hit_points_csv,
    write_per_query_csv,
)
from .harness import ExperimentConfig, load_corpus, load_queries, run_experiment
from .index import build_index, index_stats, load_index, save_index
from .retrieval import batch_search, read_run, write_run
from .summarizer import ExtractorConfig, summarize_corpus, write_summaries, write_summary_report

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("condensa")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_analyzer_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("analyzer")
    g.add_argument("--analyzer-config", type=Path, help="key = value file (stopwords, stemmer, min_token_len)")
    g.add_argument("--stopwords", type=Path, help="stopword file, one word per line")
    g.add_argument("--stemmer", choices=["porter", "identity"])
    g.add_argument("--min-token-len", type=_positive_int)


def _analyzer(args) -> AnalyzerConfig:
    cfg = AnalyzerConfig.from_file(args.analyzer_config) if args.analyzer_config else AnalyzerConfig()
    overrides = {}
    if args.stopwords:
        try:
            overrides["stopwords"] = load_stopwords(args.stopwords)
        except OSError as exc:
            raise ConfigError(f"cannot read stopwords file: {exc}") from exc
        overrides["stopwords_source"] = str(args.stopwords)
    if args.stemmer:
        overrides["stemmer"] = args.stemmer
    if args.min_token_len:
        overrides["min_token_len"] = args.min_token_len
    if overrides:
        cfg = AnalyzerConfig(**{**cfg.__dict__, **overrides})
    return cfg


def _add_extractor_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jac-th", type=float, default=0.5)
    p.add_argument("--vsm-th", type=float, default=0.5)
    p.add_argument("--lsa-th", type=float, default=0.5)
    p.add_argument("--lsa-energy", type=float, default=0.9)


def _extractor(args, model="MLS") -> ExtractorConfig:
    return ExtractorConfig(model, args.jac_th, args.vsm_th, args.lsa_th, args.lsa_energy)


def cmd_summarize(args) -> int:
    cfg = _extractor(args, args.model)
    corpus = load_corpus(args.input, _analyzer(args))
    summary = summarize_corpus(corpus, cfg, args.jobs)
    write_summaries(summary.documents, args.output)
    if args.report:
        write_summary_report(summary.results, args.report)
    print(f"{cfg.model.value}: {len(summary.results)} documents summarized, "
          f"{len(summary.failures)} failed, lsa_invocations={summary.total_lsa_invocations}, "
          f"mean_cr={summary.mean_condensation_rate:.4f}")
    return EXIT_OK if not summary.failures else EXIT_DATA


def cmd_index(args) -> int:
    idx = build_index(load_corpus(args.input, _analyzer(args)))
    save_index(idx, args.output)
    baseline = load_index(args.baseline) if args.baseline else None
    stats = index_stats(idx, baseline)
    line = f"docs={idx.n_docs} distinct_terms={stats.distinct_terms} total_postings={stats.total_postings}"
    if stats.ratio_to_baseline is not None:
        line += f" ratio_to_baseline={stats.ratio_to_baseline:.6f}"
    print(line)
    return EXIT_OK


def cmd_search(args) -> int:
    idx = load_index(args.index)
    queries = load_queries(args.queries, _analyzer(args))
    runs = batch_search(queries, idx, args.top_k, args.jobs)
    write_run(runs, args.out)
    failed = [r for r in runs if r.error]
    return EXIT_OK if not failed else EXIT_DATA


def cmd_eval(args) -> int:
    runs = read_run(args.run)
    if args.qrels:
        qrels = load_qrels(args.qrels)
    else:
        qrels = auto_qrels(read_run(args.auto_from))
    report = evaluate(runs, qrels, args.interp)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_per_query_csv(report, out / f"{args.name}_per_query.csv")
    write_aggregate_csv(report, out / f"{args.name}_aggregate.csv")
    write_curve_csv(report, out / f"{args.name}_curve.csv")
    write_hit_points_csv(report, runs, out / f"{args.name}_hit_points.csv", qrels)
    if report.per_query:
        print(f"queries={len(report.per_query)} recall={report.mean_recall:.6f} MAP={report.map:.6f}")
    else:
        print("no judged queries")
    return EXIT_OK


def cmd_experiment(args) -> int:
    models = [m for m in args.models.split(",") if m.strip()] if args.models else []
    cfg = ExperimentConfig(
        corpus_dir=args.corpus,
        queries_path=args.queries,
        qrels_path=args.qrels,
        assessment=args.assessment,
        models=tuple(m.strip() for m in models),
        extractor=_extractor(args),
        analyzer=_analyzer(args),
        output_dir=args.out,
        top_k=args.top_k,
        interp=args.interp,
        workers=args.jobs,
    )
    report = run_experiment(cfg)
    for name, entry in report.entries.items():
        ratio = entry.stats.ratio_to_baseline
        ratio_text = "n/a" if ratio is None else f"{ratio:.4f}"
        mean_map = entry.report.map if entry.report.per_query else 0.0
        print(f"{name:4s} terms={entry.stats.distinct_terms:6d} ratio={ratio_text} "
              f"recall={entry.report.mean_recall:.4f} MAP={mean_map:.4f}")
    if report.failures:
        print(f"{len(report.failures)} failures recorded in failures.tsv", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condensa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("summarize", help="write extractive summaries of a corpus")
    p.add_argument("--model", required=True, choices=["jac", "vsm", "lsa", "mls"], type=str.lower)
    _add_extractor_args(p)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--report", type=Path)
    p.add_argument("--jobs", type=_positive_int)
    _add_analyzer_args(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("index", help="build an inverted index from a corpus directory")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--baseline", type=Path, help="index file to report the size ratio against")
    _add_analyzer_args(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run a query file against an index")
    p.add_argument("--index", required=True, type=Path)
    p.add_argument("--queries", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--top-k", type=_positive_int)
    p.add_argument("--jobs", type=_positive_int)
    _add_analyzer_args(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="evaluate a run file")
    p.add_argument("--run", required=True, type=Path)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--qrels", type=Path)
    src.add_argument("--auto-from", type=Path, help="baseline run whose retrieved sets are the relevant sets")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--name", default="run")
    p.add_argument("--interp", choices=["paper", "standard"], default="paper")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="five-index summarize/index/retrieve/evaluate experiment")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--queries", required=True, type=Path)
    p.add_argument("--qrels", type=Path)
    p.add_argument("--assessment", required=True, choices=["manual", "auto-mc"])
    p.add_argument("--models", default="jac,vsm,lsa,mls", help="comma-separated subset of jac,vsm,lsa,mls")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--top-k", type=_positive_int)
    p.add_argument("--interp", choices=["paper", "standard"], default="paper")
    p.add_argument("--jobs", type=_positive_int)
    _add_extractor_args(p)
    _add_analyzer_args(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"condensa: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoConvergenceError as exc:
        print(f"condensa: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CondensaError, OSError, UnicodeDecodeError) as exc:
        print(f"condensa: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
