"""Corpus ingestion and the five-index summarize/index/retrieve/evaluate experiment.

One index is built from the raw corpus (MC) and one from the summaries of
each selected extractor.  All queries run against every index, and each run
is judged either against manual qrels or against the MC run itself.
"""

from __future__ import annotations

import csv
import json
import logging
import re
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .analyzer import AnalyzerConfig, Document, build_document
from .errors import ConfigError, DuplicateDocIdError, EmptyCorpusDirError, FormatError
from .evaluation import (
    AGGREGATE_COLUMNS,
    EvalReport,
    QRels,
    aggregate_row,
    auto_qrels,
    evaluate,
    load_qrels,
    write_curve_csv,
    write_hit_points_csv,
    write_per_query_csv,
    write_qrels,
)
from .index import IndexStats, InvertedIndex, build_index, index_stats, save_index
from .retrieval import Query, RankedList, batch_search, make_query, write_run
from .summarizer import CorpusSummary, ExtractorConfig, Model, summarize_corpus, write_summary_report

log = logging.getLogger(__name__)

MC = "MC"
# reporting order of the summary indexes
MODEL_ORDER = (Model.MLS, Model.LSA, Model.VSM, Model.JAC)
ASSESSMENTS = ("manual", "auto_mc")


def load_corpus(corpus_dir: str | Path, config: AnalyzerConfig | None = None,
                skipped: list[tuple[str, str]] | None = None) -> list[Document]:
    """One Document per ``*.txt`` file, in lexicographic filename order.

    Files that cannot be read as UTF-8 are logged and skipped; pass a list as
    ``skipped`` to collect ``(filename, reason)`` pairs.
    """
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise EmptyCorpusDirError(f"{corpus_dir} is not a directory")
    paths = sorted(corpus_dir.glob("*.txt"), key=lambda p: p.name)
    docs = []
    seen = set()
    for path in paths:
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("skipping unreadable file %s: %s", path, exc)
            if skipped is not None:
                skipped.append((path.name, f"{type(exc).__name__}: {exc}"))
            continue
        doc_id = path.stem
        if doc_id in seen:
            raise DuplicateDocIdError(f"duplicate doc_id {doc_id!r} in {corpus_dir}")
        seen.add(doc_id)
        docs.append(build_document(doc_id, text, config))
    if not docs:
        raise EmptyCorpusDirError(f"no readable *.txt files in {corpus_dir}")
    return docs


def load_queries(path: str | Path, config: AnalyzerConfig | None = None) -> list[Query]:
    queries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            qid, sep, text = line.partition("\t")
            qid = qid.strip()
            if not sep or not qid or not text.strip():
                raise FormatError("expected query_id<TAB>query text", lineno, str(path))
            if qid in seen:
                raise FormatError(f"duplicate query id {qid!r}", lineno, str(path))
            seen.add(qid)
            queries.append(make_query(qid, text.strip(), config))
    return queries


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_dir: Path
    queries_path: Path
    qrels_path: Path | None = None
    assessment: str = "auto_mc"
    models: tuple[Model, ...] = MODEL_ORDER
    extractor: ExtractorConfig = field(default_factory=ExtractorConfig)
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    output_dir: Path | None = None
    top_k: int | None = None
    interp: str = "paper"
    workers: int | None = None

    def __post_init__(self):
        assessment = self.assessment.replace("-", "_")
        if assessment not in ASSESSMENTS:
            raise ConfigError(f"assessment must be manual or auto-mc, got {self.assessment!r}")
        object.__setattr__(self, "assessment", assessment)
        if assessment == "manual" and self.qrels_path is None:
            raise ConfigError("manual assessment needs a qrels file")
        models = {Model.parse(m) for m in self.models}
        object.__setattr__(self, "models", tuple(m for m in MODEL_ORDER if m in models))
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError("top_k must be positive")
        if self.interp not in ("paper", "standard"):
            raise ConfigError(f"interp must be paper or standard, got {self.interp!r}")

    def echo(self) -> dict:
        return {
            "corpus_dir": str(self.corpus_dir),
            "queries_path": str(self.queries_path),
            "qrels_path": None if self.qrels_path is None else str(self.qrels_path),
            "assessment": self.assessment,
            "models": [m.value for m in self.models],
            "jac_threshold": self.extractor.jac_threshold,
            "vsm_threshold": self.extractor.vsm_threshold,
            "lsa_threshold": self.extractor.lsa_threshold,
            "lsa_energy": self.extractor.lsa_energy,
            "analyzer": self.analyzer.describe(),
            "top_k": self.top_k,
            "interp": self.interp,
        }


@dataclass
class IndexRun:
    name: str
    index: InvertedIndex
    stats: IndexStats
    runs: list[RankedList]
    report: EvalReport | None = None
    summary: CorpusSummary | None = None


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    entries: dict[str, IndexRun] = field(default_factory=dict)
    queries: list[Query] = field(default_factory=list)
    qrels: QRels = field(default_factory=dict)
    failures: list[tuple[str, str]] = field(default_factory=list)
    skipped_files: list[tuple[str, str]] = field(default_factory=list)
    timestamps: dict = field(default_factory=dict)
    manifest: list[tuple[str, str]] = field(default_factory=list)

    def counters(self) -> dict:
        out = {}
        for name, entry in self.entries.items():
            if entry.summary is not None:
                s = entry.summary
                out[name] = {
                    "documents": len(s.results),
                    "failures": len(s.failures),
                    "lsa_invocations": s.total_lsa_invocations,
                    "pairwise_comparisons": s.total_pairwise_comparisons,
                    "mean_condensation_rate": s.mean_condensation_rate,
                }
        return out


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    report = ExperimentReport(cfg)
    report.timestamps["started_at"] = _now()
    t0 = time.perf_counter()

    corpus = load_corpus(cfg.corpus_dir, cfg.analyzer, report.skipped_files)
    report.queries = load_queries(cfg.queries_path, cfg.analyzer)
    log.info("loaded %d documents and %d queries", len(corpus), len(report.queries))

    mc_index = build_index(corpus)
    mc_runs = batch_search(report.queries, mc_index, cfg.top_k, cfg.workers)
    report.entries[MC] = IndexRun(MC, mc_index, index_stats(mc_index, mc_index), mc_runs)

    for model in cfg.models:
        name = model.value
        try:
            summary = summarize_corpus(corpus, replace(cfg.extractor, model=model), cfg.workers)
            for doc_id, error in summary.failures:
                report.failures.append((f"summarize:{name}:{doc_id}", error))
            idx = build_index(summary.documents)
        except Exception as exc:  # a failed extractor drops only its own index
            log.error("%s index skipped: %s", name, exc)
            report.failures.append((f"index:{name}", f"{type(exc).__name__}: {exc}"))
            continue
        runs = batch_search(report.queries, idx, cfg.top_k, cfg.workers)
        report.entries[name] = IndexRun(name, idx, index_stats(idx, mc_index), runs, summary=summary)

    if cfg.assessment == "manual":
        report.qrels = load_qrels(cfg.qrels_path)
        known = {q.query_id for q in report.queries}
        for qid in report.qrels:
            if qid not in known:
                log.warning("qrels mention unknown query id %s", qid)
    else:
        report.qrels = auto_qrels(mc_runs)

    for entry in report.entries.values():
        entry.report = evaluate(entry.runs, report.qrels, cfg.interp)

    report.timestamps["finished_at"] = _now()
    report.timestamps["elapsed_seconds"] = round(time.perf_counter() - t0, 3)
    if cfg.output_dir is not None:
        emit_reports(report, cfg.output_dir)
    return report


_UNSAFE = re.compile(r"[^A-Za-z0-9._-]")


def _safe_name(text: str) -> str:
    return _UNSAFE.sub("_", text) or "_"


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _similarity_table(report: ExperimentReport, qid: str):
    """Side-by-side (doc_id, score) columns per index for one query."""
    names = list(report.entries)
    lists = []
    for name in names:
        run = next((r for r in report.entries[name].runs if r.query_id == qid), None)
        lists.append(list(run.hits) if run else [])
    depth = max((len(h) for h in lists), default=0)
    rows = []
    for k in range(depth):
        row = []
        for hits in lists:
            if k < len(hits):
                row += [hits[k].doc_id, repr(hits[k].score)]
            else:
                row += ["", ""]
        rows.append(row)
    header = [f"{n}_{col}" for n in names for col in ("doc_id", "sim")]
    return header, rows


def emit_reports(report: ExperimentReport, output_dir: str | Path) -> list[tuple[str, str]]:
    """Write every experiment artifact plus ``manifest.tsv`` (role, relative path)."""
    out = Path(output_dir)
    for sub in ("indexes", "runs", "eval", "hits", "curves", "summaries", "tables"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    manifest: list[tuple[str, str]] = []

    def record(role: str, path: Path) -> None:
        manifest.append((role, path.relative_to(out).as_posix()))

    for name, entry in report.entries.items():
        p = out / "indexes" / f"{name}.idx"
        save_index(entry.index, p)
        record(f"index:{name}", p)
        p = out / "runs" / f"{name}.tsv"
        write_run(entry.runs, p)
        record(f"run:{name}", p)
        p = out / "eval" / f"{name}_per_query.csv"
        write_per_query_csv(entry.report, p)
        record(f"eval:{name}", p)
        p = out / "hits" / f"{name}_hit_points.csv"
        write_hit_points_csv(entry.report, entry.runs, p, report.qrels)
        record(f"hit_points:{name}", p)
        p = out / "curves" / f"{name}_curve.csv"
        write_curve_csv(entry.report, p)
        record(f"curve:{name}", p)
        if entry.summary is not None:
            p = out / "summaries" / f"{name}_report.csv"
            write_summary_report(entry.summary.results, p)
            record(f"summary_report:{name}", p)

    p = out / "aggregate.csv"
    _write_csv(p, ["index"] + AGGREGATE_COLUMNS + ["interp"],
               [[name] + aggregate_row(e.report) + [e.report.interp_mode] for name, e in report.entries.items()])
    record("aggregate", p)

    p = out / "index_stats.csv"
    _write_csv(p, ["index", "distinct_terms", "total_postings", "ratio_to_baseline"],
               [[name, e.stats.distinct_terms, e.stats.total_postings,
                 "" if e.stats.ratio_to_baseline is None else repr(e.stats.ratio_to_baseline)]
                for name, e in report.entries.items()])
    record("index_stats", p)

    p = out / "summarizer_totals.csv"
    counters = report.counters()
    _write_csv(p, ["model", "documents", "failures", "lsa_invocations", "pairwise_comparisons",
                   "mean_condensation_rate"],
               [[name, c["documents"], c["failures"], c["lsa_invocations"], c["pairwise_comparisons"],
                 repr(c["mean_condensation_rate"])] for name, c in counters.items()])
    record("summarizer_totals", p)

    p = out / "qrels.tsv"
    write_qrels(report.qrels, p)
    record("qrels", p)

    p = out / "failures.tsv"
    _write_csv(p, ["stage", "error"], report.failures + [(f"load:{f}", e) for f, e in report.skipped_files])
    record("failures", p)

    for q in report.queries:
        header, rows = _similarity_table(report, q.query_id)
        p = out / "tables" / f"similarity_{_safe_name(q.query_id)}.csv"
        _write_csv(p, header, rows)
        record(f"similarity_table:{q.query_id}", p)
        p = out / "tables" / f"retrieved_{_safe_name(q.query_id)}.csv"
        doc_cols = [header[k] for k in range(0, len(header), 2)]
        _write_csv(p, doc_cols, [row[0::2] for row in rows])
        record(f"retrieved_table:{q.query_id}", p)

    p = out / "run_meta.json"
    meta = {
        "config": report.config.echo(),
        "indexes": list(report.entries),
        "counters": counters,
        "queries": len(report.queries),
        "judged_queries": len(report.qrels),
        "failures": len(report.failures),
        "timestamps": report.timestamps,
    }
    p.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    record("run_meta", p)

    with open(out / "manifest.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for role, rel in manifest:
            fh.write(f"{role}\t{rel}\n")
    report.manifest = manifest
    return manifest
