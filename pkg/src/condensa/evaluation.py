"""Relevancy measures: set metrics, AP/MAP, R-precision and 11-point curves.

Two interpolation modes exist.  ``paper`` takes, for each recall level
R_i = i/10, the best precision among hit points whose recall falls in the
window [R_i, R_{i+1}) (R_10 is the single point recall = 1.0), and leaves
empty windows at 0.  ``standard`` is the usual trec_eval rule: the best
precision at any recall >= R_i.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyRelevantSetError, FormatError, NoQueriesError
from .retrieval import RankedList

log = logging.getLogger(__name__)

QRels = dict[str, frozenset[str]]
RECALL_LEVELS = tuple(i / 10 for i in range(11))
INTERP_MODES = ("paper", "standard")


def _doc_ids(ranked) -> list[str]:
    return ranked.doc_ids if isinstance(ranked, RankedList) else list(ranked)


def _require(relevant) -> None:
    if not relevant:
        raise EmptyRelevantSetError("relevant set is empty")


def set_metrics(retrieved, relevant) -> tuple[float, float, float]:
    """Precision, recall and their harmonic mean for an unranked retrieved set."""
    _require(relevant)
    docs = _doc_ids(retrieved)
    hits = sum(1 for d in docs if d in relevant)
    p = hits / len(docs) if docs else 0.0
    r = hits / len(relevant)
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def hit_points(ranked, relevant) -> list[tuple[float, float]]:
    """(recall, precision) at every rank holding a relevant document."""
    _require(relevant)
    points = []
    hits = 0
    for rank, doc_id in enumerate(_doc_ids(ranked), start=1):
        if doc_id in relevant:
            hits += 1
            points.append((hits / len(relevant), hits / rank))
    return points


def average_precision(ranked, relevant) -> float:
    """Mean precision over relevant documents; unretrieved ones count as 0."""
    points = hit_points(ranked, relevant)
    return math.fsum(p for _, p in points) / len(relevant)


def r_precision(ranked, relevant) -> float:
    _require(relevant)
    cutoff = len(relevant)
    top = _doc_ids(ranked)[:cutoff]
    return sum(1 for d in top if d in relevant) / cutoff


def mean_average_precision(aps: Iterable) -> float:
    values = [a.ap if isinstance(a, QueryEval) else float(a) for a in aps]
    if not values:
        raise NoQueriesError("MAP needs at least one query")
    return math.fsum(values) / len(values)


def _recall_bin(recall: float) -> int:
    # recall values are ratios of small integers; the epsilon absorbs
    # representation error such as 0.3 * 10 = 2.9999999999999996
    return min(10, int(math.floor(recall * 10 + 1e-9)))


def interpolate_11pt(points: Sequence[tuple[float, float]], mode: str = "paper") -> list[float]:
    if mode not in INTERP_MODES:
        raise ValueError(f"unknown interpolation mode {mode!r}")
    levels = [0.0] * 11
    if mode == "paper":
        for recall, precision in points:
            b = _recall_bin(recall)
            levels[b] = max(levels[b], precision)
        return levels
    for i, level in enumerate(RECALL_LEVELS):
        candidates = [p for r, p in points if r >= level - 1e-9]
        levels[i] = max(candidates, default=0.0)
    return levels


def auto_qrels(baseline_runs: Iterable[RankedList]) -> QRels:
    """Treat each baseline ranked list's full retrieved set as the relevant set."""
    qrels: QRels = {}
    for run in baseline_runs:
        if not run.hits:
            log.warning("query %s has an empty baseline run; excluded from evaluation", run.query_id)
            continue
        qrels[run.query_id] = frozenset(run.doc_ids)
    return qrels


@dataclass(frozen=True)
class QueryEval:
    query_id: str
    precision: float
    recall: float
    f: float
    r_precision: float
    ap: float
    hit_points: tuple[tuple[float, float], ...]
    interp11: tuple[float, ...]
    n_retrieved: int
    n_relevant: int


@dataclass
class EvalReport:
    interp_mode: str
    per_query: dict[str, QueryEval] = field(default_factory=dict)

    @property
    def mean_recall(self) -> float:
        return _mean(q.recall for q in self.per_query.values())

    @property
    def mean_precision(self) -> float:
        return _mean(q.precision for q in self.per_query.values())

    @property
    def map(self) -> float:
        return mean_average_precision(self.per_query.values())

    @property
    def interp11(self) -> list[float]:
        rows = [q.interp11 for q in self.per_query.values()]
        if not rows:
            return [0.0] * 11
        return [math.fsum(col) / len(rows) for col in zip(*rows)]


def _mean(values: Iterable[float]) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else 0.0


def evaluate_query(query_id: str, ranked, relevant, interp: str = "paper") -> QueryEval:
    docs = _doc_ids(ranked)
    p, r, f = set_metrics(docs, relevant)
    points = hit_points(docs, relevant)
    return QueryEval(
        query_id=query_id,
        precision=p,
        recall=r,
        f=f,
        r_precision=r_precision(docs, relevant),
        ap=average_precision(docs, relevant),
        hit_points=tuple(points),
        interp11=tuple(interpolate_11pt(points, interp)),
        n_retrieved=len(docs),
        n_relevant=len(relevant),
    )


def evaluate(runs: Sequence[RankedList], qrels: Mapping[str, Iterable[str]], interp: str = "paper") -> EvalReport:
    """Evaluate every judged query; judged queries missing from ``runs`` score 0."""
    if interp not in INTERP_MODES:
        raise ValueError(f"unknown interpolation mode {interp!r}")
    by_qid = {run.query_id: run for run in runs}
    for qid in by_qid:
        if qid not in qrels:
            log.warning("run contains query %s with no relevance judgments; ignored", qid)
    report = EvalReport(interp)
    for qid, relevant in qrels.items():
        relevant = frozenset(relevant)
        if not relevant:
            log.warning("query %s has no relevant documents; skipped", qid)
            continue
        ranked = by_qid.get(qid, RankedList(qid))
        report.per_query[qid] = evaluate_query(qid, ranked, relevant, interp)
    return report


def load_qrels(path: str | Path) -> QRels:
    """Read ``query_id<TAB>doc_id`` lines into per-query relevant sets."""
    grouped: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
                raise FormatError("expected query_id<TAB>doc_id", lineno, str(path))
            grouped.setdefault(fields[0].strip(), set()).add(fields[1].strip())
    return {qid: frozenset(docs) for qid, docs in grouped.items()}


def write_qrels(qrels: Mapping[str, Iterable[str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for qid, docs in qrels.items():
            for d in sorted(docs):
                fh.write(f"{qid}\t{d}\n")


def _num(x: float) -> str:
    return repr(float(x))


def write_per_query_csv(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["query_id", "P", "R", "F", "r_prec", "AP"])
        for qid, q in report.per_query.items():
            w.writerow([qid, _num(q.precision), _num(q.recall), _num(q.f), _num(q.r_precision), _num(q.ap)])


AGGREGATE_COLUMNS = ["recall", "MAP"] + [f"r{i}" for i in range(11)]


def aggregate_row(report: EvalReport) -> list[str]:
    map_value = report.map if report.per_query else 0.0
    return [_num(report.mean_recall), _num(map_value)] + [_num(x) for x in report.interp11]


def write_aggregate_csv(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS + ["interp"])
        w.writerow(aggregate_row(report) + [report.interp_mode])


def write_curve_csv(report: EvalReport, path: str | Path) -> None:
    """Averaged 11-point curve; the ``interp`` column names the interpolation rule used."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["recall_level", "avg_precision", "interp"])
        for level, value in zip(RECALL_LEVELS, report.interp11):
            w.writerow([f"{level:.1f}", _num(value), report.interp_mode])


def write_hit_points_csv(report: EvalReport, runs: Sequence[RankedList], path: str | Path,
                         qrels: Mapping[str, Iterable[str]]) -> None:
    """Precision at each retrieved relevant document, one row per hit."""
    by_qid = {r.query_id: r for r in runs}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["query_id", "doc_id", "R", "P"])
        for qid, q in report.per_query.items():
            relevant = frozenset(qrels[qid])
            docs = [d for d in by_qid.get(qid, RankedList(qid)).doc_ids if d in relevant]
            for doc_id, (rec, prec) in zip(docs, q.hit_points):
                w.writerow([qid, doc_id, _num(rec), _num(prec)])
