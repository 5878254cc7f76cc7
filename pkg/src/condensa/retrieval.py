"""Cosine ranking of documents against queries over an inverted index."""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .analyzer import AnalyzerConfig, analyze
from .errors import FormatError
from .index import InvertedIndex, term_weight

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Query:
    query_id: str
    text: str
    terms: tuple[str, ...]


@dataclass(frozen=True)
class Hit:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    query_id: str
    hits: tuple[Hit, ...] = ()
    error: str | None = None

    @property
    def doc_ids(self) -> list[str]:
        return [h.doc_id for h in self.hits]


def make_query(query_id: str, text: str, config: AnalyzerConfig | None = None) -> Query:
    return Query(str(query_id), text, tuple(analyze(text, config)))


def query_vector(q: Query, idx: InvertedIndex) -> dict[str, float]:
    """Unit-length tf-idf vector of the query, using the index's N and df.

    Terms the index does not know are dropped; an empty dict means no overlap.
    """
    tf = Counter(t for t in q.terms if t in idx.terms)
    raw = {t: term_weight(tf[t], idx.n_docs, idx.terms[t].df) for t in sorted(tf)}
    raw = {t: w for t, w in raw.items() if w > 0.0}
    length = math.sqrt(math.fsum(w * w for w in raw.values()))
    if length == 0.0:
        return {}
    return {t: w / length for t, w in raw.items()}


def search(q: Query, idx: InvertedIndex, top_k: int | None = None) -> RankedList:
    """Rank every document sharing a term with ``q``; ties go to the smaller doc_id."""
    qvec = query_vector(q, idx)
    contributions: dict[str, list[float]] = {}
    for term, wq in qvec.items():
        for p in idx.terms[term].postings:
            contributions.setdefault(p.doc_id, []).append(wq * p.weight)
    scored = [(math.fsum(parts), doc_id) for doc_id, parts in contributions.items()]
    scored = [(s, d) for s, d in scored if s > 0.0]
    scored.sort(key=lambda sd: (-sd[0], sd[1]))
    if top_k is not None:
        scored = scored[:top_k]
    hits = tuple(Hit(d, s, rank) for rank, (s, d) in enumerate(scored, start=1))
    return RankedList(q.query_id, hits)


def _search_safe(q: Query, idx: InvertedIndex, top_k: int | None) -> RankedList:
    try:
        return search(q, idx, top_k)
    except Exception as exc:  # recorded on the result; the batch carries on
        log.warning("query %s failed: %s", q.query_id, exc)
        return RankedList(q.query_id, (), f"{type(exc).__name__}: {exc}")


def batch_search(queries: Sequence[Query], idx: InvertedIndex, top_k: int | None = None,
                 workers: int | None = None) -> list[RankedList]:
    """Search every query; output order follows ``queries``."""
    if workers and workers > 1 and len(queries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda q: _search_safe(q, idx, top_k), queries))
    return [_search_safe(q, idx, top_k) for q in queries]


def dumps_run(runs: Sequence[RankedList]) -> str:
    out = []
    for run in runs:
        for h in run.hits:
            out.append(f"{run.query_id}\t{h.doc_id}\t{h.rank}\t{h.score:.17g}\n")
    return "".join(out)


def write_run(runs: Sequence[RankedList], path: str | Path) -> None:
    Path(path).write_text(dumps_run(runs), encoding="utf-8", newline="\n")


def read_run(path: str | Path) -> list[RankedList]:
    """Parse a run file back into ranked lists, grouped in first-seen query order."""
    grouped: dict[str, list[Hit]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise FormatError("expected query_id<TAB>doc_id<TAB>rank<TAB>score", lineno, str(path))
            qid, doc_id, rank_text, score_text = fields
            try:
                hit = Hit(doc_id, float(score_text), int(rank_text))
            except ValueError:
                raise FormatError("bad rank or score", lineno, str(path)) from None
            grouped.setdefault(qid, []).append(hit)
    runs = []
    for qid, hits in grouped.items():
        hits.sort(key=lambda h: h.rank)
        runs.append(RankedList(qid, tuple(hits)))
    return runs
