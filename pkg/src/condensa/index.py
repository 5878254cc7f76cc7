"""tf-idf inverted index with cosine-normalized postings.

Weights follow ``(1 + log10 f) * log10(N / df)`` on whole-document term
frequencies, and every document vector is divided by its Euclidean length at
build time so query scoring is a plain dot product.  The on-disk form is a
line-oriented UTF-8 text file::

    #condensa-index v1
    N <doc count>
    D <doc_id> <raw norm>                     (one per document)
    T <term> <df> <doc_id>:<weight>,...       (one per term, sorted)
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analyzer import Document
from .errors import DuplicateDocIdError, EmptyCorpusError, FormatError, InvalidStatsError

HEADER = "#condensa-index v1"
NORM_TOL = 1e-9


@dataclass(frozen=True)
class Posting:
    doc_id: str
    weight: float


@dataclass(frozen=True)
class TermEntry:
    df: int
    postings: tuple[Posting, ...]


@dataclass
class InvertedIndex:
    n_docs: int
    terms: dict[str, TermEntry]
    doc_norms: dict[str, float]

    @property
    def vocabulary(self) -> set[str]:
        return set(self.terms)

    def doc_vector(self, doc_id: str) -> dict[str, float]:
        return {t: p.weight for t, e in self.terms.items() for p in e.postings if p.doc_id == doc_id}

    def doc_vectors(self) -> dict[str, dict[str, float]]:
        vecs: dict[str, dict[str, float]] = {d: {} for d in self.doc_norms}
        for term, entry in self.terms.items():
            for p in entry.postings:
                vecs[p.doc_id][term] = p.weight
        return vecs


@dataclass(frozen=True)
class IndexStats:
    distinct_terms: int
    total_postings: int
    ratio_to_baseline: float | None = None


def term_weight(f: int, n_docs: int, df: int) -> float:
    """tf-idf weight of a term occurring ``f`` times, in ``df`` of ``n_docs`` texts."""
    if f < 0:
        raise InvalidStatsError(f"negative term frequency {f}")
    if f == 0:
        return 0.0
    if df < 1 or df > n_docs:
        raise InvalidStatsError(f"document frequency {df} outside 1..{n_docs}")
    if df == n_docs:
        return 0.0
    return (1.0 + math.log10(f)) * math.log10(n_docs / df)


def _check_ids(corpus: Sequence[Document]) -> None:
    seen = set()
    for doc in corpus:
        if doc.doc_id in seen:
            raise DuplicateDocIdError(f"duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)


def build_index(corpus: Sequence[Document]) -> InvertedIndex:
    if not corpus:
        raise EmptyCorpusError("cannot index an empty corpus")
    _check_ids(corpus)
    n_docs = len(corpus)
    tfs = {doc.doc_id: Counter(t for s in doc.sentences for t in s.terms) for doc in corpus}
    df: Counter[str] = Counter()
    for tf in tfs.values():
        df.update(tf.keys())

    postings: dict[str, list[Posting]] = {}
    norms: dict[str, float] = {}
    for doc_id in sorted(tfs):
        tf = tfs[doc_id]
        raw = {}
        for term in sorted(tf):
            w = term_weight(tf[term], n_docs, df[term])
            if w > 0.0:
                raw[term] = w
        length = math.sqrt(math.fsum(w * w for w in raw.values()))
        norms[doc_id] = length
        for term, w in raw.items():
            postings.setdefault(term, []).append(Posting(doc_id, w / length))

    terms = {t: TermEntry(len(postings[t]), tuple(postings[t])) for t in sorted(postings)}
    return InvertedIndex(n_docs, terms, norms)


def index_stats(idx: InvertedIndex, baseline: InvertedIndex | None = None) -> IndexStats:
    """Size of an index as its distinct-term count, optionally relative to a baseline."""
    distinct = len(idx.terms)
    total = sum(e.df for e in idx.terms.values())
    ratio = None
    if baseline is not None and baseline.terms:
        ratio = distinct / len(baseline.terms)
    return IndexStats(distinct, total, ratio)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _check_token(kind: str, value: str, forbidden: str = "") -> None:
    if not value or any(ch.isspace() for ch in value) or any(ch in value for ch in forbidden):
        raise FormatError(f"{kind} {value!r} cannot be written to an index file")


def dumps_index(idx: InvertedIndex) -> str:
    lines = [HEADER, f"N {idx.n_docs}"]
    for doc_id in sorted(idx.doc_norms):
        _check_token("doc_id", doc_id, ",")
        lines.append(f"D {doc_id} {_fmt(idx.doc_norms[doc_id])}")
    for term in sorted(idx.terms):
        _check_token("term", term)
        entry = idx.terms[term]
        plist = ",".join(f"{p.doc_id}:{_fmt(p.weight)}" for p in entry.postings)
        lines.append(f"T {term} {entry.df} {plist}")
    return "\n".join(lines) + "\n"


def save_index(idx: InvertedIndex, path: str | Path) -> None:
    Path(path).write_text(dumps_index(idx), encoding="utf-8", newline="\n")


def _parse_float(text: str, what: str, lineno: int, path) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(f"bad {what} {text!r}", lineno, path) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite {what} {text!r}", lineno, path)
    return value


def loads_index(text: str, path: str | None = None) -> InvertedIndex:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    elif lines:
        # every line the writer emits ends with LF; a missing one means a cut-off file
        raise FormatError("last line is not newline-terminated (truncated file?)", len(lines), path)
    if not lines or lines[0] != HEADER:
        raise FormatError(f"expected header {HEADER!r}", 1, path)
    if len(lines) < 2 or not lines[1].startswith("N "):
        raise FormatError("expected 'N <doc count>'", 2, path)
    try:
        n_docs = int(lines[1][2:])
    except ValueError:
        raise FormatError(f"bad doc count {lines[1][2:]!r}", 2, path) from None
    if n_docs < 0:
        raise FormatError("negative doc count", 2, path)

    norms: dict[str, float] = {}
    terms: dict[str, TermEntry] = {}
    sq_sums: dict[str, list[float]] = {}
    prev_term = None
    for lineno, line in enumerate(lines[2:], start=3):
        fields = line.split(" ")
        kind = fields[0]
        if kind == "D":
            if terms:
                raise FormatError("document line after term lines", lineno, path)
            if len(fields) != 3:
                raise FormatError("expected 'D <doc_id> <norm>'", lineno, path)
            doc_id = fields[1]
            if doc_id in norms:
                raise FormatError(f"duplicate doc_id {doc_id!r}", lineno, path)
            norms[doc_id] = _parse_float(fields[2], "norm", lineno, path)
            sq_sums[doc_id] = []
        elif kind == "T":
            if len(norms) != n_docs:
                raise FormatError(f"expected {n_docs} document lines, found {len(norms)}", lineno, path)
            if len(fields) != 4:
                raise FormatError("expected 'T <term> <df> <postings>'", lineno, path)
            term = fields[1]
            if prev_term is not None and term <= prev_term:
                raise FormatError(f"term {term!r} out of order", lineno, path)
            prev_term = term
            try:
                df = int(fields[2])
            except ValueError:
                raise FormatError(f"bad df {fields[2]!r}", lineno, path) from None
            plist = []
            prev_doc = None
            for item in fields[3].split(","):
                doc_id, sep, weight_text = item.rpartition(":")
                if not sep or doc_id not in norms:
                    raise FormatError(f"bad posting {item!r}", lineno, path)
                if prev_doc is not None and doc_id <= prev_doc:
                    raise FormatError(f"posting {doc_id!r} out of order", lineno, path)
                prev_doc = doc_id
                weight = _parse_float(weight_text, "weight", lineno, path)
                if weight <= 0.0:
                    raise FormatError(f"non-positive weight in posting {item!r}", lineno, path)
                plist.append(Posting(doc_id, weight))
                sq_sums[doc_id].append(weight * weight)
            if df != len(plist):
                raise FormatError(f"df {df} does not match {len(plist)} postings", lineno, path)
            terms[term] = TermEntry(df, tuple(plist))
        else:
            raise FormatError(f"unknown record type {kind!r}", lineno, path)

    end = len(lines) + 1
    if len(norms) != n_docs:
        raise FormatError(f"expected {n_docs} document lines, found {len(norms)}", end, path)
    for doc_id, squares in sq_sums.items():
        total = math.fsum(squares)
        if norms[doc_id] > 0.0 and abs(total - 1.0) > NORM_TOL:
            raise FormatError(
                f"document {doc_id!r} weights have squared length {total!r} (truncated file?)", end, path
            )
    return InvertedIndex(n_docs, terms, norms)


def load_index(path: str | Path) -> InvertedIndex:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return loads_index(text, str(path))


def unit_norm_defects(idx: InvertedIndex) -> dict[str, float]:
    """|1 - sum of squared weights| for every document that has postings."""
    squares: dict[str, list[float]] = {}
    for entry in idx.terms.values():
        for p in entry.postings:
            squares.setdefault(p.doc_id, []).append(p.weight * p.weight)
    return {d: abs(1.0 - math.fsum(sq)) for d, sq in sorted(squares.items())}


def vocabulary_of(docs: Iterable[Document]) -> set[str]:
    return {t for d in docs for s in d.sentences for t in s.terms}
