"""Extractive summaries by deleting redundant sentences.

Four redundancy detectors are available: the stem-overlap coefficient (JAC),
the sentence tf-idf cosine (VSM), the reduced-space LSA cosine (LSA) and
the MLS cascade, which only consults the next layer when the previous one
scored below its threshold.  Sentences are scanned in document order and a
sentence is dropped the first time it is redundant with an earlier kept one.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

from .analyzer import Document, rebuild_document
from .errors import ConfigError, DegenerateDocumentError, NoConvergenceError
from .lsa import LsaSpace, build_lsa_space, lsa_similarity
from .similarity import cosine, jaccard_overlap, sentence_vectors

log = logging.getLogger(__name__)


class Layer(str, Enum):
    JAC = "JAC"
    VSM = "VSM"
    LSA = "LSA"


class Model(str, Enum):
    JAC = "JAC"
    VSM = "VSM"
    LSA = "LSA"
    MLS = "MLS"

    @classmethod
    def parse(cls, value: "str | Model") -> "Model":
        try:
            return cls(str(value.value if isinstance(value, Model) else value).upper())
        except ValueError:
            raise ConfigError(f"unknown model {value!r}; expected one of jac, vsm, lsa, mls") from None


@dataclass(frozen=True)
class ExtractorConfig:
    model: Model = Model.MLS
    jac_threshold: float = 0.5
    vsm_threshold: float = 0.5
    lsa_threshold: float = 0.5
    lsa_energy: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        for name in ("jac_threshold", "vsm_threshold", "lsa_threshold", "lsa_energy"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ConfigError(f"{name} must lie in (0, 1], got {value}")

    def threshold(self, layer: Layer) -> float:
        return {
            Layer.JAC: self.jac_threshold,
            Layer.VSM: self.vsm_threshold,
            Layer.LSA: self.lsa_threshold,
        }[layer]


@dataclass(frozen=True)
class Removal:
    sent_idx: int
    duplicate_of: int
    layer: Layer
    score: float
    # scores of the cheaper layers consulted before ``layer`` fired
    preceding: tuple[tuple[Layer, float], ...] = ()


@dataclass(frozen=True)
class SummaryResult:
    doc_id: str
    model: Model
    kept: tuple[int, ...]
    removed: tuple[Removal, ...]
    condensation_rate: float
    lsa_invocations: int
    pairwise_comparisons: int


class SentenceComparator:
    """Pairwise similarities of one document, with the LSA space built on first use."""

    def __init__(self, doc: Document, cfg: ExtractorConfig, space: LsaSpace | None = None):
        self.doc = doc
        self.cfg = cfg
        self.term_sets = [frozenset(s.terms) for s in doc.sentences]
        self.vectors = sentence_vectors(doc) if doc.sentences else []
        self._space = space
        self._space_ready = space is not None
        self.lsa_invocations = 0
        self.lsa_builds = 0

    @property
    def space(self) -> LsaSpace | None:
        if not self._space_ready:
            self._space_ready = True
            self.lsa_builds += 1
            try:
                self._space = build_lsa_space(self.doc, self.cfg.lsa_energy, self.vectors)
            except (DegenerateDocumentError, NoConvergenceError) as exc:
                log.debug("LSA unavailable for %s: %s", self.doc.doc_id, exc)
                self._space = None
        return self._space

    def jaccard(self, i: int, j: int) -> float:
        return jaccard_overlap(self.term_sets[i], self.term_sets[j])

    def vsm(self, i: int, j: int) -> float:
        return cosine(self.vectors[i], self.vectors[j])

    def lsa(self, i: int, j: int) -> float:
        self.lsa_invocations += 1
        space = self.space
        return 0.0 if space is None else lsa_similarity(space, i, j)

    def mls(self, i: int, j: int) -> tuple[float, Layer]:
        score, layer, _ = self._cascade(i, j)
        return score, layer

    def _cascade(self, i, j):
        jac = self.jaccard(i, j)
        if jac >= self.cfg.jac_threshold:
            return jac, Layer.JAC, ()
        vsm = self.vsm(i, j)
        if vsm >= self.cfg.vsm_threshold:
            return vsm, Layer.VSM, ((Layer.JAC, jac),)
        return self.lsa(i, j), Layer.LSA, ((Layer.JAC, jac), (Layer.VSM, vsm))

    def compare(self, i: int, j: int) -> tuple[float, Layer, tuple]:
        """Score of the pair under the configured model, its layer and the skipped-layer trace."""
        model = self.cfg.model
        if model is Model.MLS:
            return self._cascade(i, j)
        if model is Model.JAC:
            return self.jaccard(i, j), Layer.JAC, ()
        if model is Model.VSM:
            return self.vsm(i, j), Layer.VSM, ()
        return self.lsa(i, j), Layer.LSA, ()


def mls_similarity(doc: Document, space: LsaSpace | None, i: int, j: int,
                   cfg: ExtractorConfig | None = None) -> tuple[float, Layer]:
    """Cascade similarity of sentences i and j.

    ``space`` may be None, in which case the LSA space is only built if the
    pair falls through to the third layer.
    """
    if i == j:
        raise ValueError("mls_similarity needs two distinct sentences")
    return SentenceComparator(doc, cfg or ExtractorConfig(), space).mls(i, j)


def extract(doc: Document, cfg: ExtractorConfig | None = None) -> SummaryResult:
    cfg = cfg or ExtractorConfig()
    cmp = SentenceComparator(doc, cfg)
    kept: list[int] = []
    removed: list[Removal] = []
    comparisons = 0

    for j, sent in enumerate(doc.sentences):
        if not sent.terms:
            # nothing to compare; stopword-only sentences are never judged redundant
            kept.append(j)
            continue
        for i in kept:
            if not doc.sentences[i].terms:
                continue
            comparisons += 1
            score, layer, preceding = cmp.compare(i, j)
            if score >= cfg.threshold(layer):
                removed.append(Removal(j, i, layer, score, preceding))
                break
        else:
            kept.append(j)

    total_terms = doc.n_terms
    if total_terms:
        kept_terms = sum(len(doc.sentences[k].terms) for k in kept)
        cr = kept_terms / total_terms
    else:
        cr = 1.0
    return SummaryResult(
        doc_id=doc.doc_id,
        model=cfg.model,
        kept=tuple(kept),
        removed=tuple(removed),
        condensation_rate=cr,
        lsa_invocations=cmp.lsa_invocations,
        pairwise_comparisons=comparisons,
    )


def summary_document(doc: Document, result: SummaryResult) -> Document:
    return rebuild_document(doc.doc_id, [doc.sentences[k] for k in result.kept])


@dataclass
class CorpusSummary:
    model: Model
    results: list[SummaryResult] = field(default_factory=list)
    documents: list[Document] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def total_lsa_invocations(self) -> int:
        return sum(r.lsa_invocations for r in self.results)

    @property
    def total_pairwise_comparisons(self) -> int:
        return sum(r.pairwise_comparisons for r in self.results)

    @property
    def mean_condensation_rate(self) -> float:
        if not self.results:
            return 0.0
        return sum(r.condensation_rate for r in self.results) / len(self.results)


def _extract_safe(args):
    doc, cfg = args
    try:
        return extract(doc, cfg), None
    except Exception as exc:  # one bad document must not sink the corpus
        return None, f"{type(exc).__name__}: {exc}"


def summarize_corpus(corpus: Sequence[Document], cfg: ExtractorConfig | None = None,
                     workers: int | None = None) -> CorpusSummary:
    """Summarize every document; failures are recorded and the document dropped."""
    cfg = cfg or ExtractorConfig()
    jobs = [(doc, cfg) for doc in corpus]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_extract_safe, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        outcomes = [_extract_safe(job) for job in jobs]

    summary = CorpusSummary(cfg.model)
    for doc, (result, error) in zip(corpus, outcomes):
        if error is not None:
            log.warning("summarizing %s failed: %s", doc.doc_id, error)
            summary.failures.append((doc.doc_id, error))
            continue
        summary.results.append(result)
        summary.documents.append(summary_document(doc, result))
    return summary


REPORT_COLUMNS = ("doc_id", "model", "kept", "removed", "cr", "lsa_invocations")


def write_summary_report(results: Sequence[SummaryResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in results:
            writer.writerow([r.doc_id, r.model.value, len(r.kept), len(r.removed),
                             repr(r.condensation_rate), r.lsa_invocations])


def write_summaries(documents: Sequence[Document], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for doc in documents:
        path = out_dir / f"{doc.doc_id}.txt"
        path.write_text(doc.text + "\n", encoding="utf-8")
        paths.append(path)
    return paths
