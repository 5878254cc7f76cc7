"""Sentence-pair similarities used by the first two summarizer layers."""

from __future__ import annotations

import math
from collections import Counter
from typing import AbstractSet, Mapping

from .analyzer import Document
from .errors import EmptySetError

SentenceVector = dict[str, float]


def term_set(terms) -> frozenset[str]:
    return frozenset(terms)


def jaccard_overlap(a: AbstractSet[str], b: AbstractSet[str]) -> float:
    """Shared stems divided by the size of the smaller stem set.

    The denominator is ``min(|a|, |b|)``, not the union size, so any subset
    relation scores 1.0.
    """
    if not a or not b:
        raise EmptySetError("overlap coefficient is undefined for an empty stem set")
    return len(a & b) / min(len(a), len(b))


def sentence_vectors(doc: Document) -> list[SentenceVector]:
    """tf-idf vector of every sentence, with idf taken over the document's sentences.

    weight = (1 + log10 f) * log10(N_s / sdf), where N_s counts all sentences
    of ``doc`` and sdf the sentences containing the term.  Zero weights are
    not stored.
    """
    n_sent = len(doc.sentences)
    counts = [Counter(s.terms) for s in doc.sentences]
    sdf: Counter[str] = Counter()
    for c in counts:
        sdf.update(c.keys())
    idf = {term: math.log10(n_sent / df) for term, df in sdf.items() if df < n_sent}

    vectors = []
    for c in counts:
        vec = {}
        for term in sorted(c):
            w = idf.get(term)
            if w:
                vec[term] = (1.0 + math.log10(c[term])) * w
        vectors.append(vec)
    return vectors


def norm(vec: Mapping[str, float]) -> float:
    return math.sqrt(math.fsum(w * w for w in vec.values()))


def cosine(u: Mapping[str, float], v: Mapping[str, float]) -> float:
    """Cosine of two sparse vectors; 0.0 when either has zero length."""
    nu, nv = norm(u), norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = math.fsum(w * v[t] for t, w in u.items() if t in v)
    return min(1.0, dot / (nu * nv))
