from __future__ import annotations

import math
import random
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from condensa.analyzer import AnalyzerConfig, Document, Sentence, build_document

DATA = Path(__file__).parent / "data"
CORPUS10 = DATA / "corpus10"
CASCADE = DATA / "cascade"
QUERIES10 = DATA / "queries10.tsv"
QRELS10 = DATA / "qrels10.tsv"

IDENTITY = AnalyzerConfig(stopwords=frozenset(), stemmer="identity", min_token_len=1)


def doc_from_terms(doc_id: str, sentences: list[list[str]]) -> Document:
    """Document whose sentences carry exactly the given terms (no analysis)."""
    sents = tuple(Sentence(i, " ".join(t), tuple(t)) for i, t in enumerate(sentences))
    return Document(doc_id, "\n\n".join(s.raw for s in sents), sents)


def random_corpus(rng: random.Random, max_docs: int = 50, max_sents: int = 30, vocab: int = 40) -> list[Document]:
    words = [f"t{k:03d}" for k in range(vocab)]
    docs = []
    for d in range(rng.randint(1, max_docs)):
        sents = []
        for _ in range(rng.randint(1, max_sents)):
            sents.append([rng.choice(words) for _ in range(rng.randint(1, 8))])
        docs.append(doc_from_terms(f"doc{d:03d}", sents))
    return docs


def dense_scores(corpus: list[Document], query_terms: list[str]) -> dict[str, float]:
    """Brute-force cosine over full dense tf-idf vectors, no inverted index involved."""
    n = len(corpus)
    tfs = [Counter(t for s in d.sentences for t in s.terms) for d in corpus]
    vocab = sorted({t for tf in tfs for t in tf})
    pos = {t: k for k, t in enumerate(vocab)}
    df = np.zeros(len(vocab))
    for tf in tfs:
        for t in tf:
            df[pos[t]] += 1

    def weigh(tf: Counter) -> np.ndarray:
        v = np.zeros(len(vocab))
        for t, f in tf.items():
            if t in pos and f > 0:
                v[pos[t]] = (1 + math.log10(f)) * math.log10(n / df[pos[t]])
        return v

    q = weigh(Counter(query_terms))
    qn = np.linalg.norm(q)
    out = {}
    for doc, tf in zip(corpus, tfs):
        d = weigh(tf)
        dn = np.linalg.norm(d)
        out[doc.doc_id] = 0.0 if qn == 0 or dn == 0 else float(d @ q / (dn * qn))
    return out


def dense_ranking(scores: dict[str, float]) -> list[tuple[str, float]]:
    return sorted(((d, s) for d, s in scores.items() if s > 1e-15), key=lambda x: (-x[1], x[0]))


@pytest.fixture
def corpus10():
    from condensa.harness import load_corpus

    return load_corpus(CORPUS10)


@pytest.fixture
def two_doc_corpus():
    cfg = IDENTITY
    return [
        build_document("A", "apple banana apple cherry", cfg),
        build_document("B", "banana date", cfg),
    ]


def redundant_corpus_texts(seed: int, n_docs: int = 200) -> dict[str, str]:
    """Synthetic topical documents with planted sentence-level redundancy.

    Every document draws sentences from one topic vocabulary plus a shared
    background vocabulary, then receives a few extra sentences that are
    verbatim copies, one-word edits (with a rare word) or half-rewritten
    paraphrases of earlier ones.
    """
    rng = random.Random(seed)
    background = [f"bg{k:03d}" for k in range(300)]
    topics = [[f"tp{t:02d}w{k:02d}" for k in range(40)] for t in range(25)]
    rare = [f"rv{k:04d}" for k in range(5000)]
    texts = {}
    for d in range(n_docs):
        topic = topics[rng.randrange(len(topics))]

        def fresh():
            return [rng.choice(topic) if rng.random() < 0.6 else rng.choice(background)
                    for _ in range(rng.randint(5, 9))]

        sents = [fresh() for _ in range(rng.randint(6, 12))]
        for _ in range(rng.randint(1, 4)):
            src = list(rng.choice(sents))
            kind = rng.random()
            if kind < 0.3:
                new = src
            elif kind < 0.65:
                new = src[:]
                new[rng.randrange(len(new))] = rng.choice(rare)
            else:
                new = [w if rng.random() < 0.5 else rng.choice(topic + rare[:200]) for w in src]
            sents.insert(rng.randint(1, len(sents)), new)
        texts[f"s{d:03d}"] = "\n".join(" ".join(s) + "." for s in sents) + "\n"
    return texts


def write_corpus(texts: dict[str, str], directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for doc_id, text in texts.items():
        (directory / f"{doc_id}.txt").write_text(text, encoding="utf-8")
    return directory


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
