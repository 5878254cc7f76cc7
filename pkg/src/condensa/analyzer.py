"""Sentence splitting and term analysis.

A document is split into sentences on ``.``, ``!``, ``?`` runs and on blank
lines; every sentence is then case-folded, tokenized on non-alphanumeric
characters, stopword-filtered and stemmed.  Downstream modules only ever see
the resulting stem sequences, so swapping the stemmer or stopword list is
enough to plug in another language.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import porter
from .errors import ConfigError

STEMMERS: dict[str, Callable[[str], str]] = {
    "porter": porter.stem,
    "identity": lambda token: token,
}

# A run of terminators, or a blank line (paragraph break).
_BOUNDARY_RE = re.compile(r"[.!?]+|\n[^\S\n]*\n\s*")
_TOKEN_RE = re.compile(r"[^\W_]+")


def _read_word_list(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.casefold())
    return frozenset(words)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file: one word per line, ``#`` starts a comment line."""
    with open(path, encoding="utf-8") as fh:
        return _read_word_list(fh)


def default_stopwords() -> frozenset[str]:
    text = resources.files("condensa").joinpath("data/stopwords_en.txt").read_text(encoding="utf-8")
    return _read_word_list(text.splitlines())


@dataclass(frozen=True)
class AnalyzerConfig:
    stopwords: frozenset[str] = field(default_factory=default_stopwords, repr=False)
    stemmer: str = "porter"
    min_token_len: int = 2
    stopwords_source: str = "bundled:stopwords_en.txt"

    def __post_init__(self):
        if self.stemmer not in STEMMERS:
            raise ConfigError(f"unknown stemmer {self.stemmer!r}; expected one of {sorted(STEMMERS)}")
        if self.min_token_len < 1:
            raise ConfigError("min_token_len must be >= 1")

    @property
    def stem(self) -> Callable[[str], str]:
        return STEMMERS[self.stemmer]

    @classmethod
    def from_file(cls, path: str | Path) -> "AnalyzerConfig":
        """Load ``key = value`` settings (stopwords, stemmer, min_token_len).

        A relative stopwords path is resolved against the config file's
        directory; ``bundled`` selects the built-in English list and ``none``
        disables stopword removal.
        """
        path = Path(path)
        parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
        try:
            parser.read_string("[analyzer]\n" + path.read_text(encoding="utf-8"), source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        section = parser["analyzer"]
        unknown = set(section) - {"stopwords", "stemmer", "min_token_len"}
        if unknown:
            raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")

        kwargs = {}
        sw = section.get("stopwords", "bundled").strip()
        if sw.lower() == "none":
            kwargs["stopwords"] = frozenset()
            kwargs["stopwords_source"] = "none"
        elif sw.lower() != "bundled":
            sw_path = Path(sw)
            if not sw_path.is_absolute():
                sw_path = path.parent / sw_path
            try:
                kwargs["stopwords"] = load_stopwords(sw_path)
            except OSError as exc:
                raise ConfigError(f"{path}: cannot read stopwords file {sw_path}: {exc}") from exc
            kwargs["stopwords_source"] = str(sw_path)
        kwargs["stemmer"] = section.get("stemmer", "porter").strip()
        try:
            kwargs["min_token_len"] = int(section.get("min_token_len", "2"))
        except ValueError as exc:
            raise ConfigError(f"{path}: min_token_len must be an integer") from exc
        return cls(**kwargs)

    def describe(self) -> dict:
        return {
            "stopwords": self.stopwords_source,
            "stopword_count": len(self.stopwords),
            "stemmer": self.stemmer,
            "min_token_len": self.min_token_len,
        }


@dataclass(frozen=True)
class Sentence:
    sent_idx: int
    raw: str
    terms: tuple[str, ...]


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    sentences: tuple[Sentence, ...]

    @property
    def n_terms(self) -> int:
        return sum(len(s.terms) for s in self.sentences)


def split_sentences(text: str) -> list[str]:
    """Split ``text`` into trimmed sentence spans in document order.

    >>> split_sentences("A b. C d!")
    ['A b.', 'C d!']
    """
    spans = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        if match.group()[0] in ".!?":
            piece = text[start:match.end()]
        else:
            piece = text[start:match.start()]
        start = match.end()
        piece = piece.strip()
        if piece:
            spans.append(piece)
    tail = text[start:].strip()
    if tail:
        spans.append(tail)
    return spans


def analyze(raw: str, config: AnalyzerConfig | None = None) -> list[str]:
    """Turn a sentence span into its ordered list of stems."""
    config = config or DEFAULT_CONFIG
    stem = config.stem
    stopwords = config.stopwords
    terms = []
    for token in _TOKEN_RE.findall(raw.casefold()):
        if len(token) < config.min_token_len or token in stopwords:
            continue
        term = stem(token)
        # a stem may collide with a stopword ("wills" -> "will")
        if term and term not in stopwords:
            terms.append(term)
    return terms


def build_document(doc_id: str, text: str, config: AnalyzerConfig | None = None) -> Document:
    sentences = tuple(
        Sentence(idx, raw, tuple(analyze(raw, config)))
        for idx, raw in enumerate(split_sentences(text))
    )
    return Document(doc_id, text, sentences)


def rebuild_document(doc_id: str, sentences: Sequence[Sentence]) -> Document:
    """Assemble a document from already-analyzed sentences, renumbering them.

    Sentences are joined with blank lines so that re-splitting the text
    yields the same spans.
    """
    renumbered = tuple(Sentence(i, s.raw, s.terms) for i, s in enumerate(sentences))
    return Document(doc_id, "\n\n".join(s.raw for s in renumbered), renumbered)


DEFAULT_CONFIG = AnalyzerConfig()
