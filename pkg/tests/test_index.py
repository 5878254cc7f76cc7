import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condensa.errors import DuplicateDocIdError, EmptyCorpusError, FormatError, InvalidStatsError
from condensa.harness import load_queries
from condensa.index import (
    build_index,
    dumps_index,
    index_stats,
    load_index,
    loads_index,
    save_index,
    term_weight,
    unit_norm_defects,
    vocabulary_of,
)
from condensa.retrieval import search
from condensa.summarizer import ExtractorConfig, Model, summarize_corpus

from .conftest import DATA, QUERIES10, dense_scores, doc_from_terms, random_corpus

# scores of the first three fixture queries, frozen from the golden file
# after checking them against the dense oracle
GOLDEN_SCORES = {
    "1": [("d01", 0.3390270665205567), ("d05", 0.19448974767398128), ("d10", 0.0514346970903543),
          ("d08", 0.042085684472615126)],
    "2": [("d02", 0.30731102631783114), ("d07", 0.24171196135428086)],
    "3": [("d04", 0.3114582278738775), ("d01", 0.046956945346384074), ("d08", 0.046457216587483086),
          ("d10", 0.038437827237790774)],
}


class TestTermWeight:
    def test_examples(self):
        assert term_weight(10, 100, 10) == pytest.approx(2.0, abs=1e-15)
        assert term_weight(1, 10, 1) == pytest.approx(1.0, abs=1e-15)
        assert term_weight(5, 7, 7) == 0.0
        assert term_weight(0, 7, 3) == 0.0

    @pytest.mark.parametrize("f,n,df", [(1, 5, 6), (1, 5, 0), (-1, 5, 2)])
    def test_invalid(self, f, n, df):
        with pytest.raises(InvalidStatsError):
            term_weight(f, n, df)


class TestBuild:
    def test_single_document_is_empty(self):
        idx = build_index([doc_from_terms("a", [["x", "y"]])])
        assert idx.n_docs == 1 and idx.terms == {}

    def test_two_docs(self, two_doc_corpus):
        idx = build_index(two_doc_corpus)
        # banana is in both documents and drops out
        assert list(idx.terms) == ["apple", "cherry", "date"]
        wa = (1 + math.log10(2)) * math.log10(2)
        wc = math.log10(2)
        norm_a = math.sqrt(wa * wa + wc * wc)
        assert idx.doc_norms["A"] == pytest.approx(norm_a, abs=1e-15)
        assert idx.terms["apple"].postings[0].weight == pytest.approx(wa / norm_a, abs=1e-15)
        assert idx.terms["cherry"].postings[0].weight == pytest.approx(wc / norm_a, abs=1e-15)
        assert idx.terms["date"].postings[0].weight == pytest.approx(1.0, abs=1e-15)
        assert [p.doc_id for p in idx.terms["apple"].postings] == ["A"]

    def test_only_term_in_one_doc(self):
        idx = build_index([doc_from_terms("A", [["x"], ["s"]]), doc_from_terms("B", [["s"]])])
        assert list(idx.terms) == ["x"]
        assert idx.terms["x"].postings[0].weight == pytest.approx(1.0, abs=1e-15)
        assert idx.doc_norms["A"] == pytest.approx(math.log10(2), abs=1e-15)

    def test_errors(self):
        with pytest.raises(EmptyCorpusError):
            build_index([])
        with pytest.raises(DuplicateDocIdError):
            build_index([doc_from_terms("a", [["x"]]), doc_from_terms("a", [["y"]])])

    def test_structure_invariants(self, corpus10):
        idx = build_index(corpus10)
        assert list(idx.terms) == sorted(idx.terms)
        for entry in idx.terms.values():
            ids = [p.doc_id for p in entry.postings]
            assert entry.df == len(ids) == len(set(ids)) and ids == sorted(ids)
            assert all(p.weight > 0 for p in entry.postings)
        assert max(unit_norm_defects(idx).values()) <= 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_unit_norm_random(self, seed):
        idx = build_index(random_corpus(random.Random(seed), max_docs=15, max_sents=6))
        assert all(d <= 1e-9 for d in unit_norm_defects(idx).values())

    def test_rebuild_byte_identical(self, corpus10):
        assert dumps_index(build_index(corpus10)) == dumps_index(build_index(list(reversed(corpus10))))

    def test_summary_vocabulary_subset(self, corpus10):
        base = build_index(corpus10)
        for model in Model:
            summary = summarize_corpus(corpus10, ExtractorConfig(model))
            idx = build_index(summary.documents)
            assert vocabulary_of(summary.documents) <= vocabulary_of(corpus10)
            assert idx.vocabulary <= base.vocabulary
            assert index_stats(idx, base).ratio_to_baseline <= 1.0


class TestStats:
    def test_self_ratio(self, corpus10):
        idx = build_index(corpus10)
        st_ = index_stats(idx, idx)
        assert st_.ratio_to_baseline == 1.0
        assert st_.distinct_terms == len(idx.terms)
        assert st_.total_postings == sum(len(e.postings) for e in idx.terms.values())

    def test_no_baseline(self, two_doc_corpus):
        assert index_stats(build_index(two_doc_corpus)).ratio_to_baseline is None


class TestPersistence:
    def test_round_trip_two_docs(self, two_doc_corpus, tmp_path):
        idx = build_index(two_doc_corpus)
        save_index(idx, tmp_path / "i.idx")
        assert load_index(tmp_path / "i.idx") == idx

    def test_round_trip_empty_index(self, tmp_path):
        idx = build_index([doc_from_terms("a", [["x"]])])
        save_index(idx, tmp_path / "i.idx")
        assert load_index(tmp_path / "i.idx") == idx

    def test_format_header(self, two_doc_corpus):
        lines = dumps_index(build_index(two_doc_corpus)).splitlines()
        assert lines[:2] == ["#condensa-index v1", "N 2"]
        assert lines[2].startswith("D A ") and lines[3] == f"D B {math.log10(2):.17g}"
        assert lines[-1] == "T date 1 B:1"

    def test_golden_file(self, tmp_path):
        idx = load_index(DATA / "golden.idx")
        from condensa.harness import load_corpus

        corpus = load_corpus(DATA / "corpus10")
        assert dumps_index(build_index(corpus)) == (DATA / "golden.idx").read_text(encoding="utf-8")
        for q in load_queries(QUERIES10):
            got = search(q, idx)
            oracle = dense_scores(corpus, list(q.terms))
            for h in got.hits:
                assert h.score == pytest.approx(oracle[h.doc_id], abs=1e-12)
            if q.query_id in GOLDEN_SCORES:
                want = GOLDEN_SCORES[q.query_id]
                assert [h.doc_id for h in got.hits] == [d for d, _ in want]
                for h, (_, s) in zip(got.hits, want):
                    assert h.score == pytest.approx(s, abs=1e-12)

    def test_truncated_file_names_line(self, corpus10):
        text = dumps_index(build_index(corpus10))
        cut = text[: len(text) // 2]
        with pytest.raises(FormatError) as exc:
            loads_index(cut, "x.idx")
        assert exc.value.line == cut.count("\n") + 1
        assert "x.idx:" in str(exc.value)

    def test_dropped_trailing_lines(self, corpus10):
        lines = dumps_index(build_index(corpus10)).splitlines(keepends=True)
        with pytest.raises(FormatError, match="truncated"):
            loads_index("".join(lines[:-3]))

    @pytest.mark.parametrize("text,line", [
        ("", 1),
        ("bogus\n", 1),
        ("#condensa-index v1\nX 2\n", 2),
        ("#condensa-index v1\nN 1\nD a 1\nD a 1\n", 4),
        ("#condensa-index v1\nN 2\nD a 1\nT x 1 a:1\n", 4),
        ("#condensa-index v1\nN 2\nD a 1\nD b 1\nT x 2 a:1\n", 5),
        ("#condensa-index v1\nN 2\nD a 1\nD b 1\nT x 1 c:1\n", 5),
        ("#condensa-index v1\nN 2\nD a 1\nD b 1\nT x 1 a:nan\n", 5),
        ("#condensa-index v1\nN 2\nD a 1\nD b 1\nT y 1 a:1\nT x 1 b:1\n", 6),
        ("#condensa-index v1\nN 2\nD a 1\nD b 1\nQ\n", 5),
    ])
    def test_malformed(self, text, line):
        with pytest.raises(FormatError) as exc:
            loads_index(text)
        assert exc.value.line == line

    def test_unwritable_ids(self):
        idx = build_index([doc_from_terms("a b", [["x"]]), doc_from_terms("c", [["y"]])])
        with pytest.raises(FormatError):
            dumps_index(idx)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_round_trip(self, seed):
        idx = build_index(random_corpus(random.Random(seed), max_docs=12, max_sents=5))
        back = loads_index(dumps_index(idx))
        assert back == idx
