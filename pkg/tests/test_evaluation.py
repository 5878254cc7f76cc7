import csv

import pytest
from hypothesis import given
from hypothesis import strategies as st

from condensa.errors import EmptyRelevantSetError, FormatError, NoQueriesError
from condensa.evaluation import (
    auto_qrels,
    average_precision,
    evaluate,
    hit_points,
    interpolate_11pt,
    load_qrels,
    mean_average_precision,
    r_precision,
    set_metrics,
    write_aggregate_csv,
    write_curve_csv,
    write_per_query_csv,
    write_qrels,
)
from condensa.retrieval import Hit, RankedList

from .metric_cases import CASES, interp_vector


def ranked(qid, docs):
    return RankedList(qid, tuple(Hit(d, 1.0 / (k + 1), k + 1) for k, d in enumerate(docs)))


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_hand_computed(case):
    rk, rel = case["ranking"], case["relevant"]
    for got, want in zip(set_metrics(rk, rel), case["prf"]):
        assert got == pytest.approx(float(want), abs=1e-12)
    assert average_precision(rk, rel) == pytest.approx(float(case["ap"]), abs=1e-12)
    assert r_precision(rk, rel) == pytest.approx(float(case["rprec"]), abs=1e-12)
    pts = hit_points(rk, rel)
    assert len(pts) == len(case["points"])
    for (r, p), (wr, wp) in zip(pts, case["points"]):
        assert r == pytest.approx(float(wr), abs=1e-12) and p == pytest.approx(float(wp), abs=1e-12)
    assert interpolate_11pt(pts) == pytest.approx(interp_vector(case), abs=1e-12)


def test_map_over_cases():
    aps = [average_precision(c["ranking"], c["relevant"]) for c in CASES]
    want = sum(c["ap"] for c in CASES) / len(CASES)
    assert mean_average_precision(aps) == pytest.approx(float(want), abs=1e-12)


class TestSmall:
    def test_set_metrics_example(self):
        assert set_metrics(["a", "b", "c"], {"a", "b", "c"}) == (1.0, 1.0, 1.0)
        assert set_metrics(["a"], {"b"}) == (0.0, 0.0, 0.0)

    def test_rprec_examples(self):
        assert r_precision(["a", "b"], {"a", "b"}) == 1.0
        assert r_precision(["a", "x"], {"a", "b"}) == 0.5

    def test_map_examples(self):
        assert mean_average_precision([0.25]) == 0.25
        assert mean_average_precision([1.0, 0.0]) == 0.5
        with pytest.raises(NoQueriesError):
            mean_average_precision([])

    def test_interp_example(self):
        levels = interpolate_11pt([(0.55, 1.0), (1.0, 0.5)])
        assert levels == [0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0, 0.5]
        assert interpolate_11pt([]) == [0.0] * 11

    def test_standard_mode(self):
        levels = interpolate_11pt([(0.55, 1.0), (1.0, 0.5)], mode="standard")
        assert levels == [1.0] * 6 + [0.5] * 5
        with pytest.raises(ValueError):
            interpolate_11pt([], mode="trec")

    def test_float_recall_binning(self):
        # 0.1 * 3 is 0.30000000000000004, 0.7 * 10 is 7.000000000000001
        assert interpolate_11pt([(0.1 * 3, 0.9)])[3] == 0.9
        assert interpolate_11pt([(3 / 10, 0.8)])[3] == 0.8

    @pytest.mark.parametrize("fn", [set_metrics, hit_points, average_precision, r_precision])
    def test_empty_relevant(self, fn):
        with pytest.raises(EmptyRelevantSetError):
            fn(["a"], set())


class TestAutoQrels:
    def test_baseline_list_is_relevant(self):
        q = auto_qrels([ranked("dep", ["317", "203", "294"])])
        assert q == {"dep": frozenset({"317", "203", "294"})}

    def test_empty_baseline_skipped(self, caplog):
        q = auto_qrels([ranked("a", []), ranked("b", ["x"])])
        assert list(q) == ["b"]
        assert "empty baseline" in caplog.text

    def test_missing_one_of_fourteen(self):
        base = ranked("q", [f"d{k}" for k in range(14)])
        summ = ranked("q", [f"d{k}" for k in range(13)])
        rep = evaluate([summ], auto_qrels([base]))
        assert rep.per_query["q"].recall == pytest.approx(13 / 14, abs=1e-15)

    @given(st.lists(st.lists(st.sampled_from("abcdefghij"), min_size=1, unique=True), min_size=1, max_size=5))
    def test_self_identity(self, lists):
        runs = [ranked(str(k), docs) for k, docs in enumerate(lists)]
        rep = evaluate(runs, auto_qrels(runs))
        assert rep.map == 1.0 and rep.mean_recall == 1.0
        assert all(q.precision == 1.0 and q.ap == 1.0 for q in rep.per_query.values())


class TestInvariants:
    rankings = st.lists(st.sampled_from("abcdefghijkl"), unique=True, max_size=12)
    relsets = st.frozensets(st.sampled_from("abcdefghijkl"), min_size=1)

    @given(rankings, relsets)
    def test_ranges_and_steps(self, rk, rel):
        pts = hit_points(rk, rel)
        for k, (r, p) in enumerate(pts, start=1):
            assert r == pytest.approx(k / len(rel))
            assert 0 < p <= 1
        ap = average_precision(rk, rel)
        assert 0 <= ap <= 1
        assert (ap == pytest.approx(1.0)) == (set(rk[: len(rel)]) == rel)
        assert all(0 <= x <= 1 for x in set_metrics(rk, rel))

    @given(rankings, relsets)
    def test_standard_non_increasing(self, rk, rel):
        levels = interpolate_11pt(hit_points(rk, rel), "standard")
        assert all(a >= b for a, b in zip(levels, levels[1:]))

    @given(rankings, relsets)
    def test_renaming_invariance(self, rk, rel):
        rename = {c: c.upper() + "_" for c in "abcdefghijkl"}
        rk2 = [rename[d] for d in rk]
        rel2 = {rename[d] for d in rel}
        assert set_metrics(rk, rel) == set_metrics(rk2, rel2)
        assert average_precision(rk, rel) == average_precision(rk2, rel2)
        assert interpolate_11pt(hit_points(rk, rel)) == interpolate_11pt(hit_points(rk2, rel2))


class TestEvaluate:
    def test_missing_run_scores_zero(self):
        rep = evaluate([ranked("1", ["a"])], {"1": {"a"}, "2": {"b"}})
        assert rep.per_query["2"].ap == 0.0 and rep.per_query["2"].recall == 0.0
        assert rep.map == 0.5

    def test_unjudged_query_ignored(self, caplog):
        rep = evaluate([ranked("1", ["a"]), ranked("9", ["z"])], {"1": {"a"}})
        assert list(rep.per_query) == ["1"]
        assert "no relevance judgments" in caplog.text

    def test_aggregates(self):
        c0, c1 = CASES[0], CASES[6]
        runs = [ranked("a", c0["ranking"]), ranked("b", c1["ranking"])]
        rep = evaluate(runs, {"a": c0["relevant"], "b": c1["relevant"]})
        assert rep.map == pytest.approx(float((c0["ap"] + c1["ap"]) / 2), abs=1e-12)
        assert rep.mean_recall == pytest.approx(float((c0["prf"][1] + c1["prf"][1]) / 2), abs=1e-12)
        want = [(x + y) / 2 for x, y in zip(interp_vector(c0), interp_vector(c1))]
        assert rep.interp11 == pytest.approx(want, abs=1e-12)

    def test_csv_outputs(self, tmp_path):
        rep = evaluate([ranked("a", ["r0", "x", "r1"])], {"a": {"r0", "r1"}})
        write_per_query_csv(rep, tmp_path / "pq.csv")
        write_aggregate_csv(rep, tmp_path / "agg.csv")
        write_curve_csv(rep, tmp_path / "curve.csv")
        pq = list(csv.reader(open(tmp_path / "pq.csv")))
        assert pq[0] == ["query_id", "P", "R", "F", "r_prec", "AP"]
        assert float(pq[1][5]) == pytest.approx(5 / 6, abs=1e-15)
        agg = list(csv.reader(open(tmp_path / "agg.csv")))
        assert agg[0] == ["recall", "MAP"] + [f"r{i}" for i in range(11)] + ["interp"]
        curve = list(csv.reader(open(tmp_path / "curve.csv")))
        assert len(curve) == 12 and curve[0] == ["recall_level", "avg_precision", "interp"]
        assert [r[0] for r in curve[1:]] == [f"{i / 10:.1f}" for i in range(11)]


class TestQrelsFile:
    def test_round_trip(self, tmp_path):
        q = {"3": frozenset({"14", "24", "53"}), "4": frozenset({"7"})}
        write_qrels(q, tmp_path / "q.tsv")
        assert load_qrels(tmp_path / "q.tsv") == q

    def test_twenty_three_relevant(self, tmp_path):
        ids = [14, 24, 53, 71] + list(range(100, 119))
        (tmp_path / "q.tsv").write_text("".join(f"3\t{d}\n" for d in ids), encoding="utf-8")
        assert len(load_qrels(tmp_path / "q.tsv")["3"]) == 23

    @pytest.mark.parametrize("bad", ["3 14\n", "3\t14\textra\n", "\t14\n"])
    def test_malformed(self, tmp_path, bad):
        (tmp_path / "q.tsv").write_text("1\ta\n\n" + bad, encoding="utf-8")
        with pytest.raises(FormatError) as exc:
            load_qrels(tmp_path / "q.tsv")
        assert exc.value.line == 3
