import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from emokb import fixtures
from emokb.evaluate import (
    AblationReport,
    ClauseVector,
    ECEInstance,
    RatingMatrix,
    augment_clause_vector,
    ece_metrics,
    f_score,
    fleiss_kappa,
    indicator_feature,
    parse_ece_corpus,
    parse_ece_record,
    run_ece_ablation,
    sample_precision,
    segment_clause_spans,
    segment_clauses,
)
from oracles import (
    clause_split_oracle,
    ece_counts_oracle,
    fleiss_kappa_oracle,
    prf_oracle,
)


class TestSamplePrecision:
    def test_audit_counts(self):
        assert sample_precision(48, 2) == pytest.approx(0.96)
        assert sample_precision(0, 5) == 0.0
        assert sample_precision(5, 0) == 1.0

    def test_bad_counts_rejected(self):
        with pytest.raises(ValueError):
            sample_precision(0, 0)
        with pytest.raises(ValueError):
            sample_precision(-1, 3)


class TestRatingMatrix:
    def test_invariants(self):
        with pytest.raises(ValueError, match="at least one item"):
            RatingMatrix(rows=())
        with pytest.raises(ValueError, match="two raters"):
            RatingMatrix(rows=(("valid",),))
        with pytest.raises(ValueError, match="expected"):
            RatingMatrix(rows=(("a", "b"), ("a", "b", "c")))
        with pytest.raises(ValueError, match="empty rating"):
            RatingMatrix(rows=(("a", ""),))


class TestFleissKappa:
    def test_unanimous_with_two_categories_is_exactly_one(self):
        matrix = RatingMatrix(rows=(
            ("valid", "valid", "valid"),
            ("invalid", "invalid", "invalid"),
        ))
        assert fleiss_kappa(matrix) == 1.0

    def test_reference_two_item_fixture(self):
        """Item 1 unanimous valid, item 2 split 2 valid / 1 invalid:
        mean agreement 2/3 against chance agreement 13/18 gives -0.2."""
        matrix = RatingMatrix(rows=(
            ("valid", "valid", "valid"),
            ("valid", "valid", "invalid"),
        ))
        assert fleiss_kappa(matrix) == pytest.approx(-0.2, abs=1e-12)

    def test_single_category_everywhere_is_undefined(self):
        matrix = RatingMatrix(rows=(("valid", "valid"), ("valid", "valid")))
        assert fleiss_kappa(matrix) is None

    def test_brute_force_equivalence_all_small_matrices(self):
        """Every matrix with up to 4 items, 2 or 3 raters, 2 categories."""
        checked = 0
        for n_raters in (2, 3):
            row_types = list(itertools.product("ab", repeat=n_raters))
            for n_items in (1, 2, 3, 4):
                for rows in itertools.product(row_types, repeat=n_items):
                    got = fleiss_kappa(RatingMatrix(rows=rows))
                    want = fleiss_kappa_oracle(list(rows))
                    if want is None:
                        assert got is None, rows
                    else:
                        assert got == pytest.approx(float(want), abs=1e-12), rows
                    checked += 1
        assert checked == 340 + 4680

    @given(
        st.lists(
            st.lists(st.sampled_from(["a", "b", "c"]), min_size=3, max_size=3)
            .map(tuple),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_brute_force_equivalence_fuzzed_three_categories(self, rows):
        got = fleiss_kappa(RatingMatrix(rows=tuple(rows)))
        want = fleiss_kappa_oracle(rows)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(float(want), abs=1e-12)


class TestClauseSegmentation:
    def test_basic_split(self):
        text = "他走了，大家都很难过。后来他回来了！"
        assert segment_clauses(text) == ["他走了", "大家都很难过", "后来他回来了"]

    def test_enumeration_comma_not_a_delimiter(self):
        assert segment_clauses("苹果、香蕉、橘子，都很好吃。") == [
            "苹果、香蕉、橘子", "都很好吃",
        ]

    def test_spans_index_into_text(self):
        text = "  他走了 ，大家都很难过。"
        for clause, start, end in segment_clause_spans(text):
            assert text[start:end] == clause
            assert clause == clause.strip()

    def test_empty_segments_dropped(self):
        assert segment_clauses("，，。！") == []
        assert segment_clauses("他走了，，。") == ["他走了"]

    @given(st.text(alphabet="他走了好，。！？；、 　ab", max_size=60))
    @settings(max_examples=500, deadline=None)
    def test_matches_oracle(self, text):
        assert segment_clauses(text) == clause_split_oracle(text)

    @given(st.text(alphabet="他走了好，。！？；、ab", max_size=60))
    @settings(max_examples=200, deadline=None)
    def test_spans_always_align(self, text):
        for clause, start, end in segment_clause_spans(text):
            assert text[start:end] == clause


class TestECEParsing:
    def test_reference_record_geometry(self):
        """The worked instance: 8 clauses, the cause clause is the third
        (contains 遭到), the keyword clause follows it."""
        instance = parse_ece_record(fixtures.REFERENCE_ECE_RECORD)
        assert len(instance.clauses) == 8
        assert instance.cause_clauses == frozenset({2})
        assert "遭到" in instance.clauses[2]
        assert instance.clauses[2] == "遭到桂某等人殴打"
        assert instance.keyword_clause == 3
        assert "怨恨" in instance.clauses[3]

    def test_corpus_fixture_parses_clean(self, fixture_dir):
        instances, rejected = parse_ece_corpus(fixture_dir / "ece-sample.txt")
        assert rejected == []
        assert len(instances) == 5
        for instance in instances:
            assert instance.cause_clauses
            assert 0 <= instance.keyword_clause < len(instance.clauses)

    def test_cause_span_crossing_boundary_marks_both(self):
        record = "他<cause>丢了钱包，心情很差</cause>，一天没<keyword>开心</keyword>过。"
        instance = parse_ece_record(record)
        assert instance.cause_clauses == frozenset({0, 1})

    @pytest.mark.parametrize(
        "record,reason",
        [
            ("没有任何标注，平平无奇。", "keyword"),
            ("<cause>只有原因</cause>，没有关键词。", "keyword"),
            ("<keyword>难过</keyword>，<keyword>伤心</keyword>，<cause>出事</cause>。",
             "keyword"),
            ("只有<keyword>难过</keyword>的关键词。", "cause"),
            ("<cause>没关<keyword>严</keyword>重</cause>的嵌套。", "nested"),
            ("不配对</cause>的结束标签，<keyword>难过</keyword>。", "unbalanced"),
            ("很<keyword>难过</keyword>，<cause>没有结束。", "unclosed"),
            ("空的<cause></cause>标注，<keyword>难过</keyword>。", "empty"),
        ],
    )
    def test_malformed_records_rejected(self, record, reason):
        with pytest.raises(ValueError, match=reason):
            parse_ece_record(record)

    def test_corpus_collects_rejections(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text(
            "他<cause>出了事</cause>，很<keyword>难过</keyword>。\n"
            "\n"
            "这一条没有标注。\n",
            encoding="utf-8",
        )
        instances, rejected = parse_ece_corpus(path)
        assert len(instances) == 1
        assert len(rejected) == 1
        assert "keyword" in rejected[0][1]

    def test_instance_invariants(self):
        with pytest.raises(ValueError):
            ECEInstance(clauses=(), keyword_clause=0, cause_clauses=frozenset({0}))
        with pytest.raises(ValueError, match="out of range"):
            ECEInstance(clauses=("a",), keyword_clause=3,
                        cause_clauses=frozenset({0}))
        with pytest.raises(ValueError, match="no cause"):
            ECEInstance(clauses=("a",), keyword_clause=0, cause_clauses=frozenset())
        with pytest.raises(ValueError, match="out of range"):
            ECEInstance(clauses=("a",), keyword_clause=0,
                        cause_clauses=frozenset({5}))


class TestIndicatorFeature:
    def test_substring_presence(self, reference_registry):
        assert indicator_feature("他遭受了一次挫折", reference_registry) == 1
        assert indicator_feature("天气晴朗", reference_registry) == 0

    def test_augment_appends_one_dimension(self):
        vec = ClauseVector(tokens=(0.5, 1.5))
        out = augment_clause_vector(vec, 1)
        assert out.tokens == (0.5, 1.5, 1)
        assert vec.tokens == (0.5, 1.5)

    def test_augment_rejects_non_bit(self):
        with pytest.raises(ValueError):
            augment_clause_vector(ClauseVector(tokens=()), 2)


class TestECEMetrics:
    def gold(self):
        return [
            ECEInstance(clauses=("a", "b", "c"), keyword_clause=1,
                        cause_clauses=frozenset({0})),
            ECEInstance(clauses=("d", "e"), keyword_clause=0,
                        cause_clauses=frozenset({1})),
        ]

    def test_exact_counting(self):
        report = ece_metrics({(0, 0), (0, 2), (1, 1)}, self.gold())
        assert (report.correct, report.proposed, report.annotated) == (2, 3, 2)
        assert report.precision == pytest.approx(2 / 3)
        assert report.recall == pytest.approx(1.0)
        assert report.f_score == pytest.approx(0.8)

    def test_empty_proposal_zero_convention(self):
        report = ece_metrics(set(), self.gold())
        assert (report.precision, report.recall, report.f_score) == (0.0, 0.0, 0.0)
        assert report.annotated == 2

    def test_out_of_range_proposals_rejected(self):
        with pytest.raises(ValueError, match="instance"):
            ece_metrics({(9, 0)}, self.gold())
        with pytest.raises(ValueError, match="clause"):
            ece_metrics({(0, 7)}, self.gold())

    def test_reference_record_proposal(self):
        instances, rejected = [parse_ece_record(fixtures.REFERENCE_ECE_RECORD)], []
        report = ece_metrics({(0, 2)}, instances)
        assert report.precision == report.recall == report.f_score == 1.0
        report = ece_metrics({(0, 3)}, instances)
        assert report.precision == 0.0

    @given(
        st.sets(
            st.tuples(st.integers(0, 3), st.integers(0, 2)), max_size=12
        ),
        st.lists(
            st.sets(st.integers(0, 2), min_size=1, max_size=3),
            min_size=4,
            max_size=4,
        ),
    )
    @settings(max_examples=300, deadline=None)
    def test_counting_matches_oracle(self, proposed, cause_sets):
        gold = [
            ECEInstance(
                clauses=("x", "y", "z"),
                keyword_clause=0,
                cause_clauses=frozenset(causes),
            )
            for causes in cause_sets
        ]
        report = ece_metrics(proposed, gold)
        correct, n_prop, n_ann = ece_counts_oracle(proposed, cause_sets)
        p, r, f = prf_oracle(correct, n_prop, n_ann)
        assert (report.correct, report.proposed, report.annotated) == (
            correct, n_prop, n_ann,
        )
        assert report.precision == pytest.approx(p)
        assert report.recall == pytest.approx(r)
        assert report.f_score == pytest.approx(f)


class TestFScoreIdentity:
    @given(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    @settings(max_examples=1000, deadline=None)
    def test_harmonic_identity(self, p, r):
        f = f_score(p, r)
        assert f * (p + r) == pytest.approx(2 * p * r, abs=1e-12)
        assert 0.0 <= f <= 1.0
        assert f <= max(p, r) + 1e-12

    def test_zero_convention(self):
        assert f_score(0.0, 0.0) == 0.0

    def test_symmetry(self):
        assert f_score(0.3, 0.8) == f_score(0.8, 0.3)


@pytest.fixture(scope="module")
def corpus_and_registry():
    return fixtures.build_ablation_corpus(seed=0, n_instances=100)


class TestAblation:
    def test_feature_helps_on_the_synthetic_corpus(self, corpus_and_registry):
        corpus, registry = corpus_and_registry
        with_f = run_ece_ablation(corpus, registry, with_feature=True, seed=0)
        without_f = run_ece_ablation(corpus, registry, with_feature=False, seed=0)
        assert with_f.f_score >= 0.95
        assert with_f.f_score > without_f.f_score

    def test_deterministic(self, corpus_and_registry):
        corpus, registry = corpus_and_registry
        a = run_ece_ablation(corpus, registry, with_feature=True, seed=3)
        b = run_ece_ablation(corpus, registry, with_feature=True, seed=3)
        assert a == b

    def test_inert_registry_makes_arms_identical(self, corpus_and_registry):
        """With a registry whose surfaces never occur in the corpus, the
        indicator bit is 0 everywhere, so both arms must agree bit for bit:
        the arms differ only through that column."""
        corpus, _ = corpus_and_registry
        from emokb.indicators import Indicator, IndicatorRegistry

        inert = IndicatorRegistry([
            Indicator(surface="ZZZZ", polarity="negative",
                      pattern_class="other", origin="literature"),
        ])
        with_f = run_ece_ablation(corpus[:30], inert, with_feature=True, seed=1)
        without_f = run_ece_ablation(corpus[:30], inert, with_feature=False, seed=1)
        assert with_f.folds == without_f.folds
        assert with_f.f_score == without_f.f_score

    def test_fold_reports_obey_harmonic_identity(self, corpus_and_registry):
        corpus, registry = corpus_and_registry
        report = run_ece_ablation(corpus, registry, with_feature=True, seed=0)
        for fold in report.folds:
            assert fold.f_score * (fold.precision + fold.recall) == pytest.approx(
                2 * fold.precision * fold.recall, abs=1e-9
            )

    def test_small_corpus_degrades_to_loo(self, corpus_and_registry):
        corpus, registry = corpus_and_registry
        report = run_ece_ablation(corpus[:4], registry, with_feature=True,
                                  seed=0, folds=10)
        assert len(report.folds) == 4

    def test_empty_corpus_rejected(self, corpus_and_registry):
        _, registry = corpus_and_registry
        with pytest.raises(ValueError, match="empty"):
            run_ece_ablation([], registry, with_feature=True)

    def test_report_json_shape(self, corpus_and_registry):
        corpus, registry = corpus_and_registry
        report = run_ece_ablation(corpus[:20], registry, with_feature=True, seed=0)
        d = report.as_json_dict()
        assert set(d) == {"with_feature", "precision", "recall", "f_score", "folds"}
        json.dumps(d)
