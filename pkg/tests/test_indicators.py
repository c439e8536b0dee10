import pytest
from hypothesis import given, strategies as st

from emokb.indicators import (
    BEI,
    Indicator,
    IndicatorRegistry,
    LexiconError,
    PATTERN_CLASSES,
    RegistryError,
    TEMPLATE_CLASSES,
    VerbLexicon,
    compose_bei_indicators,
    expand_template,
    load_registry,
    prune,
    registry_stats,
    save_registry,
)


def make(surface="遭受", polarity="negative", cls="classic", origin="literature", **kw):
    return Indicator(surface, polarity, cls, origin, **kw)


class TestIndicator:
    def test_neutral_bei_must_be_bei(self):
        with pytest.raises(ValueError):
            make(surface="安排", polarity="neutral", cls="neutral_bei")

    def test_bei_composed_needs_bei_prefix(self):
        with pytest.raises(ValueError):
            make(surface="禁止", polarity="neutral", cls="bei_composed")
        with pytest.raises(ValueError):
            make(surface=BEI, polarity="neutral", cls="bei_composed")

    def test_neutral_restricted_to_bei_classes(self):
        with pytest.raises(ValueError):
            make(surface="遭受", polarity="neutral", cls="classic")

    def test_unknown_class_rejected(self):
        with pytest.raises(ValueError):
            make(cls="mystery")

    def test_unknown_polarity_rejected(self):
        with pytest.raises(ValueError):
            make(polarity="meh")

    def test_bare_bei_marks_bei_events_and_is_harvestable(self):
        # the bare indicator drives the first bei generation round
        bei = make(surface=BEI, polarity="neutral", cls="neutral_bei")
        assert bei.marks_bei_events
        assert bei.active

    def test_composed_bei_is_active(self):
        ind = make(surface="被禁止", polarity="neutral", cls="bei_composed",
                   origin="bei_composed")
        assert ind.marks_bei_events
        assert ind.active

    def test_flagged_indicator_inactive(self):
        assert not make(weak=True).active
        assert not make(ambiguous=True).active


class TestRegistry:
    def test_duplicate_surface_rejected(self):
        with pytest.raises(RegistryError):
            IndicatorRegistry([make(), make()])

    def test_insertion_order_preserved(self):
        reg = IndicatorRegistry([make(surface="遭受"), make(surface="遭到")])
        assert reg.surfaces() == ["遭受", "遭到"]

    def test_extended_leaves_original_untouched(self):
        reg = IndicatorRegistry([make(surface="遭受")])
        bigger = reg.extended([make(surface="遭到")])
        assert len(reg) == 1 and len(bigger) == 2


class TestLexicon:
    def test_rejects_bei_prefixed_verbs(self):
        with pytest.raises(LexiconError):
            VerbLexicon(("被禁止",))

    def test_rejects_duplicates_and_empties(self):
        with pytest.raises(LexiconError):
            VerbLexicon(("禁止", "禁止"))
        with pytest.raises(LexiconError):
            VerbLexicon(("",))


class TestTemplates:
    def test_template_table(self):
        # marker, position, and the one positive class
        assert TEMPLATE_CLASSES["bai_V"][:2] == ("白", "prefix")
        assert TEMPLATE_CLASSES["cuo_V"][:2] == ("错", "prefix")
        assert TEMPLATE_CLASSES["lou_V"][:2] == ("漏", "prefix")
        assert TEMPLATE_CLASSES["V_po"][:2] == ("破", "suffix")
        assert TEMPLATE_CLASSES["V_cuo"][:2] == ("错", "suffix")
        assert TEMPLATE_CLASSES["V_dui"][:2] == ("对", "suffix")
        polarities = {cls: spec[2] for cls, spec in TEMPLATE_CLASSES.items()}
        assert polarities.pop("V_dui") == "positive"
        assert set(polarities.values()) == {"negative"}

    def test_expand_surfaces(self):
        lex = VerbLexicon(("写", "等"))
        assert [i.surface for i in expand_template("bai_V", lex)] == ["白写", "白等"]
        assert [i.surface for i in expand_template("V_cuo", lex)] == ["写错", "等错"]

    def test_expand_is_injective_per_class(self):
        lex = VerbLexicon(tuple("写等去干说跑忙来找问"))
        for cls in TEMPLATE_CLASSES:
            surfaces = [i.surface for i in expand_template(cls, lex)]
            assert len(set(surfaces)) == len(lex.verbs)

    def test_expand_rejects_non_template_class(self):
        with pytest.raises(ValueError):
            expand_template("classic", VerbLexicon(("写",)))

    def test_compose_bei(self):
        composed = compose_bei_indicators(["禁止", "没收"])
        assert [i.surface for i in composed] == ["被禁止", "被没收"]
        assert all(i.polarity == "neutral" for i in composed)
        assert all(i.pattern_class == "bei_composed" for i in composed)

    def test_compose_918_distinct(self):
        from emokb.fixtures import synthetic_verb_lexicon

        verbs = synthetic_verb_lexicon(918)
        composed = compose_bei_indicators(verbs)
        surfaces = {i.surface for i in composed}
        assert len(composed) == 918 and len(surfaces) == 918
        assert all(s.startswith(BEI) for s in surfaces)


class TestPrune:
    def test_removes_and_reports_missing(self):
        reg = IndicatorRegistry(
            [make(surface="穿皱"), make(surface="骑脏"), make(surface="遭受")]
        )
        result = prune(reg, weak_list=["穿皱", "不存在"], ambiguous_list=["骑脏"])
        assert result.registry.surfaces() == ["遭受"]
        assert set(result.removed) == {("穿皱", "weak"), ("骑脏", "ambiguous")}
        assert result.missing == (("不存在", "weak"),)

    def test_noop_prune(self):
        reg = IndicatorRegistry([make()])
        result = prune(reg)
        assert result.registry.surfaces() == reg.surfaces()


class TestPersistence:
    def test_round_trip(self, tmp_path):
        reg = IndicatorRegistry(
            [
                make(surface="遭受"),
                make(surface="白听", cls="bai_V", origin="template_expanded",
                     ambiguous=True),
                make(surface="穿皱", cls="resultative_verb", weak=True),
                make(surface=BEI, polarity="neutral", cls="neutral_bei"),
            ]
        )
        path = tmp_path / "reg.tsv"
        save_registry(reg, path)
        loaded = load_registry(path)
        assert loaded.surfaces() == reg.surfaces()
        for surface in reg.surfaces():
            assert loaded.get(surface) == reg.get(surface)

    def test_load_rejects_bad_header(self, tmp_path):
        path = tmp_path / "reg.tsv"
        path.write_text("nope\tnope\n", encoding="utf-8")
        with pytest.raises(RegistryError):
            load_registry(path)

    def test_load_reports_line_numbers(self, tmp_path):
        path = tmp_path / "reg.tsv"
        path.write_text(
            "surface\tpolarity\tclass\torigin\tflags\n遭受\tnegative\tclassic\n",
            encoding="utf-8",
        )
        with pytest.raises(RegistryError, match=":2:"):
            load_registry(path)

    @given(
        st.lists(
            st.tuples(
                st.text(
                    alphabet=st.characters(categories=("Lo",), min_codepoint=0x4E00,
                                           max_codepoint=0x9FFF),
                    min_size=1,
                    max_size=4,
                ),
                st.sampled_from(["positive", "negative"]),
                st.sampled_from(["classic", "resultative_verb", "other"]),
                st.sampled_from(["literature", "manual"]),
                st.booleans(),
                st.booleans(),
            ),
            max_size=25,
            unique_by=lambda t: t[0],
        )
    )
    def test_round_trip_property(self, rows):
        import tempfile, os

        reg = IndicatorRegistry(
            [Indicator(s, p, c, o, w, a) for s, p, c, o, w, a in rows]
        )
        fd, path = tempfile.mkstemp(suffix=".tsv")
        os.close(fd)
        try:
            save_registry(reg, path)
            loaded = load_registry(path)
            assert [loaded.get(s) for s in loaded.surfaces()] == [
                reg.get(s) for s in reg.surfaces()
            ]
        finally:
            os.unlink(path)


class TestStats:
    def test_counts_all_classes_present(self):
        reg = IndicatorRegistry([make()])
        stats = registry_stats(reg)
        assert set(stats.by_class) == set(PATTERN_CLASSES)
        assert stats.by_class["classic"] == 1
        assert stats.total == 1

    def test_reference_registry_census(self, reference_registry):
        stats = registry_stats(reference_registry)
        assert stats.total == 726
        assert stats.by_class == {
            "classic": 7,
            "neutral_bei": 1,
            "resultative_verb": 296,
            "bai_V": 13,
            "V_po": 41,
            "cuo_V": 30,
            "V_cuo": 99,
            "V_dui": 16,
            "lou_V": 136,
            "other": 87,
            "bei_composed": 0,
        }
        assert stats.by_polarity == {"positive": 142, "neutral": 1, "negative": 583}
