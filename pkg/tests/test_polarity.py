import dataclasses

import pytest

from emokb import fixtures
from emokb.events import EmotionalEvent, Provenance
from emokb.gateway import CompletionParams, mock_gateway
from emokb.polarity import (
    PolarityError,
    assign_bei,
    assign_by_indicator,
    assign_implicit,
    assign_polarity,
    load_implicit_table,
)


def explicit_event(surface, indicator):
    return EmotionalEvent(
        surface=surface,
        kind="explicit_nonneutral",
        indicator_surface=indicator,
        theme=surface[len(indicator):],
        status="accepted",
        validity_score=0.9,
    )


def bei_event(surface, indicator, status="accepted", provenance=None):
    return EmotionalEvent(
        surface=surface,
        kind="bei",
        indicator_surface=indicator,
        theme=surface[len(indicator):],
        status=status,
        provenance=provenance,
        validity_score=0.9 if status == "accepted" else None,
    )


class TestIndicatorRoute:
    @pytest.mark.parametrize(
        "surface,indicator,expected", fixtures.REFERENCE_EXPLICIT_CLASSIFICATIONS
    )
    def test_reference_classifications(self, reference_registry, surface,
                                       indicator, expected):
        event = assign_by_indicator(explicit_event(surface, indicator),
                                    reference_registry)
        assert event.polarity == expected

    def test_same_indicator_same_polarity(self, reference_registry):
        a = assign_by_indicator(explicit_event("遭受痛苦", "遭受"), reference_registry)
        b = assign_by_indicator(explicit_event("遭受冷落", "遭受"), reference_registry)
        assert a.polarity == b.polarity == "negative"

    def test_only_polarity_changes(self, reference_registry):
        before = explicit_event("遭受痛苦", "遭受")
        after = assign_by_indicator(before, reference_registry)
        assert dataclasses.replace(after, polarity="unassigned") == before

    def test_wrong_kind_rejected(self, reference_registry):
        with pytest.raises(PolarityError, match="explicit_nonneutral"):
            assign_by_indicator(bei_event("被没收手机", "被没收"), reference_registry)

    def test_unknown_indicator_rejected(self, reference_registry):
        with pytest.raises(PolarityError, match="not in registry"):
            assign_by_indicator(explicit_event("不存在假期", "不存在"),
                                reference_registry)

    def test_neutral_route_is_structurally_closed(self):
        # the only neutral indicator class is 被, and 被 events cannot be
        # built as explicit_nonneutral, so indicator propagation can never
        # see a neutral indicator through public constructors
        from emokb.events import EventError
        from emokb.indicators import Indicator, RegistryError

        with pytest.raises(EventError, match="被"):
            explicit_event("被邀请", "被")
        with pytest.raises(RegistryError, match="neutral"):
            Indicator(surface="安排", polarity="neutral",
                      pattern_class="other", origin="literature")


class TestBeiRoute:
    @pytest.mark.parametrize(
        "surface,indicator,expected", fixtures.REFERENCE_BEI_CLASSIFICATIONS
    )
    def test_reference_classifications(self, gw, params, surface, indicator,
                                       expected):
        event = assign_bei(bei_event(surface, indicator), gw, params)
        assert event.polarity == expected

    def test_provenance_gains_query_record(self, gw, params):
        prov = Provenance(prompt_hash="a" * 64, provider_id="mock-0",
                          timestamp="2024-01-01T00:00:00+00:00")
        event = assign_bei(bei_event("被没收手机", "被没收", provenance=prov),
                           gw, params)
        assert event.provenance.polarity_query is not None
        assert event.provenance.polarity_query["provider_id"] == gw.provider.provider_id
        assert "timestamp" in event.provenance.polarity_query
        assert event.provenance.prompt_hash == "a" * 64

    def test_gateway_failure_flags_needs_review(self, params):
        gw = mock_gateway(seed=0, force_unparseable={"被没收手机"})
        event = assign_bei(bei_event("被没收手机", "被没收"), gw, params)
        assert event.polarity == "unassigned"
        assert "needs_review" in event.flags

    def test_raw_event_rejected(self, gw, params):
        with pytest.raises(PolarityError, match="after filtering"):
            assign_bei(bei_event("被没收手机", "被没收", status="raw"), gw, params)

    def test_non_bei_rejected(self, gw, params):
        with pytest.raises(PolarityError, match="bei"):
            assign_bei(explicit_event("遭受痛苦", "遭受"), gw, params)


class TestImplicitRoute:
    @pytest.fixture()
    def table(self, fixture_dir):
        return load_implicit_table(fixture_dir / "implicit-events.tsv")

    @pytest.mark.parametrize("surface,expected", fixtures.IMPLICIT_EVENTS)
    def test_reference_classifications(self, table, surface, expected):
        event = EmotionalEvent(surface=surface, kind="implicit", status="accepted")
        assert assign_implicit(event, table).polarity == expected

    def test_absent_surface_rejected(self, table):
        event = EmotionalEvent(surface="登月", kind="implicit", status="accepted")
        with pytest.raises(PolarityError, match="absent"):
            assign_implicit(event, table)

    def test_wrong_kind_rejected(self, table):
        with pytest.raises(PolarityError, match="implicit"):
            assign_implicit(explicit_event("遭受痛苦", "遭受"), table)

    def test_table_covers_fixture(self, table):
        assert table == dict(fixtures.IMPLICIT_EVENTS)


class TestDispatch:
    def test_routes_each_kind(self, reference_registry, gw, params, fixture_dir):
        table = load_implicit_table(fixture_dir / "implicit-events.tsv")
        explicit = assign_polarity(explicit_event("遭受痛苦", "遭受"),
                                   reference_registry)
        assert explicit.polarity == "negative"
        bei = assign_polarity(bei_event("被夸奖有责任心", "被夸奖"),
                              reference_registry, gateway=gw, params=params)
        assert bei.polarity == "positive"
        implicit = assign_polarity(
            EmotionalEvent(surface="失业", kind="implicit", status="accepted"),
            reference_registry, implicit_table=table,
        )
        assert implicit.polarity == "negative"

    def test_bei_without_gateway_rejected(self, reference_registry):
        with pytest.raises(PolarityError, match="gateway"):
            assign_polarity(bei_event("被没收手机", "被没收"), reference_registry)

    def test_implicit_without_table_rejected(self, reference_registry):
        event = EmotionalEvent(surface="失业", kind="implicit", status="accepted")
        with pytest.raises(PolarityError, match="table"):
            assign_polarity(event, reference_registry)


class TestReferenceTally:
    def test_every_reference_row_assigned_correctly(self, reference_registry,
                                                    gw, params, fixture_dir):
        """All curated classification rows, across the three routes, must
        come out right; this is the propagation bar the suite holds."""
        table = load_implicit_table(fixture_dir / "implicit-events.tsv")
        correct = total = 0
        for surface, indicator, expected in fixtures.REFERENCE_EXPLICIT_CLASSIFICATIONS:
            got = assign_polarity(explicit_event(surface, indicator),
                                  reference_registry)
            correct += got.polarity == expected
            total += 1
        for surface, indicator, expected in fixtures.REFERENCE_BEI_CLASSIFICATIONS:
            got = assign_polarity(bei_event(surface, indicator),
                                  reference_registry, gateway=gw, params=params)
            correct += got.polarity == expected
            total += 1
        for surface, expected in fixtures.IMPLICIT_EVENTS:
            got = assign_polarity(
                EmotionalEvent(surface=surface, kind="implicit", status="accepted"),
                reference_registry, implicit_table=table,
            )
            correct += got.polarity == expected
            total += 1
        assert total == 32
        assert correct == total
