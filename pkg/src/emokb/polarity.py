"""Polarity assignment for accepted events.

Routing is total over the three kinds: events from non-neutral indicators
inherit the indicator's polarity, 被 events are labeled by a constrained
model query, and implicit events come from a hand-maintained table. Neutral
is never an output label; neutral 被 events were already discarded upstream.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path

from .events import EmotionalEvent, Provenance
from .gateway import CompletionParams, GatewayError, LlmGateway, isoformat
from .indicators import IndicatorRegistry
from .textnorm import canonical_event_surface

logger = logging.getLogger(__name__)


class PolarityError(ValueError):
    """Routing or lookup failure during polarity assignment."""


def assign_by_indicator(
    event: EmotionalEvent, registry: IndicatorRegistry
) -> EmotionalEvent:
    """Propagate the indicator's polarity onto the event. Two events sharing
    an indicator always end up with the same polarity. Touches nothing but
    the polarity field."""
    if event.kind != "explicit_nonneutral":
        raise PolarityError(
            f"indicator propagation applies to explicit_nonneutral events, "
            f"got {event.kind} for {event.surface!r}"
        )
    indicator = registry.get(event.indicator_surface)
    if indicator is None:
        raise PolarityError(
            f"indicator {event.indicator_surface!r} not in registry"
        )
    if indicator.polarity == "neutral":
        raise PolarityError(
            f"indicator {event.indicator_surface!r} is neutral; "
            f"event {event.surface!r} should have been routed as a bei event"
        )
    return replace(event, polarity=indicator.polarity)


def assign_bei(
    event: EmotionalEvent, gateway: LlmGateway, params: CompletionParams
) -> EmotionalEvent:
    """Label one 被 event through the gateway's polarity query. On any
    gateway failure the event keeps polarity unassigned and gains a
    needs_review flag; the pipeline continues."""
    if event.kind != "bei":
        raise PolarityError(f"expected a bei event, got {event.kind}")
    if event.status != "accepted":
        raise PolarityError(
            f"bei polarity runs after filtering; {event.surface!r} is {event.status}"
        )
    try:
        polarity = gateway.query_polarity(event, params)
    except GatewayError as exc:
        logger.warning("polarity: %r needs review (%s)", event.surface, exc)
        return event.with_flag("needs_review")
    updated = replace(event, polarity=polarity)
    if isinstance(event.provenance, Provenance):
        query_record = {
            "provider_id": gateway.provider.provider_id,
            "timestamp": isoformat(gateway.clock.now()),
        }
        updated = replace(
            updated, provenance=replace(event.provenance, polarity_query=query_record)
        )
    return updated


def load_implicit_table(path: str | Path) -> dict[str, str]:
    """surface -> polarity from the implicit-event TSV (same format the
    harvest ingestor reads)."""
    from .harvest import ingest_implicit

    return {e.surface: e.polarity for e in ingest_implicit(path)}


def assign_implicit(event: EmotionalEvent, table: dict[str, str]) -> EmotionalEvent:
    if event.kind != "implicit":
        raise PolarityError(f"expected an implicit event, got {event.kind}")
    key = canonical_event_surface(event.surface)
    polarity = table.get(key)
    if polarity is None:
        raise PolarityError(f"implicit event {event.surface!r} absent from the table")
    return replace(event, polarity=polarity)


def assign_polarity(
    event: EmotionalEvent,
    registry: IndicatorRegistry,
    gateway: LlmGateway | None = None,
    params: CompletionParams | None = None,
    implicit_table: dict[str, str] | None = None,
) -> EmotionalEvent:
    """Dispatch to the one assigner that owns this event's kind."""
    if event.kind == "explicit_nonneutral":
        return assign_by_indicator(event, registry)
    if event.kind == "bei":
        if gateway is None or params is None:
            raise PolarityError("bei events need a gateway and params")
        return assign_bei(event, gateway, params)
    if implicit_table is None:
        raise PolarityError("implicit events need the manual polarity table")
    return assign_implicit(event, implicit_table)
