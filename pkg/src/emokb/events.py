"""Emotional event records and their JSON codec.

An event is a short Chinese phrase describing something that happens to a
person and carries sentiment (遭受挫折, 被没收手机, 中奖). Three kinds:

- ``explicit_nonneutral``: indicator + theme, from a non-被 indicator
- ``bei``: indicator + theme where the indicator starts with 被
- ``implicit``: bare phrase with no indicator (失业, 中毒)

Status lifecycle: ``raw`` (fresh from harvest) -> ``triaged_out_neutral``
(被 events judged neutral and dropped) / ``filtered_out_invalid`` (rejected
by the validity filter) / ``accepted`` (passed the filter, or implicit which
bypasses it). Serialization uses a fixed key order so exports are
byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

from .indicators import BEI

EVENT_KINDS = ("explicit_nonneutral", "bei", "implicit")

EVENT_STATUSES = (
    "raw",
    "triaged_out_neutral",
    "filtered_out_invalid",
    "accepted",
)

EVENT_POLARITIES = ("positive", "negative", "unassigned")

EVENT_FLAGS = ("needs_review",)

MANUAL_PROVENANCE = "manual"

_JSON_KEY_ORDER = (
    "surface",
    "indicator_surface",
    "theme",
    "kind",
    "polarity",
    "validity_score",
    "status",
    "provenance",
    "flags",
)


class EventError(ValueError):
    """Structurally invalid event record."""


@dataclass(frozen=True)
class Provenance:
    """Where a generated event came from: which prompt, which provider, when.
    被 events whose polarity was assigned by a model query also record that
    query (provider id + timestamp) under ``polarity_query``."""

    prompt_hash: str
    provider_id: str
    timestamp: str
    polarity_query: dict[str, str] | None = None

    def as_json_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "prompt_hash": self.prompt_hash,
            "provider_id": self.provider_id,
            "timestamp": self.timestamp,
        }
        if self.polarity_query is not None:
            d["polarity_query"] = {
                k: self.polarity_query[k] for k in sorted(self.polarity_query)
            }
        return d

    @classmethod
    def from_json_dict(cls, d: dict[str, Any]) -> "Provenance":
        return cls(
            prompt_hash=d["prompt_hash"],
            provider_id=d["provider_id"],
            timestamp=d["timestamp"],
            polarity_query=d.get("polarity_query"),
        )


@dataclass(frozen=True)
class EmotionalEvent:
    surface: str
    kind: str
    indicator_surface: str | None = None
    theme: str | None = None
    polarity: str = "unassigned"
    validity_score: float | None = None
    status: str = "raw"
    provenance: Provenance | str = MANUAL_PROVENANCE
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.flags, frozenset):
            object.__setattr__(self, "flags", frozenset(self.flags))
        if not self.surface:
            raise EventError("event surface must be non-empty")
        if self.kind not in EVENT_KINDS:
            raise EventError(f"unknown event kind {self.kind!r}")
        if self.polarity not in EVENT_POLARITIES:
            raise EventError(f"unknown polarity {self.polarity!r}")
        if self.status not in EVENT_STATUSES:
            raise EventError(f"unknown status {self.status!r}")
        for flag in self.flags:
            if flag not in EVENT_FLAGS:
                raise EventError(f"unknown flag {flag!r}")
        if self.kind == "implicit":
            if self.indicator_surface is not None:
                raise EventError(
                    f"implicit event {self.surface!r} must not carry an indicator"
                )
            if self.theme:
                raise EventError(
                    f"implicit event {self.surface!r} must not carry a theme"
                )
            if self.status in ("triaged_out_neutral", "filtered_out_invalid"):
                raise EventError(
                    f"implicit event {self.surface!r} bypasses triage and filtering"
                )
        else:
            if not self.indicator_surface:
                raise EventError(
                    f"{self.kind} event {self.surface!r} requires an indicator surface"
                )
            if not self.theme:
                raise EventError(
                    f"{self.kind} event {self.surface!r} requires a non-empty theme"
                )
            if self.surface != self.indicator_surface + self.theme:
                raise EventError(
                    f"surface {self.surface!r} != indicator {self.indicator_surface!r}"
                    f" + theme {self.theme!r}"
                )
            if self.kind == "bei" and not self.indicator_surface.startswith(BEI):
                raise EventError(
                    f"bei event indicator {self.indicator_surface!r} must start with {BEI}"
                )
            if self.kind == "explicit_nonneutral" and self.indicator_surface.startswith(BEI):
                raise EventError(
                    f"explicit_nonneutral event indicator {self.indicator_surface!r} "
                    f"starts with {BEI}; use kind='bei'"
                )
            if self.status == "accepted" and self.validity_score is None:
                raise EventError(
                    f"accepted {self.kind} event {self.surface!r} lacks a validity score"
                )
        if self.status == "triaged_out_neutral" and self.kind != "bei":
            raise EventError("only bei events can be triaged out as neutral")
        if self.validity_score is not None and not (0.0 <= self.validity_score <= 1.0):
            raise EventError(f"validity_score {self.validity_score} outside [0, 1]")

    def with_status(self, status: str, **changes) -> "EmotionalEvent":
        return replace(self, status=status, **changes)

    def with_flag(self, flag: str) -> "EmotionalEvent":
        return replace(self, flags=self.flags | {flag})

    def as_json_dict(self) -> dict[str, Any]:
        prov: Any = self.provenance
        if isinstance(prov, Provenance):
            prov = prov.as_json_dict()
        return {
            "surface": self.surface,
            "indicator_surface": self.indicator_surface,
            "theme": self.theme,
            "kind": self.kind,
            "polarity": self.polarity,
            "validity_score": self.validity_score,
            "status": self.status,
            "provenance": prov,
            "flags": sorted(self.flags),
        }

    @classmethod
    def from_json_dict(cls, d: dict[str, Any]) -> "EmotionalEvent":
        prov = d.get("provenance", MANUAL_PROVENANCE)
        if isinstance(prov, dict):
            prov = Provenance.from_json_dict(prov)
        return cls(
            surface=d["surface"],
            kind=d["kind"],
            indicator_surface=d.get("indicator_surface"),
            theme=d.get("theme"),
            polarity=d.get("polarity", "unassigned"),
            validity_score=d.get("validity_score"),
            status=d.get("status", "raw"),
            provenance=prov,
            flags=frozenset(d.get("flags", ())),
        )


def event_to_json(event: EmotionalEvent) -> str:
    """One-line JSON with a fixed key order, suitable for JSONL stores."""
    d = event.as_json_dict()
    ordered = {k: d[k] for k in _JSON_KEY_ORDER}
    return json.dumps(ordered, ensure_ascii=False, separators=(", ", ": "))


def event_from_json(line: str) -> EmotionalEvent:
    try:
        d = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventError(f"bad event JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise EventError("event JSON must be an object")
    try:
        return EmotionalEvent.from_json_dict(d)
    except KeyError as exc:
        raise EventError(f"event JSON missing field {exc}") from exc


def load_events(path) -> list[EmotionalEvent]:
    """Read an events JSONL file; blank lines are skipped, errors carry the
    line number."""
    events: list[EmotionalEvent] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(event_from_json(line))
            except EventError as exc:
                raise EventError(f"{path}:{lineno}: {exc}") from exc
    return events


def save_events(events, path) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        count = 0
        for event in events:
            fh.write(event_to_json(event) + "\n")
            count += 1
    return count
