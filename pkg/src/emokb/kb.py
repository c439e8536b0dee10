"""Knowledge base of accepted, polarity-labeled emotional events.

Storage is a JSONL file (one event per line, fixed key order) mirrored by an
in-memory index keyed on the event surface. Only events with status
``accepted`` and a positive/negative polarity may enter; surface collisions
keep the first writer and are reported, never silently overwritten.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .events import EmotionalEvent, EventError, event_from_json, event_to_json
from .textnorm import normalized_match_key

FORMAT_VERSION = "1"

KB_KINDS = ("explicit_nonneutral", "bei", "implicit")
KB_POLARITIES = ("positive", "negative")


class KBError(ValueError):
    """Invariant-violating event or malformed store file."""


def _check_kb_event(event: EmotionalEvent) -> None:
    if event.status != "accepted":
        raise KBError(f"{event.surface!r} has status {event.status!r}, not accepted")
    if event.polarity not in KB_POLARITIES:
        raise KBError(
            f"{event.surface!r} has polarity {event.polarity!r}; the store only "
            f"holds positive/negative events"
        )


@dataclass(frozen=True)
class AppendReport:
    inserted: int
    collisions: tuple[str, ...]


class KnowledgeBase:
    def __init__(self, events=(), format_version: str = FORMAT_VERSION):
        self.format_version = format_version
        self._by_surface: dict[str, EmotionalEvent] = {}
        report = self.append(events)
        if report.collisions:
            raise KBError(
                f"duplicate surfaces in initial events: {report.collisions[:3]}"
            )

    def __len__(self) -> int:
        return len(self._by_surface)

    def __contains__(self, surface: str) -> bool:
        return surface in self._by_surface

    def get(self, surface: str) -> EmotionalEvent | None:
        return self._by_surface.get(surface)

    def surfaces(self) -> list[str]:
        return sorted(self._by_surface)

    def events(self) -> list[EmotionalEvent]:
        return [self._by_surface[s] for s in self.surfaces()]

    def append(self, events) -> AppendReport:
        """Validate everything first, then insert: a bad event aborts the
        whole call with the store untouched. Existing surfaces win over new
        arrivals (first-writer-wins) and are reported as collisions."""
        events = list(events)
        for event in events:
            _check_kb_event(event)
        inserted = 0
        collisions: list[str] = []
        for event in events:
            if event.surface in self._by_surface:
                collisions.append(event.surface)
            else:
                self._by_surface[event.surface] = event
                inserted += 1
        return AppendReport(inserted, tuple(collisions))

    def query(
        self,
        kind: str | None = None,
        polarity: str | None = None,
        indicator: str | None = None,
        substring: str | None = None,
    ) -> list[EmotionalEvent]:
        """Conjunction of the provided criteria; no criteria means every
        event. Output is surface-sorted."""
        out = []
        for surface in self.surfaces():
            event = self._by_surface[surface]
            if kind is not None and event.kind != kind:
                continue
            if polarity is not None and event.polarity != polarity:
                continue
            if indicator is not None and event.indicator_surface != indicator:
                continue
            if substring is not None and substring not in event.surface:
                continue
            out.append(event)
        return out


def reconcile_counts(parts: dict[str, int], total: int) -> None:
    """Check that a category breakdown sums to its stated total. Raises
    KBError with the offending numbers otherwise."""
    part_sum = sum(parts.values())
    if part_sum != total:
        raise KBError(f"counts do not reconcile: parts sum to {part_sum}, total {total}")


@dataclass(frozen=True)
class KBStats:
    by_kind: dict[str, int]
    by_polarity: dict[str, int]
    total: int

    def __post_init__(self):
        reconcile_counts(self.by_kind, self.total)
        reconcile_counts(self.by_polarity, self.total)

    @classmethod
    def from_counts(
        cls, by_kind: dict[str, int], by_polarity: dict[str, int]
    ) -> "KBStats":
        """Build stats from externally recorded counts; the reconciliation
        identity (kind sum = polarity sum = total) is enforced on entry."""
        return cls(dict(by_kind), dict(by_polarity), sum(by_kind.values()))

    def as_json_dict(self) -> dict:
        return {
            "total": self.total,
            "by_kind": {k: self.by_kind.get(k, 0) for k in KB_KINDS},
            "by_polarity": {p: self.by_polarity.get(p, 0) for p in KB_POLARITIES},
        }


def kb_stats(kb: KnowledgeBase) -> KBStats:
    by_kind = {k: 0 for k in KB_KINDS}
    by_polarity = {p: 0 for p in KB_POLARITIES}
    for event in kb.events():
        by_kind[event.kind] += 1
        by_polarity[event.polarity] += 1
    return KBStats(by_kind, by_polarity, len(kb))


MATCHERS = ("exact", "normalized-exact")


def coverage(
    node_list: list[str], kb: KnowledgeBase, matcher: str = "exact"
) -> tuple[int, int, float]:
    """How many external nodes appear in the KB: (matched, total, ratio).
    The normalized-exact matcher compares after NFC + whitespace strip;
    nothing fuzzier is offered."""
    if not node_list:
        raise KBError("empty node list")
    if matcher not in MATCHERS:
        raise KBError(f"unknown matcher {matcher!r}")
    if matcher == "exact":
        surfaces = set(kb.surfaces())
        matched = sum(1 for node in node_list if node in surfaces)
    else:
        surfaces = {normalized_match_key(s) for s in kb.surfaces()}
        matched = sum(1 for node in node_list if normalized_match_key(node) in surfaces)
    return matched, len(node_list), matched / len(node_list)


def coverage_percent(ratio: float) -> str:
    """Whole-percent rendering used in coverage reports: 0.0098633 -> '1%'."""
    return f"{round(ratio * 100):d}%"


def export_kb(
    kb: KnowledgeBase, path: str | Path, include_needs_review: bool = False
) -> int:
    """Write one event per line in surface order. Events flagged
    needs_review stay out unless explicitly included. Returns the number of
    lines written. The write is atomic: full file or no file change."""
    path = Path(path)
    lines = []
    for event in kb.events():
        if "needs_review" in event.flags and not include_needs_review:
            continue
        lines.append(event_to_json(event))
    payload = "".join(line + "\n" for line in lines)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(lines)


def load_kb(path: str | Path) -> KnowledgeBase:
    path = Path(path)
    events = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                events.append(event_from_json(line))
            except EventError as exc:
                raise KBError(f"{path}:{lineno}: {exc}") from exc
    return KnowledgeBase(events)
