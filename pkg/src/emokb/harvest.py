"""End-to-end event generation.

Per indicator: render the few-shot prompt, complete it, parse the numbered
list, normalize, dedup, cap at the requested count, and attach provenance.
Across indicators: iterate the pruned registry in order, resolve
cross-indicator duplicates by keeping the first occurrence, and checkpoint
completed indicators so an interrupted run resumes without re-querying.

被 events then pass a neutrality triage (neutral ones are discarded), and
indicator-free implicit events are ingested from a hand-maintained TSV.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .events import EmotionalEvent, Provenance
from .gateway import (
    CompletionParams,
    GatewayError,
    LlmGateway,
    isoformat,
    parse_phrase_list,
    prompt_hash,
)
from .indicators import Indicator, IndicatorRegistry
from .prompts import ExampleSet, PromptPackStore, render_prompt
from .textnorm import canonical_event_surface

logger = logging.getLogger(__name__)

GENERATION_CAP = 100


class HarvestError(Exception):
    """Raised when a whole run produces nothing but failures."""


class ImplicitTableError(ValueError):
    """Malformed implicit-event TSV."""


def kind_for(indicator: Indicator) -> str:
    """Event kind is a pure function of the indicator's pattern class."""
    return "bei" if indicator.marks_bei_events else "explicit_nonneutral"


@dataclass(frozen=True)
class GenerationBatch:
    indicator_surface: str
    requested: int
    raw_line_count: int
    accepted_events: tuple[EmotionalEvent, ...]
    duplicate_count: int
    rejected_count: int
    blank_count: int
    rejected: tuple[tuple[str, str], ...] = ()
    warnings: tuple[str, ...] = ()

    def reconciles(self) -> bool:
        return self.raw_line_count == (
            len(self.accepted_events)
            + self.duplicate_count
            + self.rejected_count
            + self.blank_count
        )


def harvest_indicator(
    indicator: Indicator,
    examples: ExampleSet,
    gateway: LlmGateway,
    params: CompletionParams,
    cap: int = GENERATION_CAP,
) -> GenerationBatch:
    """One generation round for one indicator. Gateway errors propagate; a
    batch with zero accepted events is returned with a warning, not raised.

    Count reconciliation holds exactly: raw lines = accepted + duplicates +
    rejected + blank lines, where uniques beyond the cap count as rejected.
    """
    if not indicator.active:
        raise ValueError(f"indicator {indicator.surface!r} is weak/ambiguous")
    prompt = render_prompt(indicator, examples)
    completion = gateway.complete(prompt, params)
    parsed, rejected = parse_phrase_list(completion, indicator)

    seen: set[str] = set()
    distinct: list[str] = []
    duplicate_count = 0
    for surface in parsed:
        if surface in seen:
            duplicate_count += 1
        else:
            seen.add(surface)
            distinct.append(surface)
    kept, over_cap = distinct[:cap], distinct[cap:]
    rejected = list(rejected) + [(s, "over generation cap") for s in over_cap]

    provenance = Provenance(
        prompt_hash=prompt_hash(prompt.rendered_text),
        provider_id=completion.provider_id,
        timestamp=isoformat(gateway.clock.now()),
    )
    kind = kind_for(indicator)
    events = tuple(
        EmotionalEvent(
            surface=surface,
            kind=kind,
            indicator_surface=indicator.surface,
            theme=surface[len(indicator.surface):],
            status="raw",
            provenance=provenance,
        )
        for surface in kept
    )
    raw_line_count = len(completion.text.splitlines())
    blank_count = raw_line_count - len(parsed) - len(rejected) + len(over_cap)
    warnings = ()
    if not events:
        warnings = (f"zero accepted events for {indicator.surface!r}",)
        logger.warning("harvest: zero accepted events for %r", indicator.surface)
    return GenerationBatch(
        indicator_surface=indicator.surface,
        requested=cap,
        raw_line_count=raw_line_count,
        accepted_events=events,
        duplicate_count=duplicate_count,
        rejected_count=len(rejected),
        blank_count=blank_count,
        rejected=tuple(rejected),
        warnings=warnings,
    )


@dataclass
class HarvestResult:
    events: list[EmotionalEvent] = field(default_factory=list)
    batches: dict[str, GenerationBatch] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    cross_indicator_collisions: int = 0
    resumed_indicators: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


def _batch_digest(batch: GenerationBatch) -> str:
    payload = "\n".join(e.surface for e in batch.accepted_events)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class _Checkpoint:
    """Append-only JSONL of completed indicators; serialized writes."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()

    def load(self) -> dict[str, GenerationBatch]:
        done: dict[str, GenerationBatch] = {}
        if not self.path.exists():
            return done
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                events = tuple(
                    EmotionalEvent.from_json_dict(d) for d in entry["events"]
                )
                batch = GenerationBatch(
                    indicator_surface=entry["indicator"],
                    requested=entry["requested"],
                    raw_line_count=entry["raw_line_count"],
                    accepted_events=events,
                    duplicate_count=entry["duplicate_count"],
                    rejected_count=entry["rejected_count"],
                    blank_count=entry["blank_count"],
                    warnings=tuple(entry.get("warnings", ())),
                )
                done[entry["indicator"]] = batch
        return done

    def record(self, batch: GenerationBatch) -> None:
        entry = {
            "indicator": batch.indicator_surface,
            "digest": _batch_digest(batch),
            "requested": batch.requested,
            "raw_line_count": batch.raw_line_count,
            "duplicate_count": batch.duplicate_count,
            "rejected_count": batch.rejected_count,
            "blank_count": batch.blank_count,
            "warnings": list(batch.warnings),
            "events": [e.as_json_dict() for e in batch.accepted_events],
        }
        line = json.dumps(entry, ensure_ascii=False)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")


def harvest_all(
    registry: IndicatorRegistry,
    prompt_packs: PromptPackStore,
    gateway: LlmGateway,
    params: CompletionParams,
    checkpoint_path: str | Path | None = None,
    max_workers: int = 1,
    cap: int = GENERATION_CAP,
) -> HarvestResult:
    """Harvest every active indicator. Batches merge in registry order no
    matter what order they complete in, so parallel and serial runs agree.
    Per-indicator failures are recorded and skipped; the run raises only when
    every indicator fails."""
    result = HarvestResult()
    active = registry.active()
    if not active:
        result.warnings = ("no active indicators to harvest",)
        logger.warning("harvest: registry has no active indicators")
        return result

    checkpoint = _Checkpoint(Path(checkpoint_path)) if checkpoint_path else None
    done = checkpoint.load() if checkpoint else {}
    result.resumed_indicators = tuple(
        ind.surface for ind in active if ind.surface in done
    )
    todo = [ind for ind in active if ind.surface not in done]

    def work(indicator: Indicator) -> GenerationBatch:
        examples = prompt_packs.example_set(indicator)
        return harvest_indicator(indicator, examples, gateway, params, cap=cap)

    fresh: dict[str, GenerationBatch] = {}
    if max_workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {ind.surface: pool.submit(work, ind) for ind in todo}
        for surface, future in futures.items():
            try:
                fresh[surface] = future.result()
            except GatewayError as exc:
                result.failures[surface] = str(exc)
    else:
        for ind in todo:
            try:
                fresh[ind.surface] = work(ind)
            except GatewayError as exc:
                result.failures[ind.surface] = str(exc)

    if checkpoint:
        # record in registry order for a readable checkpoint file
        for ind in active:
            if ind.surface in fresh:
                checkpoint.record(fresh[ind.surface])
    done.update(fresh)

    if not done and result.failures:
        raise HarvestError(
            f"all {len(result.failures)} indicators failed; first error: "
            + next(iter(result.failures.values()))
        )

    seen: set[str] = set()
    for ind in active:
        batch = done.get(ind.surface)
        if batch is None:
            continue
        result.batches[ind.surface] = batch
        for event in batch.accepted_events:
            if event.surface in seen:
                result.cross_indicator_collisions += 1
                continue
            seen.add(event.surface)
            result.events.append(event)
    return result


@dataclass(frozen=True)
class TriageResult:
    kept: tuple[EmotionalEvent, ...]
    discarded: tuple[EmotionalEvent, ...]
    errors: tuple[tuple[str, str], ...] = ()  # (surface, error)


def triage_bei_neutral(
    events,
    gateway: LlmGateway,
    params: CompletionParams,
) -> TriageResult:
    """Ask the provider whether each 被 event is emotionally neutral; neutral
    ones are discarded with status triaged_out_neutral. A query that fails or
    answers unparseably leaves the event kept, flagged needs_review."""
    kept: list[EmotionalEvent] = []
    discarded: list[EmotionalEvent] = []
    errors: list[tuple[str, str]] = []
    for event in events:
        if event.kind != "bei":
            raise ValueError(f"triage input must be bei events, got {event.kind}")
        try:
            neutral = gateway.query_neutrality(event, params)
        except GatewayError as exc:
            errors.append((event.surface, str(exc)))
            kept.append(event.with_flag("needs_review"))
            logger.warning("triage: %r kept with needs_review (%s)", event.surface, exc)
            continue
        if neutral:
            discarded.append(event.with_status("triaged_out_neutral"))
        else:
            kept.append(event)
    return TriageResult(tuple(kept), tuple(discarded), tuple(errors))


IMPLICIT_HEADER = ("surface", "polarity")


def ingest_implicit(path: str | Path) -> list[EmotionalEvent]:
    """Load indicator-free events from a TSV (header ``surface<TAB>polarity``).
    They bypass generation and filtering: status accepted, provenance manual.
    Neutral polarity is rejected; these tables are curated to be polar."""
    path = Path(path)
    events: list[EmotionalEvent] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != IMPLICIT_HEADER:
            raise ImplicitTableError(
                f"{path}:1: bad header {header!r}, expected surface<TAB>polarity"
            )
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ImplicitTableError(
                    f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            surface = canonical_event_surface(fields[0])
            polarity = fields[1].strip()
            if not surface:
                raise ImplicitTableError(f"{path}:{lineno}: empty surface")
            if polarity not in ("positive", "negative"):
                raise ImplicitTableError(
                    f"{path}:{lineno}: implicit events must be positive or negative, "
                    f"got {polarity!r}"
                )
            if surface in seen:
                raise ImplicitTableError(f"{path}:{lineno}: duplicate surface {surface!r}")
            seen.add(surface)
            events.append(
                EmotionalEvent(
                    surface=surface,
                    kind="implicit",
                    polarity=polarity,
                    status="accepted",
                    provenance="manual",
                )
            )
    return events
