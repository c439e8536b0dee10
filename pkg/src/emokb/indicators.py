"""Emotional event indicator registry.

An indicator is a lexical cue (遭受, 获得, 被, ...) that marks the presence of
an emotional event and carries a sentiment polarity. The registry is loaded
from a TSV file, can be grown by morphological template expansion (错V, V错,
白V, 漏V, V破, V对) and by 被+verb composition, and is pruned of weak or
ambiguous cues before harvesting.

Registry TSV format: header ``surface<TAB>polarity<TAB>class<TAB>origin<TAB>flags``,
one indicator per row, UTF-8, normalized to NFC on load. ``flags`` is ``-`` or
a comma-joined subset of {weak, ambiguous}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .textnorm import nfc

logger = logging.getLogger(__name__)

BEI = "被"

POLARITIES = ("positive", "negative", "neutral")

# Canonical class order; statistics reports follow it.
PATTERN_CLASSES = (
    "classic",
    "neutral_bei",
    "resultative_verb",
    "bai_V",
    "V_po",
    "cuo_V",
    "V_cuo",
    "V_dui",
    "lou_V",
    "other",
    "bei_composed",
)

ORIGINS = ("literature", "template_expanded", "bei_composed", "manual")

# Morphological templates: class -> (marker, position, fixed polarity).
# V_dui is the only positive-producing template.
TEMPLATE_CLASSES = {
    "bai_V": ("白", "prefix", "negative"),
    "cuo_V": ("错", "prefix", "negative"),
    "lou_V": ("漏", "prefix", "negative"),
    "V_po": ("破", "suffix", "negative"),
    "V_cuo": ("错", "suffix", "negative"),
    "V_dui": ("对", "suffix", "positive"),
}

REGISTRY_HEADER = ("surface", "polarity", "class", "origin", "flags")

FLAG_TOKENS = ("weak", "ambiguous")


class RegistryError(ValueError):
    """Malformed registry input: bad row, duplicate surface, unknown token."""


class LexiconError(ValueError):
    """Malformed verb lexicon: duplicate or 被-prefixed verb."""


@dataclass(frozen=True)
class Indicator:
    surface: str
    polarity: str
    pattern_class: str
    origin: str
    weak: bool = False
    ambiguous: bool = False

    def __post_init__(self):
        if not self.surface:
            raise RegistryError("indicator surface must be non-empty")
        if self.polarity not in POLARITIES:
            raise RegistryError(f"unknown polarity {self.polarity!r}")
        if self.pattern_class not in PATTERN_CLASSES:
            raise RegistryError(f"unknown pattern class {self.pattern_class!r}")
        if self.origin not in ORIGINS:
            raise RegistryError(f"unknown origin {self.origin!r}")
        if self.pattern_class == "neutral_bei" and self.surface != BEI:
            raise RegistryError(
                f"neutral_bei indicator must be exactly {BEI!r}, got {self.surface!r}"
            )
        if self.pattern_class == "bei_composed":
            if not self.surface.startswith(BEI) or len(self.surface) < 2:
                raise RegistryError(
                    f"bei_composed surface must be 被+verb, got {self.surface!r}"
                )
        if self.polarity == "neutral" and self.pattern_class not in (
            "neutral_bei",
            "bei_composed",
        ):
            raise RegistryError(
                f"neutral polarity is reserved for 被 indicators, got class "
                f"{self.pattern_class!r} for {self.surface!r}"
            )

    @property
    def marks_bei_events(self) -> bool:
        return self.pattern_class in ("neutral_bei", "bei_composed")

    @property
    def active(self) -> bool:
        """Eligible for harvesting: neither weak nor ambiguous."""
        return not (self.weak or self.ambiguous)


class IndicatorRegistry:
    """Immutable, insertion-ordered collection of indicators with unique
    surfaces. Safe to share across threads once constructed."""

    def __init__(self, indicators: Iterable[Indicator] = (), metadata: dict | None = None):
        self._by_surface: dict[str, Indicator] = {}
        for ind in indicators:
            if ind.surface in self._by_surface:
                raise RegistryError(f"duplicate indicator surface {ind.surface!r}")
            self._by_surface[ind.surface] = ind
        self.metadata = metadata

    def __len__(self) -> int:
        return len(self._by_surface)

    def __iter__(self) -> Iterator[Indicator]:
        return iter(self._by_surface.values())

    def __contains__(self, surface: str) -> bool:
        return surface in self._by_surface

    def get(self, surface: str) -> Indicator | None:
        return self._by_surface.get(surface)

    def surfaces(self) -> list[str]:
        return list(self._by_surface)

    def active(self) -> list[Indicator]:
        """Indicators eligible for harvesting, in registry order."""
        return [ind for ind in self if ind.active]

    def extended(self, more: Iterable[Indicator]) -> "IndicatorRegistry":
        """A new registry with ``more`` appended; the receiver is unchanged."""
        return IndicatorRegistry(list(self) + list(more), metadata=self.metadata)


@dataclass(frozen=True)
class VerbLexicon:
    """Ordered set of verbs usable in template expansion and 被 composition."""

    verbs: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for verb in self.verbs:
            if not verb:
                raise LexiconError("empty verb in lexicon")
            if verb.startswith(BEI):
                raise LexiconError(f"verb {verb!r} already prefixed with {BEI}")
            if verb in seen:
                raise LexiconError(f"duplicate verb {verb!r}")
            seen.add(verb)

    def __len__(self) -> int:
        return len(self.verbs)

    def __iter__(self) -> Iterator[str]:
        return iter(self.verbs)

    @classmethod
    def load(cls, path: str | Path) -> "VerbLexicon":
        """One verb per line, UTF-8, NFC-normalized; blank lines ignored."""
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        verbs = tuple(nfc(line.strip()) for line in lines if line.strip())
        return cls(verbs)


def _coerce_lexicon(verbs: VerbLexicon | Sequence[str]) -> VerbLexicon:
    if isinstance(verbs, VerbLexicon):
        return verbs
    return VerbLexicon(tuple(verbs))


def load_registry(path: str | Path) -> IndicatorRegistry:
    """Parse a registry TSV. Raises RegistryError with the offending line
    number on malformed rows, duplicate surfaces or unknown enum tokens."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"registry file not found: {path}")
    indicators: list[Indicator] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != REGISTRY_HEADER:
            raise RegistryError(
                f"{path}:1: bad header {header!r}, expected "
                + "\\t".join(REGISTRY_HEADER)
            )
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise RegistryError(
                    f"{path}:{lineno}: expected 5 tab-separated fields, got {len(fields)}"
                )
            surface, polarity, pattern_class, origin, flags = (nfc(f.strip()) for f in fields)
            if surface in seen:
                raise RegistryError(f"{path}:{lineno}: duplicate surface {surface!r}")
            seen.add(surface)
            weak, ambiguous = _parse_flags(flags, path, lineno)
            try:
                indicators.append(
                    Indicator(surface, polarity, pattern_class, origin, weak, ambiguous)
                )
            except RegistryError as exc:
                raise RegistryError(f"{path}:{lineno}: {exc}") from exc
    return IndicatorRegistry(indicators)


def _parse_flags(flags: str, path: Path, lineno: int) -> tuple[bool, bool]:
    if flags == "-":
        return False, False
    tokens = [t.strip() for t in flags.split(",") if t.strip()]
    for token in tokens:
        if token not in FLAG_TOKENS:
            raise RegistryError(f"{path}:{lineno}: unknown flag {token!r}")
    return "weak" in tokens, "ambiguous" in tokens


def save_registry(registry: IndicatorRegistry, path: str | Path) -> None:
    lines = ["\t".join(REGISTRY_HEADER)]
    for ind in registry:
        flags = ",".join(
            t for t, on in (("weak", ind.weak), ("ambiguous", ind.ambiguous)) if on
        ) or "-"
        lines.append(
            "\t".join((ind.surface, ind.polarity, ind.pattern_class, ind.origin, flags))
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def expand_template(
    pattern_class: str, verbs: VerbLexicon | Sequence[str]
) -> list[Indicator]:
    """One indicator per verb, surface = marker+verb or verb+marker depending
    on the template, polarity fixed by the class. Output follows lexicon
    order."""
    if pattern_class not in TEMPLATE_CLASSES:
        raise RegistryError(f"{pattern_class!r} is not a template class")
    lexicon = _coerce_lexicon(verbs)
    if not len(lexicon):
        raise LexiconError("cannot expand an empty lexicon")
    marker, position, polarity = TEMPLATE_CLASSES[pattern_class]
    out = []
    for verb in lexicon:
        surface = marker + verb if position == "prefix" else verb + marker
        out.append(
            Indicator(surface, polarity, pattern_class, origin="template_expanded")
        )
    return out


def compose_bei_indicators(verbs: VerbLexicon | Sequence[str]) -> list[Indicator]:
    """被+verb compositional indicators, all neutral, one per verb."""
    lexicon = _coerce_lexicon(verbs)
    if not len(lexicon):
        raise LexiconError("cannot compose from an empty lexicon")
    return [
        Indicator(BEI + verb, "neutral", "bei_composed", origin="bei_composed")
        for verb in lexicon
    ]


@dataclass(frozen=True)
class PruneResult:
    registry: IndicatorRegistry
    removed: tuple[tuple[str, str], ...]  # (surface, reason)
    missing: tuple[tuple[str, str], ...]  # listed but absent from the registry


def prune(
    registry: IndicatorRegistry,
    weak_list: Iterable[str] = (),
    ambiguous_list: Iterable[str] = (),
) -> PruneResult:
    """Drop every indicator whose surface is in either list. Entries missing
    from the registry produce a warning, not an error: the lists are
    maintained independently of the registry file."""
    weak = {nfc(s) for s in weak_list}
    ambiguous = {nfc(s) for s in ambiguous_list}
    kept, removed = [], []
    for ind in registry:
        if ind.surface in weak:
            removed.append((ind.surface, "weak"))
        elif ind.surface in ambiguous:
            removed.append((ind.surface, "ambiguous"))
        else:
            kept.append(ind)
    present = {ind.surface for ind in registry}
    missing = [(s, "weak") for s in sorted(weak - present)]
    missing += [(s, "ambiguous") for s in sorted(ambiguous - present)]
    for surface, reason in missing:
        logger.warning("prune: %s indicator %r not present in registry", reason, surface)
    return PruneResult(
        IndicatorRegistry(kept, metadata=registry.metadata),
        tuple(removed),
        tuple(missing),
    )


@dataclass(frozen=True)
class RegistryStats:
    by_class: dict[str, int] = field(default_factory=dict)
    by_polarity: dict[str, int] = field(default_factory=dict)
    total: int = 0

    def as_json_dict(self) -> dict:
        return {
            "total": self.total,
            "by_class": {c: self.by_class.get(c, 0) for c in PATTERN_CLASSES},
            "by_polarity": {p: self.by_polarity.get(p, 0) for p in POLARITIES},
        }


def registry_stats(registry: IndicatorRegistry) -> RegistryStats:
    """Exact partition counts: class counts and polarity counts both sum to
    the registry size."""
    by_class = {c: 0 for c in PATTERN_CLASSES}
    by_polarity = {p: 0 for p in POLARITIES}
    for ind in registry:
        by_class[ind.pattern_class] += 1
        by_polarity[ind.polarity] += 1
    return RegistryStats(by_class, by_polarity, len(registry))
