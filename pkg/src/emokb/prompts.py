"""Few-shot prompt rendering for emotional event generation.

The template lives in ``data/prompt_template_v1.txt`` with two placeholders:
``[INDICATOR]`` (the cue whose events we want) and ``{EXAMPLES}`` (8 curated
example phrases, numbered 1-8). Rendering is deterministic: same indicator and
examples, same bytes.

Example sets come from a prompt-pack directory. A per-indicator pack file is
``<surface>.txt``: first line the indicator surface, then exactly 8 example
lines, UTF-8 NFC. Indicators without a curated pack fall back to a per-class
default under ``class_defaults/<class>.txt`` holding 8 theme lines; the
examples are then surface+theme.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .indicators import Indicator
from .textnorm import nfc

TEMPLATE_VERSION = "v1"

# Numbered example line inside a rendered prompt: "3. 遭受校园暴力；"
_EXAMPLE_LINE_RE = re.compile(r"^(\d+)\.\s(.+?)[；。]$", re.MULTILINE)
_TEMPLATE_PHRASE_RE = re.compile(r"短语模板“(.+?)\{\}”")


class PromptError(ValueError):
    """Invalid example set or unparseable prompt text."""


def _load_template() -> str:
    ref = resources.files("emokb").joinpath("data/prompt_template_v1.txt")
    return ref.read_text(encoding="utf-8")


@dataclass(frozen=True)
class ExampleSet:
    indicator_surface: str
    examples: tuple[str, ...]


@dataclass(frozen=True)
class Prompt:
    indicator_surface: str
    rendered_text: str
    template_version: str = TEMPLATE_VERSION


def validate_example_set(example_set: ExampleSet) -> list[str]:
    """Report every violated constraint; an empty list means the set is
    usable. Never raises."""
    problems: list[str] = []
    if len(example_set.examples) != 8:
        problems.append(f"expected 8 examples, got {len(example_set.examples)}")
    seen: dict[str, int] = {}
    for i, example in enumerate(example_set.examples, start=1):
        if not example:
            problems.append(f"example {i} is empty")
            continue
        if not example.startswith(example_set.indicator_surface):
            problems.append(
                f"example {i} ({example!r}) does not begin with "
                f"{example_set.indicator_surface!r}"
            )
        elif example == example_set.indicator_surface:
            problems.append(f"example {i} has no theme after the indicator")
        if example in seen:
            problems.append(f"examples {seen[example]} and {i} are duplicates ({example!r})")
        else:
            seen[example] = i
    return problems


def render_prompt(indicator: Indicator, example_set: ExampleSet) -> Prompt:
    """Instantiate the template for one indicator. Raises PromptError when the
    example set has the wrong count or an example not prefixed by the
    indicator surface."""
    if example_set.indicator_surface != indicator.surface:
        raise PromptError(
            f"example set is for {example_set.indicator_surface!r}, "
            f"indicator is {indicator.surface!r}"
        )
    problems = validate_example_set(example_set)
    if problems:
        raise PromptError("; ".join(problems))
    numbered = []
    for i, example in enumerate(example_set.examples, start=1):
        terminal = "。" if i == 8 else "；"
        numbered.append(f"{i}. {example}{terminal}")
    text = _load_template()
    text = text.replace("[INDICATOR]", indicator.surface)
    text = text.replace("{EXAMPLES}", "\n".join(numbered))
    return Prompt(indicator.surface, text, TEMPLATE_VERSION)


def parse_prompt(rendered_text: str) -> tuple[str, list[str]]:
    """Recover (indicator surface, 8 examples) from rendered prompt text.
    Inverse of render_prompt for any valid rendering."""
    m = _TEMPLATE_PHRASE_RE.search(rendered_text)
    if not m:
        raise PromptError("prompt text has no phrase-template clause")
    surface = m.group(1)
    examples = [text for _num, text in _EXAMPLE_LINE_RE.findall(rendered_text)]
    if len(examples) != 8:
        raise PromptError(f"expected 8 numbered examples, found {len(examples)}")
    return surface, examples


class PromptPackStore:
    """Example-set lookup over a prompt-pack directory, falling back to the
    class default when no per-indicator pack exists. When constructed with no
    directory it serves the packs bundled with the package."""

    def __init__(self, pack_dir: str | Path | None = None):
        if pack_dir is None:
            self._root = Path(str(resources.files("emokb").joinpath("data/prompt_packs")))
        else:
            self._root = Path(pack_dir)

    def has_curated_pack(self, surface: str) -> bool:
        return (self._root / f"{surface}.txt").exists()

    def example_set(self, indicator: Indicator) -> ExampleSet:
        pack_path = self._root / f"{indicator.surface}.txt"
        if pack_path.exists():
            return self._load_pack(pack_path, indicator.surface)
        default_path = self._root / "class_defaults" / f"{indicator.pattern_class}.txt"
        if not default_path.exists():
            raise PromptError(
                f"no pack for {indicator.surface!r} and no class default for "
                f"{indicator.pattern_class!r} under {self._root}"
            )
        themes = self._read_lines(default_path)
        if len(themes) != 8:
            raise PromptError(f"{default_path}: expected 8 theme lines, got {len(themes)}")
        return ExampleSet(
            indicator.surface, tuple(indicator.surface + theme for theme in themes)
        )

    def _load_pack(self, path: Path, expected_surface: str) -> ExampleSet:
        lines = self._read_lines(path)
        if len(lines) != 9:
            raise PromptError(
                f"{path}: expected surface line + 8 example lines, got {len(lines)} lines"
            )
        surface = lines[0]
        if surface != expected_surface:
            raise PromptError(
                f"{path}: pack declares surface {surface!r}, expected {expected_surface!r}"
            )
        return ExampleSet(surface, tuple(lines[1:]))

    @staticmethod
    def _read_lines(path: Path) -> list[str]:
        raw = path.read_text(encoding="utf-8").splitlines()
        return [nfc(line.strip()) for line in raw if line.strip()]
