"""Walk through the indicator registry: load the seed set, expand a verb
template into indicators, compose the 被+verb family, prune noisy entries,
and reprint the published census. Runs offline in well under a second.

    python3 demos/01_registry_walkthrough.py
"""

from pathlib import Path

from emokb.indicators import (
    VerbLexicon,
    compose_bei_indicators,
    expand_template,
    load_registry,
    prune,
    registry_stats,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def banner(title):
    print()
    print(f"== {title} ==")


def main():
    banner("seed registry")
    seed = load_registry(FIXTURES / "seed-registry.tsv")
    stats = registry_stats(seed)
    print(f"loaded {stats.total} hand-curated indicators")
    for cls, count in sorted(stats.by_class.items(), key=lambda kv: -kv[1]):
        if count:
            print(f"  {cls:<16} {count}")

    banner("template expansion")
    # each productive pattern is a verb slot; a small lexicon is enough to
    # show the mechanics
    verbs = VerbLexicon.load(FIXTURES / "verbs-small.txt")
    for cls in ("bai_V", "V_cuo", "lou_V"):
        expanded = expand_template(cls, verbs)
        sample = ", ".join(ind.surface for ind in expanded[:4])
        print(f"  {cls:<8} x {len(verbs.verbs)} verbs -> "
              f"{len(expanded)} indicators ({sample}, ...)")

    banner("bei composition")
    composed = compose_bei_indicators(verbs)
    print(f"  {len(verbs.verbs)} verbs -> {len(composed)} 被-prefixed "
          f"indicators, all polarity-neutral until a model is asked")
    print("  e.g.", ", ".join(ind.surface for ind in composed[:5]))
    full = compose_bei_indicators(VerbLexicon.load(FIXTURES / "verbs-918.txt"))
    print(f"  the full lexicon yields {len(full)} distinct indicators")

    banner("pruning")
    result = prune(
        seed,
        weak_list=[i.surface for i in seed if i.weak],
        ambiguous_list=[i.surface for i in seed if i.ambiguous],
    )
    print(f"  dropped {len(result.removed)} flagged indicators, "
          f"{len(result.registry)} remain")
    for surface, reason in result.removed[:5]:
        print(f"    - {surface} ({reason})")

    banner("published census")
    census = registry_stats(load_registry(FIXTURES / "reference-counts.tsv"))
    print(f"  total {census.total}")
    print(f"  polarity {census.by_polarity}")


if __name__ == "__main__":
    main()
