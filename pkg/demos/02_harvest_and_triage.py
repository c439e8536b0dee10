"""Harvest candidate events for a 10-indicator registry with the seeded
offline provider, inspect the per-batch accounting, and triage the 被
candidates whose emotional reading depends on what follows the marker.

    python3 demos/02_harvest_and_triage.py
"""

from pathlib import Path

from emokb.gateway import CompletionParams, mock_gateway
from emokb.harvest import harvest_all, triage_bei_neutral
from emokb.indicators import IndicatorRegistry, load_registry
from emokb.prompts import PromptPackStore, render_prompt

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def banner(title):
    print()
    print(f"== {title} ==")


def main():
    registry = load_registry(FIXTURES / "registry-10.tsv")
    store = PromptPackStore()
    gateway = mock_gateway(seed=0)
    params = CompletionParams()

    banner("the prompt an indicator is asked with")
    indicator = registry.get("遭受")
    prompt = render_prompt(indicator, store.example_set(indicator))
    for line in prompt.rendered_text.splitlines()[:8]:
        print(f"  | {line}")
    print("  | ...")

    banner("harvest")
    result = harvest_all(registry, store, gateway, params)
    print(f"{'indicator':<8} {'raw':>4} {'kept':>5} {'dup':>4} "
          f"{'rej':>4} {'blank':>6}")
    for surface, batch in sorted(result.batches.items()):
        print(f"{surface:<8} {batch.raw_line_count:>4} "
              f"{len(batch.accepted_events):>5} {batch.duplicate_count:>4} "
              f"{batch.rejected_count:>4} {batch.blank_count:>6}")
        assert batch.reconciles()
    print(f"total {len(result.events)} candidate events; every row above "
          f"reconciles raw = kept + dup + rej + blank")

    banner("triage of bare-被 candidates")
    # 被 alone marks the passive, not an emotion; each candidate is posed as
    # a yes/no question and the neutral ones leave the pipeline here
    seed = load_registry(FIXTURES / "seed-registry.tsv")
    bare_bei = IndicatorRegistry([seed.get("被")])
    bei_result = harvest_all(bare_bei, store, gateway, params)
    bei_raw = [e for e in bei_result.events if e.indicator_surface == "被"]
    triage = triage_bei_neutral(bei_raw, gateway, params)
    print(f"{len(bei_raw)} candidates -> kept {len(triage.kept)}, "
          f"set aside {len(triage.discarded)}, errors {len(triage.errors)}")
    for event in triage.discarded[:3]:
        print(f"  neutral, dropped : {event.surface}")
    for event in triage.kept[:3]:
        print(f"  emotional, kept  : {event.surface}")

    banner("what accepted events look like")
    for event in result.events[:3]:
        print(f"  {event.surface:<14} kind={event.kind} "
              f"indicator={event.indicator_surface} theme={event.theme}")


if __name__ == "__main__":
    main()
