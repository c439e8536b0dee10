"""Train the validity filter end to end: sample candidates for annotation,
fit the hashed character n-gram classifier on a labeled set, pick the
operating threshold from the precision/recall curve, and apply the model
to a fresh mock harvest.

    python3 demos/03_filter_training.py
"""

import random
from pathlib import Path

from emokb.filtering import (
    pr_curve,
    sample_for_annotation,
    select_threshold,
    split,
    train_filter,
    LabeledSample,
    apply_filter,
)
from emokb.gateway import CompletionParams, mock_gateway
from emokb.harvest import harvest_all
from emokb.indicators import load_registry
from emokb.prompts import PromptPackStore

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def banner(title):
    print()
    print(f"== {title} ==")


def labeled_set(valid_surfaces, seed=0):
    """Stand-in for the human annotation pass: the sampled candidates are
    taken as valid (the offline provider emits clean lines), matched by an
    equal count of garbled strings labeled invalid."""
    rng = random.Random(seed)
    samples = [LabeledSample(s, "valid") for s in valid_surfaces]
    junk_chars = "qwxzkj0189#@"
    seen = set(valid_surfaces)
    while sum(1 for s in samples if s.label == "invalid") < len(valid_surfaces):
        surface = "".join(rng.choice(junk_chars)
                          for _ in range(rng.randint(4, 10)))
        if surface not in seen:
            seen.add(surface)
            samples.append(LabeledSample(surface, "invalid"))
    rng.shuffle(samples)
    return samples


def main():
    banner("sampling candidates for annotation")
    registry = load_registry(FIXTURES / "registry-10.tsv")
    harvest = harvest_all(registry, PromptPackStore(), mock_gateway(seed=0),
                          CompletionParams())
    picks = sample_for_annotation(harvest.events, k=10, seed=0)
    print(f"{len(harvest.events)} raw candidates -> {len(picks)} drawn for "
          f"labeling (10 per indicator)")
    print("  e.g.", ", ".join(picks[:4]))

    banner("training")
    samples = labeled_set(picks)
    train, val, test = split(samples, seed=0)
    print(f"{len(samples)} labeled events -> train {len(train)} / "
          f"validation {len(val)} / test {len(test)}")
    model = train_filter(train, val, seed=0)
    print(f"best validation AP "
          f"{model.training_meta['best_validation_ap']:.4f} "
          f"after {model.training_meta['epochs_run']} epochs")

    banner("threshold selection")
    curve = pr_curve(model, val)
    for threshold, precision, recall in curve.points[::4]:
        print(f"  t={threshold:.3f}  P={precision:.3f}  R={recall:.3f}")
    choice = select_threshold(curve, recall_floor=0.80)
    print(f"chosen t={choice.threshold:.3f} -> precision "
          f"{choice.precision:.3f} at recall {choice.recall:.3f} "
          f"(recall floor met: {choice.meets_recall_floor})")

    banner("applying the filter to a noisy candidate stream")
    # the mock harvest is clean by construction, so salt it with the kind of
    # garbled lines a real generation run produces
    import dataclasses

    rng = random.Random(7)
    stream = list(harvest.events[:40])
    for i in range(10):
        junk_theme = "".join(rng.choice("qwxzkj0189#@") for _ in range(6))
        template = stream[i]
        stream.append(dataclasses.replace(
            template,
            surface=template.indicator_surface + junk_theme,
            theme=junk_theme,
        ))
    accepted, rejected = apply_filter(model, choice.threshold, stream)
    junk_rejected = sum(1 for e in rejected
                        if any(c in "qwxzkj0189#@" for c in e.theme))
    print(f"{len(stream)} candidates -> {len(accepted)} accepted, "
          f"{len(rejected)} filtered out ({junk_rejected} of the 10 "
          f"injected junk lines among them)")
    for event in rejected[:3]:
        print(f"  filtered: {event.surface} "
              f"(score {event.validity_score:.3f})")
    for event in accepted[:3]:
        print(f"  kept    : {event.surface} "
              f"(score {event.validity_score:.3f})")


if __name__ == "__main__":
    main()
