"""Common emotional-event harvesting, filtering, and evaluation.

The package drives a text-generation provider with indicator-based few-shot
prompts to collect common Chinese emotional events, filters the raw output
with a hashed n-gram classifier, labels event polarity, stores everything in
a JSONL knowledge base, and ships the evaluation arithmetic (Fleiss kappa,
clause-level cause-extraction metrics, feature ablation) used to check the
results.
"""

from .events import EmotionalEvent, Provenance, load_events, save_events
from .indicators import (
    Indicator,
    IndicatorRegistry,
    VerbLexicon,
    compose_bei_indicators,
    expand_template,
    load_registry,
    prune,
    registry_stats,
    save_registry,
)
from .gateway import (
    CompletionParams,
    FrozenClock,
    LlmGateway,
    MockProvider,
    mock_gateway,
)
from .harvest import (
    GenerationBatch,
    harvest_all,
    harvest_indicator,
    ingest_implicit,
    triage_bei_neutral,
)
from .filtering import (
    FilterModel,
    LabeledSample,
    apply_filter,
    pr_curve,
    sample_for_annotation,
    select_threshold,
    split,
    train_filter,
)
from .polarity import assign_polarity
from .kb import KnowledgeBase, coverage, export_kb, kb_stats, load_kb
from .evaluate import (
    ECEInstance,
    RatingMatrix,
    ece_metrics,
    fleiss_kappa,
    parse_ece_corpus,
    run_ece_ablation,
    sample_precision,
    segment_clauses,
)
from .prompts import ExampleSet, Prompt, PromptPackStore, render_prompt
from .scorer_client import ScorerClient, external_score

__version__ = "0.1.0"

__all__ = [
    "CompletionParams",
    "ECEInstance",
    "EmotionalEvent",
    "ExampleSet",
    "FilterModel",
    "FrozenClock",
    "GenerationBatch",
    "Indicator",
    "IndicatorRegistry",
    "KnowledgeBase",
    "LabeledSample",
    "LlmGateway",
    "MockProvider",
    "Prompt",
    "PromptPackStore",
    "Provenance",
    "RatingMatrix",
    "ScorerClient",
    "VerbLexicon",
    "apply_filter",
    "assign_polarity",
    "compose_bei_indicators",
    "coverage",
    "ece_metrics",
    "expand_template",
    "export_kb",
    "external_score",
    "fleiss_kappa",
    "harvest_all",
    "harvest_indicator",
    "ingest_implicit",
    "kb_stats",
    "load_events",
    "load_kb",
    "load_registry",
    "mock_gateway",
    "parse_ece_corpus",
    "pr_curve",
    "prune",
    "registry_stats",
    "render_prompt",
    "run_ece_ablation",
    "sample_for_annotation",
    "sample_precision",
    "save_events",
    "save_registry",
    "segment_clauses",
    "select_threshold",
    "split",
    "train_filter",
    "triage_bei_neutral",
]
