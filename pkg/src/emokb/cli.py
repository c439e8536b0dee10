"""Command-line front end for the pipeline.

Exit codes: 0 success, 1 operational error (missing artifact, provider
misconfiguration, bad data), 2 usage error (argparse).

Configuration precedence, highest first: command-line flags, environment
variables (EMOKB_CONFIG for the config path, EMOKB_SEED for the seed, plus
the provider credential variable named in the config), the JSON config file,
built-in defaults.

Machine-readable outputs are JSON/JSONL with a fixed key order so seeded
reruns are byte-identical; pass --frozen-time to pin timestamps too.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import filtering, polarity
from .events import load_events, save_events
from .evaluate import (
    AblationReport,
    RatingMatrix,
    ece_metrics,
    fleiss_kappa,
    parse_ece_corpus,
    run_ece_ablation,
    sample_precision,
)
from .gateway import (
    CompletionParams,
    FrozenClock,
    HttpProvider,
    LlmGateway,
    ProviderConfig,
    RetryPolicy,
    SystemClock,
    TokenBucket,
    mock_gateway,
)
from .harvest import harvest_all, ingest_implicit, triage_bei_neutral
from .indicators import (
    IndicatorRegistry,
    TEMPLATE_CLASSES,
    VerbLexicon,
    compose_bei_indicators,
    expand_template,
    load_registry,
    prune,
    registry_stats,
    save_registry,
)
from .kb import (
    KnowledgeBase,
    coverage,
    coverage_percent,
    export_kb,
    kb_stats,
    load_kb,
)
from .prompts import PromptPackStore


class CliError(Exception):
    """Operational failure; the message goes to stderr and the run exits 1."""


def _stable_json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


class Runner:
    """Holds the resolved global options and funnels all file writes so
    --dry-run can suppress them uniformly."""

    def __init__(self, args):
        self.dry_run: bool = args.dry_run
        self.frozen_time: bool = args.frozen_time
        self.config = self._load_config(args.config)
        self.seed = self._resolve_seed(args.seed)

    @staticmethod
    def _load_config(flag_path: str | None) -> dict:
        path = flag_path or os.environ.get("EMOKB_CONFIG")
        if not path:
            return {}
        try:
            with open(path, encoding="utf-8") as fh:
                config = json.load(fh)
        except FileNotFoundError:
            raise CliError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise CliError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(config, dict):
            raise CliError(f"config file {path} must hold a JSON object")
        return config

    def _resolve_seed(self, flag_seed: int | None) -> int:
        if flag_seed is not None:
            return flag_seed
        env = os.environ.get("EMOKB_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError:
                raise CliError(f"EMOKB_SEED must be an integer, got {env!r}")
        return int(self.config.get("seed", 0))

    # -- artifacts -----------------------------------------------------------

    def write_text(self, path: str | Path, content: str, what: str) -> None:
        if self.dry_run:
            print(f"[dry-run] would write {what} to {path}")
            return
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(content, encoding="utf-8")

    def write_events(self, path: str | Path, events, what: str) -> int:
        if self.dry_run:
            print(f"[dry-run] would write {len(list(events))} {what} to {path}")
            return 0
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return save_events(events, path)

    # -- providers -----------------------------------------------------------

    def gateway(self, args) -> tuple[LlmGateway, CompletionParams]:
        """Mock gateway when --mock, otherwise the configured HTTP provider.
        Unconfigured non-mock use is the classic exit-1 path."""
        if getattr(args, "mock", False):
            gw = mock_gateway(seed=self.seed)
            return gw, CompletionParams()
        section = self.config.get("provider")
        if not section:
            raise CliError(
                "no provider configured: pass --mock, or point --config at a "
                "JSON file with a \"provider\" section"
            )
        try:
            pcfg = ProviderConfig(**section)
        except TypeError as exc:
            raise CliError(f"bad provider section: {exc}")
        limiter = (
            TokenBucket(pcfg.requests_per_minute)
            if pcfg.requests_per_minute
            else None
        )
        clock = FrozenClock() if self.frozen_time else SystemClock()
        gw = LlmGateway(
            provider=HttpProvider(pcfg),
            retry_policy=RetryPolicy(max_retries=pcfg.max_retries),
            rate_limiter=limiter,
            clock=clock,
        )
        return gw, pcfg.params()


# ---------------------------------------------------------------------------
# indicators


def cmd_indicators_stats(runner: Runner, args) -> int:
    registry = load_registry(args.registry)
    stats = registry_stats(registry)
    payload = stats.as_json_dict()
    classes = " ".join(f"{k}={v}" for k, v in payload["by_class"].items())
    polarity_line = " ".join(f"{k}={v}" for k, v in payload["by_polarity"].items())
    print(f"total {stats.total} | polarity {polarity_line} | classes {classes}")
    if args.out:
        runner.write_text(args.out, _stable_json(payload), "registry stats")
    return 0


def cmd_indicators_expand(runner: Runner, args) -> int:
    lexicon = VerbLexicon.load(args.lexicon)
    expanded = expand_template(args.template_class, lexicon)
    registry = IndicatorRegistry(expanded)
    if args.registry:
        registry = load_registry(args.registry).extended(expanded)
    if not runner.dry_run:
        save_registry(registry, args.out)
    else:
        print(f"[dry-run] would write expanded registry to {args.out}")
    print(
        f"expanded {len(expanded)} {args.template_class} indicators "
        f"from {len(lexicon.verbs)} verbs"
    )
    return 0


def cmd_indicators_compose(runner: Runner, args) -> int:
    lexicon = VerbLexicon.load(args.lexicon)
    composed = compose_bei_indicators(lexicon)
    registry = IndicatorRegistry(composed)
    if args.registry:
        registry = load_registry(args.registry).extended(composed)
    if not runner.dry_run:
        save_registry(registry, args.out)
    else:
        print(f"[dry-run] would write composed registry to {args.out}")
    print(f"composed {len(composed)} bei indicators from {len(lexicon.verbs)} verbs")
    return 0


def _read_surface_list(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def cmd_indicators_prune(runner: Runner, args) -> int:
    registry = load_registry(args.registry)
    weak = _read_surface_list(args.weak) if args.weak else []
    ambiguous = _read_surface_list(args.ambiguous) if args.ambiguous else []
    if args.flagged:
        weak += [i.surface for i in registry if i.weak]
        ambiguous += [i.surface for i in registry if i.ambiguous]
    result = prune(registry, weak_list=weak, ambiguous_list=ambiguous)
    if not runner.dry_run:
        save_registry(result.registry, args.out)
    else:
        print(f"[dry-run] would write pruned registry to {args.out}")
    print(
        f"pruned {len(result.removed)} of {len(registry)} indicators "
        f"({len(result.missing)} listed surfaces not found)"
    )
    return 0


# ---------------------------------------------------------------------------
# harvest


def _harvest(runner: Runner, args, resume: bool) -> int:
    registry = load_registry(args.registry)
    if resume and not Path(args.checkpoint).exists():
        raise CliError(f"checkpoint not found: {args.checkpoint}")
    if runner.dry_run:
        n = len(registry.active())
        print(f"[dry-run] would harvest {n} active indicators into {args.out}")
        return 0
    gateway, params = runner.gateway(args)
    packs = PromptPackStore(args.packs) if args.packs else PromptPackStore()
    result = harvest_all(
        registry,
        packs,
        gateway,
        params,
        checkpoint_path=args.checkpoint,
        max_workers=args.max_workers,
        cap=args.cap,
    )
    runner.write_events(args.out, result.events, "harvested events")
    dup = sum(b.duplicate_count for b in result.batches.values())
    rej = sum(b.rejected_count for b in result.batches.values())
    blank = sum(b.blank_count for b in result.batches.values())
    print(
        f"harvested {len(result.events)} events from {len(result.batches)} "
        f"indicators (duplicates={dup} rejected={rej} blanks={blank} "
        f"cross-indicator collisions={result.cross_indicator_collisions} "
        f"resumed={len(result.resumed_indicators)} failures={len(result.failures)})"
    )
    for surface, message in sorted(result.failures.items()):
        print(f"  failed {surface}: {message}", file=sys.stderr)
    return 0


def cmd_harvest_run(runner: Runner, args) -> int:
    return _harvest(runner, args, resume=False)


def cmd_harvest_resume(runner: Runner, args) -> int:
    return _harvest(runner, args, resume=True)


def cmd_harvest_triage(runner: Runner, args) -> int:
    events = load_events(args.events)
    bei = [e for e in events if e.kind == "bei"]
    passthrough = [e for e in events if e.kind != "bei"]
    if runner.dry_run:
        print(f"[dry-run] would triage {len(bei)} bei events from {args.events}")
        return 0
    gateway, params = runner.gateway(args)
    result = triage_bei_neutral(bei, gateway, params)
    runner.write_events(args.out, passthrough + list(result.kept), "kept events")
    if args.discarded:
        runner.write_events(args.discarded, result.discarded, "discarded events")
    print(
        f"triaged {len(bei)} bei events: kept {len(result.kept)}, "
        f"discarded {len(result.discarded)} neutral, "
        f"errors {len(result.errors)} (passed through {len(passthrough)})"
    )
    return 0


# ---------------------------------------------------------------------------
# filter


def cmd_filter_sample(runner: Runner, args) -> int:
    events = load_events(args.events)
    surfaces = filtering.sample_for_annotation(events, k=args.per_indicator, seed=runner.seed)
    if runner.dry_run:
        print(f"[dry-run] would write {len(surfaces)} sample rows to {args.out}")
        return 0
    filtering.write_annotation_tsv(surfaces, args.out)
    print(f"sampled {len(surfaces)} events for annotation into {args.out}")
    return 0


def cmd_filter_train(runner: Runner, args) -> int:
    samples, unlabeled = filtering.read_annotation_tsv(args.annotations)
    if unlabeled:
        raise CliError(f"{unlabeled} rows in {args.annotations} are unlabeled")
    train, validation, test = filtering.split(samples, seed=runner.seed)
    model = filtering.train_filter(train, validation, seed=runner.seed)
    if runner.dry_run:
        print(f"[dry-run] would save model to {args.model}")
        return 0
    model.save(args.model)
    meta = model.training_meta
    print(
        f"trained filter on {len(train)} samples "
        f"(validation AP={meta['best_validation_ap']:.4f} "
        f"epochs={meta['epochs_run']} held-out test={len(test)})"
    )
    return 0


def cmd_filter_pr_curve(runner: Runner, args) -> int:
    model = filtering.FilterModel.load(args.model)
    samples, unlabeled = filtering.read_annotation_tsv(args.annotations)
    if unlabeled:
        raise CliError(f"{unlabeled} rows in {args.annotations} are unlabeled")
    curve = filtering.pr_curve(model, samples)
    choice = filtering.select_threshold(curve, recall_floor=args.recall_floor)
    payload = curve.as_json_dict()
    payload["selected"] = {
        "threshold": choice.threshold,
        "precision": choice.precision,
        "recall": choice.recall,
        "meets_recall_floor": choice.meets_recall_floor,
    }
    runner.write_text(args.out, _stable_json(payload), "PR curve")
    print(
        f"pr-curve: {len(curve.points)} points; selected threshold "
        f"{choice.threshold:.4f} (precision={choice.precision:.4f} "
        f"recall={choice.recall:.4f} floor_met={choice.meets_recall_floor})"
    )
    return 0


def cmd_filter_apply(runner: Runner, args) -> int:
    model = filtering.FilterModel.load(args.model)
    events = load_events(args.events)
    threshold = args.threshold if args.threshold is not None else model.threshold
    accepted, rejected = filtering.apply_filter(model, threshold, events)
    runner.write_events(args.out, accepted, "accepted events")
    if args.rejected:
        runner.write_events(args.rejected, rejected, "rejected events")
    print(
        f"filter kept {len(accepted)} and dropped {len(rejected)} of "
        f"{len(events)} events at threshold {threshold:.4f}"
    )
    return 0


# ---------------------------------------------------------------------------
# polarity


def cmd_polarity_assign(runner: Runner, args) -> int:
    events = load_events(args.events)
    registry = load_registry(args.registry)
    table = polarity.load_implicit_table(args.implicit_table) if args.implicit_table else None
    needs_gateway = any(e.kind == "bei" for e in events)
    if runner.dry_run:
        print(f"[dry-run] would assign polarity on {len(events)} events")
        return 0
    gateway = params = None
    if needs_gateway:
        gateway, params = runner.gateway(args)
    assigned = [
        polarity.assign_polarity(e, registry, gateway, params, table) for e in events
    ]
    runner.write_events(args.out, assigned, "polarized events")
    pos = sum(1 for e in assigned if e.polarity == "positive")
    neg = sum(1 for e in assigned if e.polarity == "negative")
    review = sum(1 for e in assigned if "needs_review" in e.flags)
    print(
        f"assigned polarity on {len(assigned)} events "
        f"(positive={pos} negative={neg} needs_review={review})"
    )
    return 0


# ---------------------------------------------------------------------------
# kb


def cmd_kb_stats(runner: Runner, args) -> int:
    kb = load_kb(args.kb)
    stats = kb_stats(kb)
    payload = stats.as_json_dict()
    kinds = " ".join(f"{k}={v}" for k, v in payload["by_kind"].items())
    pols = " ".join(f"{k}={v}" for k, v in payload["by_polarity"].items())
    print(f"total {stats.total} | kinds {kinds} | polarity {pols}")
    if args.out:
        runner.write_text(args.out, _stable_json(payload), "kb stats")
    return 0


def cmd_kb_query(runner: Runner, args) -> int:
    kb = load_kb(args.kb)
    hits = kb.query(
        kind=args.kind,
        polarity=args.polarity,
        indicator=args.indicator,
        substring=args.contains,
    )
    if args.limit is not None:
        hits = hits[: args.limit]
    from .events import event_to_json

    for event in hits:
        print(event_to_json(event))
    print(f"matched {len(hits)} events", file=sys.stderr)
    return 0


def cmd_kb_export(runner: Runner, args) -> int:
    kb = load_kb(args.kb)
    if runner.dry_run:
        print(f"[dry-run] would export {len(kb)} events to {args.out}")
        return 0
    count = export_kb(kb, args.out, include_needs_review=args.include_needs_review)
    print(f"exported {count} events to {args.out}")
    return 0


def cmd_kb_coverage(runner: Runner, args) -> int:
    if args.matched is not None or args.total is not None:
        if args.matched is None or args.total is None:
            raise CliError("--matched and --total go together")
        matched, total = args.matched, args.total
        ratio = sample_coverage_ratio(matched, total)
    else:
        if not args.kb or not args.nodes:
            raise CliError("need either --kb with --nodes, or --matched with --total")
        kb = load_kb(args.kb)
        nodes = _read_surface_list(args.nodes)
        matched, total, ratio = coverage(nodes, kb, matcher=args.matcher)
    print(
        f"coverage {matched}/{total} ratio={ratio:.6f} => {coverage_percent(ratio)}"
    )
    return 0


def sample_coverage_ratio(matched: int, total: int) -> float:
    if total <= 0:
        raise CliError("--total must be positive")
    if matched < 0 or matched > total:
        raise CliError("--matched must be between 0 and --total")
    return matched / total


# ---------------------------------------------------------------------------
# eval


def cmd_eval_kappa(runner: Runner, args) -> int:
    with open(args.ratings, encoding="utf-8") as fh:
        rows = json.load(fh)
    kappa = fleiss_kappa(RatingMatrix(tuple(tuple(r) for r in rows)))
    if kappa is None:
        print("fleiss_kappa undefined: no chance variance")
    else:
        print(f"fleiss_kappa {kappa:.6f}")
    return 0


def cmd_eval_precision(runner: Runner, args) -> int:
    value = sample_precision(args.correct, args.incorrect)
    print(f"precision {value:.6f} ({args.correct}/{args.correct + args.incorrect})")
    return 0


def cmd_eval_ece(runner: Runner, args) -> int:
    instances, rejected = parse_ece_corpus(args.gold)
    for record, reason in rejected:
        print(f"skipped record: {reason}", file=sys.stderr)
    with open(args.proposed, encoding="utf-8") as fh:
        pairs = json.load(fh)
    proposed = {(int(i), int(c)) for i, c in pairs}
    report = ece_metrics(proposed, instances)
    if args.out:
        runner.write_text(args.out, _stable_json(report.as_json_dict()), "ECE report")
    print(
        f"P={report.precision:.4f} R={report.recall:.4f} F={report.f_score:.4f} "
        f"(correct={report.correct} proposed={report.proposed} "
        f"annotated={report.annotated})"
    )
    return 0


def cmd_eval_ablation(runner: Runner, args) -> int:
    instances, rejected = parse_ece_corpus(args.corpus)
    if rejected:
        raise CliError(f"{len(rejected)} corpus records failed to parse")
    registry = load_registry(args.registry)
    reports: dict[str, AblationReport] = {}
    for arm, with_feature in (("with_feature", True), ("without_feature", False)):
        reports[arm] = run_ece_ablation(
            instances,
            registry,
            with_feature=with_feature,
            seed=runner.seed,
            folds=args.folds,
        )
    payload = {arm: rep.as_json_dict() for arm, rep in reports.items()}
    if args.out:
        runner.write_text(args.out, _stable_json(payload), "ablation report")
    w, wo = reports["with_feature"], reports["without_feature"]
    print(
        f"ablation: with_feature F={w.f_score:.4f} "
        f"without_feature F={wo.f_score:.4f} (delta={w.f_score - wo.f_score:+.4f})"
    )
    return 0


# ---------------------------------------------------------------------------
# argument tree


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--seed",
        type=int,
        default=None,
        help="run seed (precedence: this flag, EMOKB_SEED, config file, 0)",
    )
    shared.add_argument(
        "--config",
        default=None,
        help="JSON config path (or set EMOKB_CONFIG); flags override it",
    )
    shared.add_argument(
        "--dry-run",
        action="store_true",
        help="validate inputs and report, but write nothing and call no provider",
    )
    shared.add_argument(
        "--frozen-time",
        action="store_true",
        help="use a fixed clock so timestamps are reproducible",
    )

    mock = argparse.ArgumentParser(add_help=False)
    mock.add_argument(
        "--mock",
        action="store_true",
        help="use the seeded in-process provider instead of a configured one",
    )

    parser = argparse.ArgumentParser(
        prog="emokb",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    groups = parser.add_subparsers(dest="group", required=True)

    # indicators
    g = groups.add_parser("indicators", help="registry management")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("stats", parents=[shared], help="class and polarity counts")
    p.add_argument("--registry", required=True)
    p.add_argument("--out", default=None, help="also write the counts as JSON")
    p.set_defaults(func=cmd_indicators_stats)
    p = sub.add_parser("expand", parents=[shared], help="fill a morphological template")
    p.add_argument("--class", dest="template_class", required=True,
                   choices=sorted(TEMPLATE_CLASSES))
    p.add_argument("--lexicon", required=True, help="verb list, one per line")
    p.add_argument("--registry", default=None, help="merge into this registry")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_indicators_expand)
    p = sub.add_parser("compose", parents=[shared], help="compose 被 indicators")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--registry", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_indicators_compose)
    p = sub.add_parser("prune", parents=[shared], help="drop weak/ambiguous entries")
    p.add_argument("--registry", required=True)
    p.add_argument("--weak", default=None, help="surfaces to drop, one per line")
    p.add_argument("--ambiguous", default=None)
    p.add_argument("--flagged", action="store_true",
                   help="also drop rows flagged weak/ambiguous in the registry")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_indicators_prune)

    # harvest
    g = groups.add_parser("harvest", help="generate events from indicators")
    sub = g.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_harvest_run), ("resume", cmd_harvest_resume)):
        p = sub.add_parser(name, parents=[shared, mock])
        p.add_argument("--registry", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--checkpoint", default=None, required=(name == "resume"))
        p.add_argument("--packs", default=None, help="prompt pack directory")
        p.add_argument("--cap", type=int, default=100)
        p.add_argument("--max-workers", type=int, default=1)
        p.set_defaults(func=fn)
    p = sub.add_parser("triage", parents=[shared, mock],
                       help="drop emotionally neutral bei events")
    p.add_argument("--events", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--discarded", default=None)
    p.set_defaults(func=cmd_harvest_triage)

    # filter
    g = groups.add_parser("filter", help="validity filtering")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("sample", parents=[shared], help="draw an annotation sample")
    p.add_argument("--events", required=True)
    p.add_argument("--per-indicator", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_sample)
    p = sub.add_parser("train", parents=[shared])
    p.add_argument("--annotations", required=True)
    p.add_argument("--model", required=True, help="output model path (.npz)")
    p.set_defaults(func=cmd_filter_train)
    p = sub.add_parser("pr-curve", parents=[shared])
    p.add_argument("--model", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--recall-floor", type=float, default=0.80)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_pr_curve)
    p = sub.add_parser("apply", parents=[shared])
    p.add_argument("--model", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--threshold", type=float, default=None,
                   help="override the model's stored threshold")
    p.add_argument("--out", required=True)
    p.add_argument("--rejected", default=None)
    p.set_defaults(func=cmd_filter_apply)

    # polarity
    g = groups.add_parser("polarity", help="positive/negative assignment")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("assign", parents=[shared, mock])
    p.add_argument("--events", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--implicit-table", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_polarity_assign)

    # kb
    g = groups.add_parser("kb", help="knowledge base store")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("stats", parents=[shared])
    p.add_argument("--kb", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kb_stats)
    p = sub.add_parser("query", parents=[shared])
    p.add_argument("--kb", required=True)
    p.add_argument("--kind", default=None)
    p.add_argument("--polarity", default=None)
    p.add_argument("--indicator", default=None)
    p.add_argument("--contains", default=None)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_kb_query)
    p = sub.add_parser("export", parents=[shared])
    p.add_argument("--kb", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--include-needs-review", action="store_true")
    p.set_defaults(func=cmd_kb_export)
    p = sub.add_parser("coverage", parents=[shared])
    p.add_argument("--kb", default=None)
    p.add_argument("--nodes", default=None, help="node surfaces, one per line")
    p.add_argument("--matcher", choices=("exact", "normalized-exact"),
                   default="exact")
    p.add_argument("--matched", type=int, default=None,
                   help="precomputed numerator (skips --kb/--nodes)")
    p.add_argument("--total", type=int, default=None)
    p.set_defaults(func=cmd_kb_coverage)

    # eval
    g = groups.add_parser("eval", help="evaluation arithmetic")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("kappa", parents=[shared])
    p.add_argument("--ratings", required=True,
                   help="JSON list of per-item rating rows")
    p.set_defaults(func=cmd_eval_kappa)
    p = sub.add_parser("precision", parents=[shared])
    p.add_argument("--correct", type=int, required=True)
    p.add_argument("--incorrect", type=int, required=True)
    p.set_defaults(func=cmd_eval_precision)
    p = sub.add_parser("ece", parents=[shared])
    p.add_argument("--proposed", required=True,
                   help="JSON list of [instance, clause] index pairs")
    p.add_argument("--gold", required=True, help="annotated corpus file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval_ece)
    p = sub.add_parser("ablation", parents=[shared])
    p.add_argument("--corpus", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval_ablation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        runner = Runner(args)
        return args.func(runner, args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing input: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
