"""Validity filtering for harvested events.

The pipeline samples a small per-indicator slice of the raw set for human
annotation, splits the labeled data 80/10/10 stratified by label, trains a
logistic classifier over hashed character n-grams, picks an operating
threshold from the precision-recall curve, and partitions the raw set by
score. A production-grade neural scorer can replace the in-repo model through
the line-delimited JSON scorer protocol (see scorer_client).

Everything here is seeded and single-threaded; identical inputs and seed give
identical models, curves and splits.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .events import EmotionalEvent

logger = logging.getLogger(__name__)

LABELS = ("valid", "invalid")

ANNOTATION_HEADER = ("event", "label")


class FilterError(ValueError):
    """Bad labeled data or a training run that cannot proceed."""


@dataclass(frozen=True)
class LabeledSample:
    event_surface: str
    label: str
    annotator_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.label not in LABELS:
            raise FilterError(f"unknown label {self.label!r}")
        if not self.event_surface:
            raise FilterError("empty event surface")


# ---------------------------------------------------------------------------
# Annotation sampling and file round-trip.


def sample_for_annotation(raw_set, k: int = 10, seed: int = 0) -> list[str]:
    """Per-indicator uniform sample of event surfaces for human labeling.
    Indicators with fewer than k events contribute all of them. Output is
    sorted by (indicator, surface) so the annotation file is stable."""
    if k < 1:
        raise ValueError("k must be >= 1")
    events = list(raw_set)
    if not events:
        raise FilterError("cannot sample from an empty raw set")
    by_indicator: dict[str, list[str]] = {}
    for event in events:
        if event.indicator_surface is None:
            continue
        by_indicator.setdefault(event.indicator_surface, []).append(event.surface)
    picked: list[tuple[str, str]] = []
    for indicator in sorted(by_indicator):
        population = sorted(set(by_indicator[indicator]))
        rng = random.Random(f"{seed}:{indicator}")
        chosen = population if len(population) <= k else rng.sample(population, k)
        picked.extend((indicator, surface) for surface in chosen)
    picked.sort()
    return [surface for _indicator, surface in picked]


def write_annotation_tsv(surfaces, path: str | Path) -> None:
    """Emit the annotation worksheet: header ``event<TAB>label``, labels left
    empty for the annotators to fill in."""
    lines = ["\t".join(ANNOTATION_HEADER)]
    lines += [f"{surface}\t" for surface in surfaces]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_annotation_tsv(path: str | Path) -> tuple[list[LabeledSample], int]:
    """Ingest a completed annotation file. Returns (labeled samples, count of
    rows still unlabeled). Unknown labels are an error."""
    path = Path(path)
    samples: list[LabeledSample] = []
    unlabeled = 0
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != ANNOTATION_HEADER:
            raise FilterError(f"{path}:1: bad header {header!r}, expected event<TAB>label")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise FilterError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
            surface, label = fields[0].strip(), fields[1].strip()
            if not label:
                unlabeled += 1
                continue
            if label not in LABELS:
                raise FilterError(f"{path}:{lineno}: unknown label {label!r}")
            samples.append(LabeledSample(surface, label))
    return samples, unlabeled


# ---------------------------------------------------------------------------
# Stratified 80/10/10 split.


def split(
    labeled: list[LabeledSample],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> tuple[list[LabeledSample], list[LabeledSample], list[LabeledSample]]:
    """Disjoint stratified partition into (train, validation, test). Part
    sizes are floor(ratio*N) with the remainder going to train; within each
    part every label's share stays within one sample of proportional."""
    n = len(labeled)
    if n < 10:
        raise FilterError(f"need at least 10 labeled samples, got {n}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    by_label: dict[str, list[LabeledSample]] = {}
    for sample in labeled:
        by_label.setdefault(sample.label, []).append(sample)
    for label, group in by_label.items():
        if len(group) < 3:
            raise FilterError(
                f"label {label!r} has only {len(group)} samples; need >= 3 to stratify"
            )

    sizes = [int(ratio * n) for ratio in ratios]
    sizes[0] += n - sum(sizes)  # remainder to train

    labels = sorted(by_label)
    counts = {lab: len(by_label[lab]) for lab in labels}
    # per-(label, part) quota: floor, then distribute the shortfall greedily
    # by fractional remainder without exceeding row/column sums
    floors = {
        (lab, p): (counts[lab] * sizes[p]) // n for lab in labels for p in range(3)
    }
    row_def = {lab: counts[lab] - sum(floors[(lab, p)] for p in range(3)) for lab in labels}
    col_def = {p: sizes[p] - sum(floors[(lab, p)] for lab in labels) for p in range(3)}
    fracs = sorted(
        ((lab, p) for lab in labels for p in range(3)),
        key=lambda cell: (
            -(counts[cell[0]] * sizes[cell[1]] % n),
            cell[1],
            cell[0],
        ),
    )
    cell = dict(floors)
    for lab, p in fracs:
        if row_def[lab] > 0 and col_def[p] > 0:
            cell[(lab, p)] += 1
            row_def[lab] -= 1
            col_def[p] -= 1
    # rare completion step when the greedy pass dead-ends (many labels)
    for lab in labels:
        while row_def[lab] > 0:
            p = next(q for q in range(3) if col_def[q] > 0)
            cell[(lab, p)] += 1
            row_def[lab] -= 1
            col_def[p] -= 1

    parts: tuple[list[LabeledSample], ...] = ([], [], [])
    for lab in labels:
        group = list(by_label[lab])
        random.Random(f"{seed}:{lab}").shuffle(group)
        offset = 0
        for p in range(3):
            take = cell[(lab, p)]
            parts[p].extend(group[offset : offset + take])
            offset += take
    return parts


# ---------------------------------------------------------------------------
# Hashed n-gram features.


@dataclass(frozen=True)
class FeatureSpec:
    ngram_orders: tuple[int, ...] = (1, 2, 3)
    dim: int = 2**18

    def __post_init__(self):
        if not self.ngram_orders or any(o < 1 for o in self.ngram_orders):
            raise ValueError("n-gram orders must be positive")
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")


def _feature_index(order: int, gram: str, dim: int) -> int:
    digest = hashlib.blake2b(
        f"{order}|{gram}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little") % dim


def hash_features(texts, spec: FeatureSpec) -> sparse.csr_matrix:
    """Character n-gram counts hashed into a fixed dimension. The hash is
    content-stable across processes and platforms."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for text in texts:
        counts: dict[int, float] = {}
        for order in spec.ngram_orders:
            for i in range(len(text) - order + 1):
                idx = _feature_index(order, text[i : i + order], spec.dim)
                counts[idx] = counts.get(idx, 0.0) + 1.0
        for idx in sorted(counts):
            indices.append(idx)
            data.append(counts[idx])
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(indptr) - 1, spec.dim),
    )


# ---------------------------------------------------------------------------
# Model and training.


@dataclass
class FilterModel:
    feature_spec: FeatureSpec
    weights: np.ndarray  # hashed dim coefficients + bias as the last entry
    threshold: float
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.weights) != self.feature_spec.dim + 1:
            raise ValueError(
                f"weights must have dim+1 entries, got {len(self.weights)} "
                f"for dim {self.feature_spec.dim}"
            )
        if not (0.0 <= self.threshold <= 1.0):
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")

    def score_texts(self, texts) -> np.ndarray:
        texts = list(texts)
        if not texts:
            return np.zeros(0)
        X = hash_features(texts, self.feature_spec)
        z = X @ self.weights[:-1] + self.weights[-1]
        return 1.0 / (1.0 + np.exp(-z))

    def save(self, path: str | Path) -> None:
        np.savez_compressed(
            path,
            weights=self.weights,
            threshold=np.array([self.threshold]),
            ngram_orders=np.array(self.feature_spec.ngram_orders),
            dim=np.array([self.feature_spec.dim]),
            training_meta=np.array([json.dumps(self.training_meta, ensure_ascii=False)]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "FilterModel":
        with np.load(path, allow_pickle=False) as archive:
            spec = FeatureSpec(
                tuple(int(o) for o in archive["ngram_orders"]),
                int(archive["dim"][0]),
            )
            return cls(
                feature_spec=spec,
                weights=archive["weights"],
                threshold=float(archive["threshold"][0]),
                training_meta=json.loads(str(archive["training_meta"][0])),
            )


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 0.5
    lr_decay: float = 0.1  # lr_t = lr / (1 + decay * epoch)
    patience: int = 5  # epochs without validation improvement before stopping
    feature_spec: FeatureSpec = field(default_factory=FeatureSpec)


def average_precision(labels: np.ndarray, scores: np.ndarray) -> float:
    """Step-wise average precision over descending score groups (ties are
    processed together). Returns 0 when there are no positives."""
    labels = np.asarray(labels, dtype=float)
    scores = np.asarray(scores, dtype=float)
    total_pos = labels.sum()
    if total_pos == 0:
        return 0.0
    order = np.argsort(-scores, kind="stable")
    labels, scores = labels[order], scores[order]
    ap = 0.0
    tp = fp = 0.0
    prev_recall = 0.0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j < n and scores[j] == scores[i]:
            j += 1
        tp += labels[i:j].sum()
        fp += (j - i) - labels[i:j].sum()
        recall = tp / total_pos
        precision = tp / (tp + fp)
        ap += (recall - prev_recall) * precision
        prev_recall = recall
        i = j
    return float(ap)


def train_filter(
    train: list[LabeledSample],
    validation: list[LabeledSample],
    config: TrainingConfig | None = None,
    seed: int = 0,
) -> FilterModel:
    """Seeded minibatch logistic regression from zero-initialized weights,
    with learning-rate decay and early stopping on validation average
    precision. The best-epoch weights are kept, not the last."""
    config = config or TrainingConfig()
    if not train:
        raise FilterError("empty training set")
    train_labels = {s.label for s in train}
    if len(train_labels) < 2:
        raise FilterError(f"training set has a single label: {train_labels.pop()!r}")
    if not validation:
        raise FilterError("empty validation set")

    spec = config.feature_spec
    X = hash_features([s.event_surface for s in train], spec)
    y = np.array([1.0 if s.label == "valid" else 0.0 for s in train])
    Xv = hash_features([s.event_surface for s in validation], spec)
    yv = np.array([1.0 if s.label == "valid" else 0.0 for s in validation])

    rng = random.Random(f"{seed}:train")
    w = np.zeros(spec.dim)
    b = 0.0
    best = (w.copy(), b)
    best_ap = -1.0
    best_epoch = -1
    stale = 0
    n = X.shape[0]
    epochs_run = 0
    for epoch in range(config.epochs):
        epochs_run = epoch + 1
        lr = config.learning_rate / (1.0 + config.lr_decay * epoch)
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            Xb = X[idx]
            z = Xb @ w + b
            p = 1.0 / (1.0 + np.exp(-z))
            if not np.all(np.isfinite(p)):
                raise FilterError(f"non-finite activations at epoch {epoch}")
            g = p - y[idx]
            w -= lr * (Xb.T @ g) / len(idx)
            b -= lr * float(g.mean())
        val_scores = 1.0 / (1.0 + np.exp(-(Xv @ w + b)))
        ap = average_precision(yv, val_scores)
        if ap > best_ap + 1e-12:
            best_ap = ap
            best = (w.copy(), b)
            best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break

    weights = np.concatenate([best[0], [best[1]]])
    meta = {
        "seed": seed,
        "epochs_run": epochs_run,
        "best_epoch": best_epoch,
        "best_validation_ap": best_ap,
        "batch_size": config.batch_size,
        "learning_rate": config.learning_rate,
        "lr_decay": config.lr_decay,
        "n_train": len(train),
        "n_validation": len(validation),
    }
    return FilterModel(spec, weights, threshold=0.5, training_meta=meta)


# ---------------------------------------------------------------------------
# Precision-recall curves and threshold selection.


@dataclass(frozen=True)
class PRCurve:
    points: tuple[tuple[float, float, float], ...]  # (threshold, precision, recall)

    def __post_init__(self):
        thresholds = [t for t, _p, _r in self.points]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("curve thresholds must be strictly increasing")
        recalls = [r for _t, _p, r in self.points]
        if any(b > a + 1e-12 for a, b in zip(recalls, recalls[1:])):
            raise ValueError("recall must be non-increasing as the threshold grows")

    def as_json_dict(self) -> dict:
        return {
            "points": [
                {"threshold": t, "precision": p, "recall": r}
                for t, p, r in self.points
            ]
        }


def pr_curve_from_scores(labels, scores) -> PRCurve:
    """Sweep every distinct score as a threshold (ascending); at each one,
    predict valid iff score >= threshold."""
    labels = np.asarray(labels, dtype=float)
    scores = np.asarray(scores, dtype=float)
    if len(labels) == 0:
        raise FilterError("empty evaluation set")
    if labels.min() == labels.max():
        raise FilterError("evaluation set must contain both labels")
    total_pos = labels.sum()
    points = []
    for t in np.unique(scores):
        preds = scores >= t
        tp = float((labels * preds).sum())
        fp = float(((1 - labels) * preds).sum())
        precision = tp / (tp + fp)
        recall = tp / total_pos
        points.append((float(t), precision, recall))
    return PRCurve(tuple(points))


def pr_curve(model: FilterModel, eval_set: list[LabeledSample]) -> PRCurve:
    labels = [1.0 if s.label == "valid" else 0.0 for s in eval_set]
    scores = model.score_texts([s.event_surface for s in eval_set])
    return pr_curve_from_scores(labels, scores)


@dataclass(frozen=True)
class ThresholdChoice:
    threshold: float
    precision: float
    recall: float
    meets_recall_floor: bool


def select_threshold(curve: PRCurve, recall_floor: float = 0.80) -> ThresholdChoice:
    """Highest-precision point with recall >= floor; ties prefer higher
    recall, then the lower threshold. When nothing reaches the floor, the
    max-recall point is returned flagged."""
    if not curve.points:
        raise FilterError("empty curve")
    eligible = [pt for pt in curve.points if pt[2] >= recall_floor]
    if eligible:
        t, p, r = min(eligible, key=lambda pt: (-pt[1], -pt[2], pt[0]))
        return ThresholdChoice(t, p, r, True)
    t, p, r = min(curve.points, key=lambda pt: (-pt[2], -pt[1], pt[0]))
    logger.warning(
        "no curve point reaches recall %.2f; falling back to max-recall point %.3f",
        recall_floor,
        r,
    )
    return ThresholdChoice(t, p, r, False)


# ---------------------------------------------------------------------------
# Applying the filter.


def apply_filter(
    model: FilterModel,
    threshold: float,
    events,
) -> tuple[list[EmotionalEvent], list[EmotionalEvent]]:
    """Exact partition of events into (accepted, filtered_out) by comparing
    each surface's score with the threshold. Scores are recorded on both
    sides. Implicit events bypass the filter and are rejected here."""
    events = list(events)
    for event in events:
        if event.kind == "implicit":
            raise FilterError(f"implicit event {event.surface!r} bypasses the filter")
    if not events:
        return [], []
    scores = model.score_texts([e.surface for e in events])
    accepted: list[EmotionalEvent] = []
    filtered_out: list[EmotionalEvent] = []
    for event, score in zip(events, scores):
        score = float(score)
        if score >= threshold:
            accepted.append(event.with_status("accepted", validity_score=score))
        else:
            filtered_out.append(
                event.with_status("filtered_out_invalid", validity_score=score)
            )
    return accepted, filtered_out
