"""Evaluation arithmetic for the harvested knowledge base and its downstream
use in emotion cause extraction (ECE).

Pieces: sampled-precision of human audits, Fleiss kappa over rating matrices,
an ECE corpus reader (inline <cause>/<keyword> markup over clause-segmented
news text), clause-level precision/recall/F over proposed cause clauses, and
a with/without ablation of the indicator-presence feature around a small
cross-validated clause classifier.

All functions here are pure and seeded; the ablation derives per-fold RNGs
from (seed, fold) so serial and parallel execution agree.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .filtering import FeatureSpec, hash_features
from .indicators import IndicatorRegistry

logger = logging.getLogger(__name__)

CLAUSE_DELIMITERS = "，。！？；"


# ---------------------------------------------------------------------------
# Sampled precision and Fleiss kappa.


def sample_precision(c: int, i: int) -> float:
    """Fraction of audited events judged valid: c/(c+i)."""
    if c < 0 or i < 0:
        raise ValueError("counts must be non-negative")
    if c + i == 0:
        raise ValueError("no audited events")
    return c / (c + i)


@dataclass(frozen=True)
class RatingMatrix:
    """N items x n raters, each cell a category label."""

    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("rating matrix needs at least one item")
        n = len(self.rows[0])
        if n < 2:
            raise ValueError("need at least two raters")
        for idx, row in enumerate(self.rows):
            if len(row) != n:
                raise ValueError(f"item {idx} has {len(row)} ratings, expected {n}")
            if any(not cell for cell in row):
                raise ValueError(f"item {idx} has an empty rating")

    @property
    def n_raters(self) -> int:
        return len(self.rows[0])


def fleiss_kappa(matrix: RatingMatrix) -> float | None:
    """Chance-corrected agreement kappa = (Pbar - Pe) / (1 - Pe). Returns
    None when every rater used one single category everywhere (Pe = 1, the
    correction is undefined). Unanimous rows with at least two categories in
    play give exactly 1.0."""
    n = matrix.n_raters
    categories = sorted({cell for row in matrix.rows for cell in row})
    counts = [
        [sum(1 for cell in row if cell == cat) for cat in categories]
        for row in matrix.rows
    ]
    big_n = len(counts)
    p_i = [
        (sum(c * c for c in row) - n) / (n * (n - 1))
        for row in counts
    ]
    p_bar = sum(p_i) / big_n
    totals = [sum(row[j] for row in counts) for j in range(len(categories))]
    p_j = [t / (big_n * n) for t in totals]
    p_e = sum(p * p for p in p_j)
    if p_e >= 1.0:
        return None
    return (p_bar - p_e) / (1.0 - p_e)


# ---------------------------------------------------------------------------
# Clause segmentation.


def segment_clause_spans(text: str) -> list[tuple[str, int, int]]:
    """Clauses with their [start, end) character ranges in the input. Splits
    on the delimiter set, drops delimiters and empty segments, trims
    whitespace while keeping the ranges aligned with the trimmed text."""
    spans: list[tuple[str, int, int]] = []
    start = 0
    for idx in range(len(text) + 1):
        at_end = idx == len(text)
        if at_end or text[idx] in CLAUSE_DELIMITERS:
            raw = text[start:idx]
            lead = len(raw) - len(raw.lstrip())
            clause = raw.strip()
            if clause:
                spans.append((clause, start + lead, start + lead + len(clause)))
            start = idx + 1
    return spans


def segment_clauses(text: str) -> list[str]:
    return [clause for clause, _s, _e in segment_clause_spans(text)]


# ---------------------------------------------------------------------------
# ECE corpus parsing.


@dataclass(frozen=True)
class ECEInstance:
    clauses: tuple[str, ...]
    keyword_clause: int
    cause_clauses: frozenset[int]

    def __post_init__(self):
        if not self.clauses:
            raise ValueError("instance has no clauses")
        if not (0 <= self.keyword_clause < len(self.clauses)):
            raise ValueError(f"keyword clause {self.keyword_clause} out of range")
        if not self.cause_clauses:
            raise ValueError("instance has no cause clauses")
        for idx in self.cause_clauses:
            if not (0 <= idx < len(self.clauses)):
                raise ValueError(f"cause clause {idx} out of range")


_TAG_RE = re.compile(r"</?(cause|keyword)>")


def _strip_markup(record: str) -> tuple[str, list[tuple[int, int]], list[tuple[int, int]]]:
    """Plain text plus keyword and cause spans in plain-text coordinates.
    Raises ValueError on unbalanced or nested tags."""
    plain: list[str] = []
    keyword_spans: list[tuple[int, int]] = []
    cause_spans: list[tuple[int, int]] = []
    pos = 0
    open_tag: str | None = None
    open_start = 0
    plain_len = 0
    for m in _TAG_RE.finditer(record):
        chunk = record[pos : m.start()]
        plain.append(chunk)
        plain_len += len(chunk)
        tag = m.group(0)
        name = m.group(1)
        if not tag.startswith("</"):
            if open_tag is not None:
                raise ValueError(f"nested <{name}> inside <{open_tag}>")
            open_tag = name
            open_start = plain_len
        else:
            if open_tag != name:
                raise ValueError(f"unbalanced </{name}>")
            span = (open_start, plain_len)
            if span[0] == span[1]:
                raise ValueError(f"empty <{name}> span")
            (keyword_spans if name == "keyword" else cause_spans).append(span)
            open_tag = None
        pos = m.end()
    if open_tag is not None:
        raise ValueError(f"unclosed <{open_tag}>")
    plain.append(record[pos:])
    return "".join(plain), keyword_spans, cause_spans


def _overlapping_clauses(
    span: tuple[int, int], clause_spans: list[tuple[str, int, int]]
) -> list[int]:
    s, e = span
    return [
        i for i, (_c, cs, ce) in enumerate(clause_spans) if s < ce and e > cs
    ]


def parse_ece_record(record: str) -> ECEInstance:
    """One markup record -> instance. The record must carry exactly one
    keyword span and at least one cause span; a cause span crossing a clause
    boundary marks every clause it touches."""
    plain, keyword_spans, cause_spans = _strip_markup(record)
    if len(keyword_spans) != 1:
        raise ValueError(f"expected exactly 1 keyword span, found {len(keyword_spans)}")
    if not cause_spans:
        raise ValueError("no cause spans")
    clause_spans = segment_clause_spans(plain)
    if not clause_spans:
        raise ValueError("record segments into zero clauses")
    keyword_hits = _overlapping_clauses(keyword_spans[0], clause_spans)
    if not keyword_hits:
        raise ValueError("keyword span maps to no clause")
    cause_idx: set[int] = set()
    for span in cause_spans:
        hits = _overlapping_clauses(span, clause_spans)
        if not hits:
            raise ValueError("cause span maps to no clause")
        cause_idx.update(hits)
    return ECEInstance(
        clauses=tuple(clause for clause, _s, _e in clause_spans),
        keyword_clause=keyword_hits[0],
        cause_clauses=frozenset(cause_idx),
    )


def parse_ece_corpus(
    path: str | Path,
) -> tuple[list[ECEInstance], list[tuple[str, str]]]:
    """Blank-line separated records -> (instances, rejected records with
    reasons). Lines inside a record are concatenated before segmentation."""
    text = Path(path).read_text(encoding="utf-8")
    instances: list[ECEInstance] = []
    rejected: list[tuple[str, str]] = []
    for block in re.split(r"\n\s*\n", text):
        record = "".join(line.strip() for line in block.splitlines() if line.strip())
        if not record:
            continue
        try:
            instances.append(parse_ece_record(record))
        except ValueError as exc:
            rejected.append((record, str(exc)))
    return instances, rejected


# ---------------------------------------------------------------------------
# Indicator feature and clause vectors.


def indicator_feature(clause: str, registry: IndicatorRegistry) -> int:
    """1 iff any indicator surface occurs as a contiguous substring."""
    return 1 if any(ind.surface in clause for ind in registry) else 0


@dataclass(frozen=True)
class ClauseVector:
    tokens: tuple


def augment_clause_vector(vec: ClauseVector, bit: int) -> ClauseVector:
    """Append the indicator bit as one extra dimension; the input vector is
    untouched."""
    if bit not in (0, 1):
        raise ValueError(f"feature bit must be 0 or 1, got {bit!r}")
    return ClauseVector(vec.tokens + (bit,))


# ---------------------------------------------------------------------------
# Metrics.


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f_score: float
    correct: int
    proposed: int
    annotated: int

    def as_json_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "correct": self.correct,
            "proposed": self.proposed,
            "annotated": self.annotated,
        }


def f_score(precision: float, recall: float) -> float:
    """Harmonic mean with the 0/0 -> 0 convention."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def ece_metrics(
    proposed: set[tuple[int, int]], gold: list[ECEInstance]
) -> MetricsReport:
    """Clause-level scores: correct = proposed pairs that are annotated
    causes; precision over all proposals, recall over all annotated causes,
    both 0 when their denominator is 0."""
    gold_pairs: set[tuple[int, int]] = set()
    for i, instance in enumerate(gold):
        for c in instance.cause_clauses:
            gold_pairs.add((i, c))
    for inst_idx, clause_idx in proposed:
        if not (0 <= inst_idx < len(gold)):
            raise ValueError(f"proposed pair references instance {inst_idx} out of range")
        if not (0 <= clause_idx < len(gold[inst_idx].clauses)):
            raise ValueError(
                f"proposed pair references clause {clause_idx} out of range "
                f"for instance {inst_idx}"
            )
    correct = len(proposed & gold_pairs)
    n_proposed = len(proposed)
    n_annotated = len(gold_pairs)
    precision = correct / n_proposed if n_proposed else 0.0
    recall = correct / n_annotated if n_annotated else 0.0
    return MetricsReport(
        precision=precision,
        recall=recall,
        f_score=f_score(precision, recall),
        correct=correct,
        proposed=n_proposed,
        annotated=n_annotated,
    )


# ---------------------------------------------------------------------------
# Ablation: does the indicator bit help a simple clause classifier?


@dataclass(frozen=True)
class AblationReport:
    with_feature: bool
    folds: tuple[MetricsReport, ...]
    precision: float  # mean over folds
    recall: float
    f_score: float

    def as_json_dict(self) -> dict:
        return {
            "with_feature": self.with_feature,
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "folds": [f.as_json_dict() for f in self.folds],
        }


_ABLATION_SPEC = FeatureSpec(ngram_orders=(1, 2, 3), dim=2**16)


def _clause_matrix(
    clauses: list[str], registry: IndicatorRegistry, with_feature: bool
) -> sparse.csr_matrix:
    X = hash_features(clauses, _ABLATION_SPEC)
    bits = np.array(
        [[float(indicator_feature(c, registry))] for c in clauses]
    )
    # the bit column exists in both arms so the only difference is its value
    column = bits if with_feature else np.zeros_like(bits)
    return sparse.hstack([X, sparse.csr_matrix(column)], format="csr")


def _train_logistic(
    X: sparse.csr_matrix, y: np.ndarray, seed: str, epochs: int = 30,
    batch_size: int = 32, lr: float = 0.5, decay: float = 0.1,
) -> np.ndarray:
    """Zero-initialized minibatch logistic regression; returns weights with
    the bias as the last entry."""
    rng = random.Random(seed)
    w = np.zeros(X.shape[1])
    b = 0.0
    n = X.shape[0]
    for epoch in range(epochs):
        step = lr / (1.0 + decay * epoch)
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            Xb = X[idx]
            p = 1.0 / (1.0 + np.exp(-(Xb @ w + b)))
            g = p - y[idx]
            w -= step * (Xb.T @ g) / len(idx)
            b -= step * float(g.mean())
    return np.concatenate([w, [b]])


def run_ece_ablation(
    corpus: list[ECEInstance],
    registry: IndicatorRegistry,
    with_feature: bool,
    seed: int = 0,
    folds: int = 10,
    include_keyword_clause: bool = False,
) -> AblationReport:
    """Cross-validated cause-clause detection with and without the indicator
    bit. Candidate clauses exclude the keyword clause unless asked otherwise.
    Reported precision/recall/F are fold means; each fold's own triple obeys
    the harmonic identity, the means generally do not."""
    if not corpus:
        raise ValueError("empty corpus")
    if len(corpus) < folds:
        logger.warning(
            "corpus of %d instances cannot fill %d folds; using leave-one-out",
            len(corpus),
            folds,
        )
        folds = len(corpus)

    order = list(range(len(corpus)))
    random.Random(f"{seed}:folds").shuffle(order)
    fold_slices: list[list[int]] = [[] for _ in range(folds)]
    for pos, inst_idx in enumerate(order):
        fold_slices[pos % folds].append(inst_idx)

    def candidates(instance: ECEInstance) -> list[int]:
        return [
            idx
            for idx in range(len(instance.clauses))
            if include_keyword_clause or idx != instance.keyword_clause
        ]

    reports: list[MetricsReport] = []
    for fold in range(folds):
        test_idx = set(fold_slices[fold])
        train_clauses: list[str] = []
        train_labels: list[float] = []
        for i, instance in enumerate(corpus):
            if i in test_idx:
                continue
            for c in candidates(instance):
                train_clauses.append(instance.clauses[c])
                train_labels.append(1.0 if c in instance.cause_clauses else 0.0)
        weights = _train_logistic(
            _clause_matrix(train_clauses, registry, with_feature),
            np.array(train_labels),
            seed=f"{seed}:{fold}",
        )
        proposed: set[tuple[int, int]] = set()
        gold_fold: list[ECEInstance] = []
        fold_map: dict[int, int] = {}
        for i in sorted(test_idx):
            fold_map[i] = len(gold_fold)
            gold_fold.append(corpus[i])
        for i in sorted(test_idx):
            instance = corpus[i]
            cand = candidates(instance)
            if not cand:
                continue
            X = _clause_matrix([instance.clauses[c] for c in cand], registry, with_feature)
            scores = 1.0 / (1.0 + np.exp(-(X @ weights[:-1] + weights[-1])))
            for c, score in zip(cand, scores):
                if score >= 0.5:
                    proposed.add((fold_map[i], c))
        reports.append(ece_metrics(proposed, gold_fold))

    return AblationReport(
        with_feature=with_feature,
        folds=tuple(reports),
        precision=float(np.mean([r.precision for r in reports])),
        recall=float(np.mean([r.recall for r in reports])),
        f_score=float(np.mean([r.f_score for r in reports])),
    )
