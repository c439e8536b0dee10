"""Independent brute-force oracles, written before the tests that cite them
and kept deliberately dumb: plain loops, exact rational arithmetic where the
reference values demand it, no shared code with the package under test.
"""

from __future__ import annotations

from fractions import Fraction


def pr_points_oracle(labels, scores):
    """Precision/recall at every distinct score threshold (ascending), with
    prediction rule score >= threshold, by direct confusion counting."""
    assert len(labels) == len(scores)
    points = []
    for threshold in sorted(set(scores)):
        tp = fp = fn = 0
        for label, score in zip(labels, scores):
            predicted = score >= threshold
            if predicted and label:
                tp += 1
            elif predicted and not label:
                fp += 1
            elif not predicted and label:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        points.append((threshold, precision, recall))
    return points


def average_precision_oracle(labels, scores):
    """Sum over descending-score tie groups of (recall step x precision at the
    group), computed with exact fractions then converted to float."""
    n_pos = sum(1 for y in labels if y)
    if n_pos == 0:
        return 0.0
    groups: dict[float, list[int]] = {}
    for label, score in zip(labels, scores):
        groups.setdefault(score, []).append(1 if label else 0)
    tp = 0
    seen = 0
    ap = Fraction(0)
    for score in sorted(groups, reverse=True):
        tp += sum(groups[score])
        seen += len(groups[score])
        recall_prev = Fraction(tp - sum(groups[score]), n_pos)
        recall_now = Fraction(tp, n_pos)
        precision_now = Fraction(tp, seen)
        ap += (recall_now - recall_prev) * precision_now
    return float(ap)


def fleiss_kappa_oracle(rows):
    """Exact-fraction Fleiss kappa over a list of rating rows (each row: the
    category chosen by each of n raters for one item). Returns None when the
    chance agreement is 1 (kappa undefined)."""
    n_items = len(rows)
    n_raters = len(rows[0])
    categories = sorted({c for row in rows for c in row})
    counts = [[row.count(cat) for cat in categories] for row in rows]

    p_bar = Fraction(0)
    for row_counts in counts:
        agree = sum(c * c for c in row_counts) - n_raters
        p_bar += Fraction(agree, n_raters * (n_raters - 1))
    p_bar /= n_items

    p_e = Fraction(0)
    for j in range(len(categories)):
        share = Fraction(sum(counts[i][j] for i in range(n_items)), n_items * n_raters)
        p_e += share * share

    if p_e >= 1:
        return None
    return float((p_bar - p_e) / (1 - p_e))


def ece_counts_oracle(proposed, gold_cause_sets):
    """(correct, proposed_count, annotated_count) by plain membership
    counting. gold_cause_sets[i] is the set of cause clause indices of
    instance i; proposed is an iterable of (instance, clause) pairs."""
    proposed = set(proposed)
    correct = 0
    for inst_idx, clause_idx in proposed:
        if inst_idx < len(gold_cause_sets) and clause_idx in gold_cause_sets[inst_idx]:
            correct += 1
    annotated = sum(len(s) for s in gold_cause_sets)
    return correct, len(proposed), annotated


def prf_oracle(correct, proposed, annotated):
    precision = correct / proposed if proposed else 0.0
    recall = correct / annotated if annotated else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f


def clause_split_oracle(text):
    """Split on the five clause delimiters by character walk; drop empty and
    whitespace-only pieces, strip surrounding whitespace."""
    delimiters = set("，。！？；")
    pieces = []
    current = []
    for ch in text:
        if ch in delimiters:
            pieces.append("".join(current))
            current = []
        else:
            current.append(ch)
    pieces.append("".join(current))
    return [p.strip() for p in pieces if p.strip()]
