"""Scoring of prediction files: accuracy, paired consistency, artifact
neutralization, class distribution, scaling curves, and a hypothesis-only
rule baseline.

Consistency is the fraction of contrast pairs where both members are
predicted correctly; because pair members share a hypothesis but flip the
label, any predictor that looks only at the hypothesis scores exactly 0.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .artifact_stats import NgramLabelCounts
from .corpus import (
    Dataset,
    LABEL_ORDER,
    Label,
    Ngram,
    NliExample,
    extract_ngrams,
    ngram_text,
    tokenize,
)
from .errors import DataFormatError, EvaluationError

__all__ = [
    "PredictionRecord",
    "EvalReport",
    "NeutralizationRow",
    "NeutralizationReport",
    "load_predictions",
    "write_predictions",
    "accuracy",
    "consistency",
    "evaluate_predictions",
    "class_distribution",
    "hypothesis_only_rule_classifier",
    "rule_baseline_predictions",
    "neutralization_report",
    "audit_contrast_set",
    "scaling_curve",
]


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    predicted: Label


@dataclass(frozen=True)
class EvalReport:
    """Aggregate scores for one prediction file against one gold set.

    ``n_pairs`` and ``consistency`` are present only for pure contrast sets
    (every example carries a pair_id). ``coverage`` below 1 flags that the
    headline numbers were computed on the predicted subset only.
    """

    n: int
    accuracy: float
    per_class_accuracy: dict
    coverage: float
    n_pairs: Optional[int] = None
    consistency: Optional[float] = None

    @property
    def full_coverage(self) -> bool:
        return self.coverage == 1.0

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "accuracy": round(self.accuracy, 4),
            "per_class_accuracy": {
                label.value: round(v, 4) for label, v in self.per_class_accuracy.items()
            },
            "coverage": round(self.coverage, 4),
            "full_coverage": self.full_coverage,
        }
        if self.n_pairs is not None:
            out["n_pairs"] = self.n_pairs
            out["consistency"] = round(self.consistency, 4)
        return out


def load_predictions(path) -> list:
    """Read a jsonl prediction file of {id, predicted} records."""
    records = []
    seen = set()
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"no such prediction file: {path}")
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"line {lineno}: invalid json ({exc.msg})")
            for fieldname in ("id", "predicted"):
                if fieldname not in rec:
                    raise DataFormatError(f"line {lineno}: missing field {fieldname!r}")
            try:
                label = Label.from_string(rec["predicted"])
            except ValueError:
                raise DataFormatError(
                    f"unknown label {rec['predicted']!r} at line {lineno}"
                )
            if rec["id"] in seen:
                raise DataFormatError(f"duplicate prediction id {rec['id']!r} at line {lineno}")
            seen.add(rec["id"])
            records.append(PredictionRecord(id=str(rec["id"]), predicted=label))
    return records


def write_predictions(records: Sequence, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(
                json.dumps({"id": rec.id, "predicted": rec.predicted.value}) + "\n"
            )


def _prediction_map(gold: Dataset, preds: Sequence) -> dict:
    gold_ids = gold.by_id()
    if len(gold_ids) != len(gold):
        raise EvaluationError("gold set has duplicate ids; ids must resolve uniquely")
    by_id = {}
    for rec in preds:
        if rec.id not in gold_ids:
            raise EvaluationError(f"prediction id {rec.id!r} not in gold set")
        if rec.id in by_id:
            raise EvaluationError(f"duplicate prediction id {rec.id!r}")
        by_id[rec.id] = rec.predicted
    return by_id


def accuracy(gold: Dataset, preds: Sequence) -> tuple:
    """(overall accuracy, per-class accuracy) over the covered examples."""
    by_id = _prediction_map(gold, preds)
    if not by_id:
        raise EvaluationError("no predictions cover the gold set")
    correct = 0
    class_total = Counter()
    class_correct = Counter()
    for ex in gold:
        if ex.id not in by_id:
            continue
        class_total[ex.label] += 1
        if by_id[ex.id] is ex.label:
            correct += 1
            class_correct[ex.label] += 1
    covered = sum(class_total.values())
    per_class = {
        label: class_correct[label] / class_total[label]
        for label in LABEL_ORDER
        if class_total[label]
    }
    return correct / covered, per_class


def _pairs_of(gold: Dataset) -> dict:
    """Group a pure contrast set by pair_id; every pair has exactly 2 members."""
    groups = defaultdict(list)
    for ex in gold:
        if ex.pair_id is None:
            raise EvaluationError(f"example {ex.id!r} has no pair_id")
        groups[ex.pair_id].append(ex)
    for pair_id, members in groups.items():
        if len(members) != 2:
            raise EvaluationError(
                f"pair {pair_id!r} has {len(members)} members, expected 2"
            )
    return groups


def consistency(gold: Dataset, preds: Sequence) -> float:
    """Fraction of pairs with both members predicted correctly.

    Requires predictions for every pair member (missing is not wrong, it is
    unmeasurable; callers wanting partial scores should filter first).
    """
    groups = _pairs_of(gold)
    by_id = _prediction_map(gold, preds)
    both_correct = 0
    for pair_id, members in groups.items():
        for ex in members:
            if ex.id not in by_id:
                raise EvaluationError(
                    f"pair {pair_id!r}: member {ex.id!r} has no prediction"
                )
        if all(by_id[ex.id] is ex.label for ex in members):
            both_correct += 1
    return both_correct / len(groups)


def evaluate_predictions(gold: Dataset, preds: Sequence) -> EvalReport:
    """Full report; adds pair consistency when the gold set is purely paired."""
    if len(gold) == 0:
        raise EvaluationError("empty gold set")
    by_id = _prediction_map(gold, preds)
    coverage = len(by_id) / len(gold)
    acc, per_class = accuracy(gold, preds)
    n_pairs = None
    cons = None
    paired = [ex for ex in gold if ex.pair_id is not None]
    if paired:
        if len(paired) != len(gold):
            raise EvaluationError(
                "gold set mixes paired and unpaired examples; "
                "evaluate the contrast file on its own"
            )
        groups = _pairs_of(gold)
        n_pairs = len(groups)
        covered_groups = {
            pid: members
            for pid, members in groups.items()
            if all(ex.id in by_id for ex in members)
        }
        if covered_groups:
            both = sum(
                1
                for members in covered_groups.values()
                if all(by_id[ex.id] is ex.label for ex in members)
            )
            cons = both / len(covered_groups)
        else:
            cons = 0.0
    return EvalReport(
        n=len(gold),
        accuracy=acc,
        per_class_accuracy=per_class,
        coverage=coverage,
        n_pairs=n_pairs,
        consistency=cons,
    )


def class_distribution(dataset: Dataset) -> dict:
    """Label fractions; they sum to 1 within numerical noise."""
    if len(dataset) == 0:
        raise EvaluationError("empty dataset")
    counts = Counter(ex.label for ex in dataset)
    return {label: counts[label] / len(dataset) for label in LABEL_ORDER}


def hypothesis_only_rule_classifier(counts: NgramLabelCounts, example: NliExample) -> Label:
    """Statistical hypothesis-only baseline.

    Scores each label by the sum of positive lf_lmi contributions over the
    hypothesis n-grams; ties and empty evidence fall back to the most
    frequent training label, then fixed label order, so the predictor is
    fully deterministic (and, seeing only hypotheses, provably lands at
    zero consistency on any valid contrast set).
    """
    ngrams = extract_ngrams(tokenize(example.hypothesis), counts.n)
    scores = {label: 0.0 for label in LABEL_ORDER}
    for w in ngrams:
        freq = counts.marginal_w.get(w)
        if not freq:
            continue
        for label in LABEL_ORDER:
            joint = counts.joint.get((w, label), 0)
            if joint < 1:
                continue
            p_label = counts.marginal_l[label] / counts.total
            contribution = math.log(joint) * math.log((joint / freq) / p_label)
            if contribution > 0:
                scores[label] += contribution
    best = max(scores.values())
    leaders = [label for label in LABEL_ORDER if scores[label] == best]
    if len(leaders) == 1:
        return leaders[0]
    return max(
        LABEL_ORDER,
        key=lambda l: (counts.marginal_l.get(l, 0), -LABEL_ORDER.index(l)),
    )


def rule_baseline_predictions(counts: NgramLabelCounts, dataset: Dataset) -> list:
    return [
        PredictionRecord(id=ex.id, predicted=hypothesis_only_rule_classifier(counts, ex))
        for ex in dataset
    ]


@dataclass(frozen=True)
class NeutralizationRow:
    ngram: Ngram
    label: Label
    original_p: Optional[float]
    contrast_p: Optional[float]

    @property
    def missing(self) -> bool:
        return self.contrast_p is None

    @property
    def delta(self) -> Optional[float]:
        if self.original_p is None or self.contrast_p is None:
            return None
        return self.contrast_p - self.original_p


@dataclass(frozen=True)
class NeutralizationReport:
    rows: tuple

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "ngram": ngram_text(r.ngram),
                    "label": r.label.value,
                    "original_p": None if r.original_p is None else round(r.original_p, 4),
                    "contrast_p": None if r.contrast_p is None else round(r.contrast_p, 4),
                    "delta": None if r.delta is None else round(r.delta, 4),
                    "missing": r.missing,
                }
                for r in self.rows
            ]
        }


def neutralization_report(
    original_counts: Optional[NgramLabelCounts],
    contrast: Dataset,
    artifacts: Sequence,
) -> NeutralizationReport:
    """Per-artifact conditional label probability, original vs contrast.

    The contrast-side probability is computed at pair granularity: over the
    pairs anchored on the n-gram, the fraction of members carrying the
    ranked label. An n-gram with no anchored pairs is reported as missing.
    ``artifacts`` is a sequence of (ngram, label) pairs.
    """
    member_counts = Counter()
    label_hits = Counter()
    for ex in contrast:
        if ex.artifact_ngram is None or ex.pair_id is None:
            continue
        member_counts[ex.artifact_ngram] += 1
        label_hits[(ex.artifact_ngram, ex.label)] += 1
    rows = []
    for w, label in artifacts:
        w = tuple(w)
        original_p = None
        if original_counts is not None:
            freq = original_counts.marginal_w.get(w, 0)
            if freq:
                original_p = original_counts.joint.get((w, label), 0) / freq
        contrast_p = None
        if member_counts[w]:
            contrast_p = label_hits[(w, label)] / member_counts[w]
        rows.append(
            NeutralizationRow(ngram=w, label=label, original_p=original_p, contrast_p=contrast_p)
        )
    return NeutralizationReport(rows=tuple(rows))


def audit_contrast_set(dataset: Dataset) -> list:
    """Integrity audit of a contrast file; returns problem descriptions.

    Checks total pairing (every example in exactly one 2-member pair, one
    original + one synthesized), string-identical hypotheses, and flipped
    labels. An empty return means the file honors the pairing contract.
    """
    problems = []
    groups = defaultdict(list)
    for ex in dataset:
        if ex.pair_id is None:
            problems.append(f"example {ex.id!r} has no pair_id")
        else:
            groups[ex.pair_id].append(ex)
    for pair_id, members in sorted(groups.items()):
        if len(members) != 2:
            problems.append(
                f"pair {pair_id!r} has {len(members)} members, expected 2"
            )
            continue
        first, second = members
        provenances = sorted(m.provenance.value for m in members)
        if provenances != ["original", "synthesized"]:
            problems.append(
                f"pair {pair_id!r} must pair one original with one synthesized member"
            )
        if first.hypothesis != second.hypothesis:
            problems.append(f"pair {pair_id!r} members have different hypotheses")
        if first.label is second.label:
            problems.append(f"pair {pair_id!r} members share the label {first.label.value}")
    return problems


def scaling_curve(points: Sequence) -> str:
    """CSV of (N, original report, contrast report) rows, sorted by N."""
    if not points:
        raise EvaluationError("scaling curve needs at least one point")
    seen = set()
    for n, _orig, _contrast in points:
        if n in seen:
            raise EvaluationError(f"duplicate scaling point N={n}")
        seen.add(n)
    lines = ["N,orig_accuracy,contrast_accuracy,consistency"]
    for n, orig, contrast in sorted(points, key=lambda p: p[0]):
        cons = contrast.consistency if contrast.consistency is not None else float("nan")
        lines.append(
            f"{n},{orig.accuracy:.4f},{contrast.accuracy:.4f},{cons:.4f}"
        )
    return "\n".join(lines) + "\n"
