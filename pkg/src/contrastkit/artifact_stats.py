"""(n-gram, label) co-occurrence counting and association scoring.

Two measures over the same maximum-likelihood counts:

  lmi    = count(w,l) * ln(P(l|w) / P(l))
  lf_lmi = ln(count(w,l)) * ln(P(l|w) / P(l))

with P(l|w) = count(w,l) / count(w) and P(l) = N_l / N, where N_l is the
number of n-gram tokens occurring in examples labeled l. The log-frequency
variant damps the raw-frequency dominance that lets stopword n-grams crowd
out low-frequency, high-precision cues under plain lmi. Natural logarithm
throughout.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import (
    Dataset,
    Label,
    Ngram,
    extract_ngrams,
    ngram_text,
    tokenize,
)
from .errors import EvaluationError

__all__ = [
    "NgramLabelCounts",
    "AssociationScore",
    "accumulate_counts",
    "score",
    "rank_top_k",
    "emit_artifact_report",
    "REPORT_COLUMNS",
]

_FIELDS = ("hypothesis", "premise", "both")


@dataclass
class NgramLabelCounts:
    """Joint and marginal n-gram/label counts for one n-gram order.

    joint[(w, l)] is the token-level co-occurrence count (an n-gram seen
    twice in one hypothesis counts twice); marginal_w[w] sums it over
    labels; marginal_l[l] is the n-gram token total inside label-l
    examples; total = sum of marginal_l.
    """

    n: int
    joint: dict
    marginal_w: dict
    marginal_l: dict
    total: int

    def validate(self) -> None:
        """Assert the count-consistency invariants; raises on violation."""
        per_w = Counter()
        per_l = Counter()
        for (w, l), c in self.joint.items():
            if c < 0:
                raise AssertionError(f"negative joint count for {ngram_text(w)!r}")
            per_w[w] += c
            per_l[l] += c
        if per_w != Counter({w: c for w, c in self.marginal_w.items() if c}):
            raise AssertionError("sum over labels of joint != marginal_w")
        if per_l != Counter({l: c for l, c in self.marginal_l.items() if c}):
            raise AssertionError("sum over n-grams of joint != marginal_l")
        if sum(self.marginal_l.values()) != self.total:
            raise AssertionError("sum of marginal_l != total")


@dataclass(frozen=True)
class AssociationScore:
    ngram: Ngram
    label: Label
    joint_count: int
    freq: int
    p_label_given_w: float
    p_label: float
    lmi: float
    lf_lmi: float


def accumulate_counts(
    dataset: Dataset, n: int, field: str = "hypothesis"
) -> NgramLabelCounts:
    """Count (n-gram, label) co-occurrences over the chosen text field.

    Token-level counting with duplicates; deterministic and independent of
    example order (pure commutative accumulation).
    """
    if len(dataset) == 0:
        raise ValueError("cannot accumulate counts over an empty dataset")
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    if field not in _FIELDS:
        raise ValueError(f"field must be one of {_FIELDS}, got {field!r}")

    joint = Counter()
    marginal_w = Counter()
    marginal_l = Counter()
    for ex in dataset:
        if field == "hypothesis":
            texts = (ex.hypothesis,)
        elif field == "premise":
            texts = (ex.premise,)
        else:
            texts = (ex.hypothesis, ex.premise)
        for text in texts:
            ngrams = extract_ngrams(tokenize(text), n)
            marginal_l[ex.label] += len(ngrams)
            for w in ngrams:
                joint[(w, ex.label)] += 1
                marginal_w[w] += 1
    return NgramLabelCounts(
        n=n,
        joint=dict(joint),
        marginal_w=dict(marginal_w),
        marginal_l=dict(marginal_l),
        total=sum(marginal_l.values()),
    )


def score(counts: NgramLabelCounts, w: Ngram, l: Label) -> AssociationScore:
    """Score one (n-gram, label) pair; requires joint(w,l) >= 1."""
    joint = counts.joint.get((w, l), 0)
    if joint < 1:
        raise EvaluationError(
            f"unseen pair: {ngram_text(w)!r} never occurs under {l.value}"
        )
    freq = counts.marginal_w[w]
    p_label_given_w = joint / freq
    p_label = counts.marginal_l[l] / counts.total
    log_ratio = math.log(p_label_given_w / p_label)
    return AssociationScore(
        ngram=w,
        label=l,
        joint_count=joint,
        freq=freq,
        p_label_given_w=p_label_given_w,
        p_label=p_label,
        lmi=joint * log_ratio,
        lf_lmi=math.log(joint) * log_ratio,
    )


def rank_top_k(
    counts: NgramLabelCounts,
    label: Label,
    k: int,
    metric: str = "lf_lmi",
    min_joint: int = 20,
) -> list:
    """Top-k n-grams for one label, descending by the chosen metric.

    Ties break on higher joint count, then lexicographic n-gram text, so
    rankings are fully deterministic. Entries with joint counts below
    ``min_joint`` are excluded (suppresses the ln(1)=0 degeneracy and
    one-off noise).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if metric not in ("lmi", "lf_lmi"):
        raise ValueError(f"metric must be 'lmi' or 'lf_lmi', got {metric!r}")
    scored = [
        score(counts, w, l)
        for (w, l), c in counts.joint.items()
        if l is label and c >= min_joint
    ]
    scored.sort(
        key=lambda s: (-getattr(s, metric), -s.joint_count, ngram_text(s.ngram))
    )
    return scored[:k]


REPORT_COLUMNS = (
    "ngram",
    "label",
    "metric",
    "score",
    "joint_count",
    "freq",
    "p_label_given_w",
    "p_label",
)


def emit_artifact_report(
    rankings: Mapping[Label, Sequence[AssociationScore]], metric: str, path
) -> None:
    """Write ranked associations as CSV, one row per entry, scores at 4dp."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(REPORT_COLUMNS)
        for label, entries in rankings.items():
            for s in entries:
                writer.writerow(
                    [
                        ngram_text(s.ngram),
                        label.value,
                        metric,
                        f"{getattr(s, metric):.4f}",
                        s.joint_count,
                        s.freq,
                        f"{s.p_label_given_w:.4f}",
                        f"{s.p_label:.4f}",
                    ]
                )
