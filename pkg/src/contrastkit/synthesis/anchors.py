"""Anchor selection and target-label assignment.

Anchors are original examples whose hypothesis contains a top-ranked
artifact n-gram under the label the n-gram was ranked for. Targets flip
Entailment <-> Contradiction; Neutral anchors alternate between the two
so the synthesized targets stay balanced.
"""

from __future__ import annotations

import random
from dataclasses import replace
from typing import Sequence

from ..corpus import Dataset, Label, Provenance, contains_ngram, ngram_text, tokenize
from .types import AnchorSet

__all__ = ["select_anchors", "assign_target_label", "TargetAssigner"]


def select_anchors(
    dataset: Dataset, rankings: Sequence, k: int, m: int, seed: int
) -> AnchorSet:
    """Sample up to ``m`` anchors for each of the top-``k`` ranked n-grams.

    An example matching several ranked n-grams joins only the pool of the
    highest-ranked one. Sampling is uniform without replacement, seeded,
    and deterministic given (dataset order, rankings, seed). An n-gram
    whose pool runs short is recorded in ``shortfalls`` rather than
    raising.
    """
    if not rankings:
        raise ValueError("rankings must be non-empty")
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    ranked = [(s.ngram, s.label) for s in rankings[:k]]

    pools = [[] for _ in ranked]
    for ex in dataset:
        if ex.provenance is not Provenance.ORIGINAL:
            continue
        tokens = tokenize(ex.hypothesis)
        for idx, (w, label) in enumerate(ranked):
            if ex.label is label and contains_ngram(tokens, w):
                pools[idx].append(ex)
                break

    rng = random.Random(seed)
    anchors = []
    shortfalls = {}
    for (w, label), pool in zip(ranked, pools):
        take = min(m, len(pool))
        if take < m:
            shortfalls[ngram_text(w)] = m - take
        anchors.extend(
            replace(ex, artifact_ngram=tuple(w)) for ex in rng.sample(pool, take)
        )
    return AnchorSet(
        anchors=tuple(anchors),
        per_ngram_quota=m,
        ngram_list=tuple(ranked),
        shortfalls=shortfalls,
    )


def assign_target_label(anchor_label: Label, neutral_toggle: int) -> Label:
    """Flipped target for one anchor.

    Entailment -> Contradiction and vice versa; Neutral maps to Entailment
    on an even toggle and Contradiction on an odd one, splitting neutral
    targets 50/50 up to one remainder.
    """
    if anchor_label is Label.ENTAILMENT:
        return Label.CONTRADICTION
    if anchor_label is Label.CONTRADICTION:
        return Label.ENTAILMENT
    return Label.ENTAILMENT if neutral_toggle % 2 == 0 else Label.CONTRADICTION


class TargetAssigner:
    """Stateful wrapper holding the per-run neutral alternation counter."""

    def __init__(self):
        self._neutral_seen = 0

    def assign(self, anchor_label: Label) -> Label:
        target = assign_target_label(anchor_label, self._neutral_seen)
        if anchor_label is Label.NEUTRAL:
            self._neutral_seen += 1
        return target
