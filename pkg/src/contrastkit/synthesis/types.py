"""Domain types for the contrast-set synthesis pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus import Label, NliExample, Provenance

__all__ = ["AnchorSet", "GenerationTask", "JudgeVerdict", "ContrastPair", "RejectionRecord"]

REJECTION_REASONS = (
    "generation_failed",
    "no_perturbation",
    "judge_rejected",
    "judge_unreachable",
)


@dataclass(frozen=True)
class AnchorSet:
    """Artifact-bearing originals selected for counterfactual synthesis.

    ``ngram_list`` is the ranked (n-gram, label) list the anchors were drawn
    for; ``shortfalls`` records n-grams whose candidate pools ran out before
    the per-n-gram quota was met (canonical text -> missing count).
    """

    anchors: tuple
    per_ngram_quota: int
    ngram_list: tuple
    shortfalls: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for anchor in self.anchors:
            if anchor.provenance is not Provenance.ORIGINAL:
                raise ValueError(f"anchor {anchor.id} is not an original example")
            if anchor.artifact_ngram is None:
                raise ValueError(f"anchor {anchor.id} is missing its artifact n-gram")
            if anchor.id in seen:
                raise ValueError(f"anchor id {anchor.id!r} selected twice")
            seen.add(anchor.id)

    def __len__(self) -> int:
        return len(self.anchors)


@dataclass(frozen=True)
class GenerationTask:
    anchor: NliExample
    target_label: Label
    attempt: int = 0

    def __post_init__(self):
        if self.target_label is self.anchor.label:
            raise ValueError("target label must differ from the anchor label")


@dataclass(frozen=True)
class JudgeVerdict:
    judge_id: str
    valid: bool
    reasoning: str


@dataclass(frozen=True)
class ContrastPair:
    """An anchor and its accepted counterfactual.

    The hypothesis is string-identical across the pair, the label flips,
    and every panel verdict approved the candidate.
    """

    pair_id: str
    anchor: NliExample
    counterfactual: NliExample
    verdicts: tuple

    def __post_init__(self):
        if self.anchor.hypothesis != self.counterfactual.hypothesis:
            raise ValueError(f"pair {self.pair_id}: hypotheses differ")
        if self.anchor.label is self.counterfactual.label:
            raise ValueError(f"pair {self.pair_id}: label did not flip")
        if self.counterfactual.provenance is not Provenance.SYNTHESIZED:
            raise ValueError(f"pair {self.pair_id}: counterfactual not synthesized")
        if not self.verdicts or not all(v.valid for v in self.verdicts):
            raise ValueError(f"pair {self.pair_id}: verdicts are not unanimous")


@dataclass(frozen=True)
class RejectionRecord:
    anchor_id: str
    reason: str
    detail: str = ""

    def __post_init__(self):
        if self.reason not in REJECTION_REASONS:
            raise ValueError(f"unknown rejection reason {self.reason!r}")
