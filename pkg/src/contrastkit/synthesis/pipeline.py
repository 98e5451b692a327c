"""Contrast-set assembly: generate, parse, judge, consensus-filter, pair.

Anchors are processed concurrently (per-endpoint concurrency caps live in
the clients) and the results are reduced order-independently, then sorted
by anchor id so concurrency never changes output bytes. Anchors whose
counterfactual fails any stage land in the rejection log, never silently
dropped.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from ..corpus import Dataset, NliExample, Provenance
from ..errors import BackendError, CompletionError, GenerationParseError, JudgeParseError
from .anchors import TargetAssigner
from .client import LlmClient
from .prompts import (
    parse_generation_response,
    parse_judge_verdict,
    render_generation_prompt,
    render_judge_prompt,
)
from .types import AnchorSet, ContrastPair, GenerationTask, RejectionRecord

logger = logging.getLogger(__name__)

__all__ = ["ContrastSetResult", "generate_contrast_set", "consensus_filter"]

PAIR_ID_SUFFIX = "#cf"


def consensus_filter(verdicts: Sequence, panel_size: int) -> bool:
    """Keep a candidate only on a full, unanimously valid panel."""
    return len(verdicts) == panel_size and all(v.valid for v in verdicts)


@dataclass(frozen=True)
class ContrastSetResult:
    """Accepted pairs plus the rejection log, both sorted by anchor id."""

    pairs: tuple
    rejections: tuple

    def to_dataset(self, name: str = "contrast") -> Dataset:
        examples = []
        for pair in self.pairs:
            examples.append(pair.anchor)
            examples.append(pair.counterfactual)
        return Dataset(name=name, examples=tuple(examples))

    def write_rejections(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for rec in self.rejections:
                f.write(
                    json.dumps(
                        {
                            "anchor_id": rec.anchor_id,
                            "reason": rec.reason,
                            "detail": rec.detail,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )


def _generate_candidate(task: GenerationTask, generator: LlmClient):
    """One generation with a single parse-level retry.

    Returns (new_premise, None) or (None, RejectionRecord).
    """
    prompt = render_generation_prompt(task)
    last_parse_error: Optional[GenerationParseError] = None
    for _parse_attempt in range(2):
        try:
            raw = generator.complete(prompt)
        except (CompletionError, BackendError) as exc:
            return None, RejectionRecord(
                anchor_id=task.anchor.id, reason="generation_failed", detail=str(exc)
            )
        try:
            return parse_generation_response(raw, task.anchor.premise), None
        except GenerationParseError as exc:
            last_parse_error = exc
    reason = (
        "no_perturbation"
        if last_parse_error is not None and last_parse_error.reason == "no_perturbation"
        else "generation_failed"
    )
    return None, RejectionRecord(
        anchor_id=task.anchor.id, reason=reason, detail=str(last_parse_error)
    )


def _collect_verdicts(task: GenerationTask, new_premise: str, judges: Sequence):
    """Ask every panel member; a judge that stays unparseable or unreachable
    after one re-ask simply contributes no verdict."""
    anchor = task.anchor
    prompt = render_judge_prompt(
        anchor.premise, anchor.hypothesis, new_premise, task.target_label
    )
    verdicts = []
    unreachable = []
    for index, judge in enumerate(judges):
        judge_id = f"judge{index + 1}:{judge.config.model_id}"
        verdict = None
        failure = None
        for _ask in range(2):
            try:
                raw = judge.complete(prompt)
            except (CompletionError, BackendError) as exc:
                failure = str(exc)
                break
            try:
                verdict = parse_judge_verdict(raw, judge_id=judge_id)
                break
            except JudgeParseError as exc:
                failure = str(exc)
        if verdict is None:
            unreachable.append(f"{judge_id}: {failure}")
        else:
            verdicts.append(verdict)
    return verdicts, unreachable


def _process_anchor(task: GenerationTask, generator: LlmClient, judges: Sequence):
    anchor = task.anchor
    new_premise, rejection = _generate_candidate(task, generator)
    if rejection is not None:
        return rejection
    verdicts, unreachable = _collect_verdicts(task, new_premise, judges)
    if unreachable:
        return RejectionRecord(
            anchor_id=anchor.id,
            reason="judge_unreachable",
            detail="; ".join(unreachable),
        )
    if not consensus_filter(verdicts, len(judges)):
        detail = "; ".join(
            f"{v.judge_id}: {v.reasoning}" for v in verdicts if not v.valid
        )
        return RejectionRecord(
            anchor_id=anchor.id, reason="judge_rejected", detail=detail
        )
    pair_id = anchor.id + PAIR_ID_SUFFIX
    counterfactual = NliExample(
        id=pair_id,
        premise=new_premise,
        hypothesis=anchor.hypothesis,
        label=task.target_label,
        provenance=Provenance.SYNTHESIZED,
        pair_id=pair_id,
        artifact_ngram=anchor.artifact_ngram,
    )
    return ContrastPair(
        pair_id=pair_id,
        anchor=replace(anchor, pair_id=pair_id),
        counterfactual=counterfactual,
        verdicts=tuple(verdicts),
    )


def generate_contrast_set(
    anchor_set: AnchorSet,
    generator: LlmClient,
    judges: Sequence,
    seed: int = 0,
    max_workers: Optional[int] = None,
) -> ContrastSetResult:
    """Run the synthesis pipeline over an anchor set.

    Target labels are assigned sequentially in anchor order (the neutral
    alternation counter is part of the run's definition), then anchors are
    processed concurrently. The returned pairs and rejections are sorted by
    anchor id. ``seed`` is recorded by callers for the manifest; the
    pipeline itself is deterministic given deterministic backends.
    """
    if len(judges) < 1:
        raise ValueError("judge panel must have at least one member")
    assigner = TargetAssigner()
    tasks = [
        GenerationTask(anchor=a, target_label=assigner.assign(a.label))
        for a in anchor_set.anchors
    ]
    pairs = []
    rejections = []
    if tasks:
        workers = max_workers or min(
            32,
            generator.config.max_concurrency
            + sum(j.config.max_concurrency for j in judges),
        )
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for outcome in pool.map(
                lambda t: _process_anchor(t, generator, judges), tasks
            ):
                if isinstance(outcome, ContrastPair):
                    pairs.append(outcome)
                else:
                    rejections.append(outcome)
    pairs.sort(key=lambda p: p.anchor.id)
    rejections.sort(key=lambda r: r.anchor_id)
    for rec in rejections:
        logger.info("rejected anchor %s: %s (%s)", rec.anchor_id, rec.reason, rec.detail)
    return ContrastSetResult(pairs=tuple(pairs), rejections=tuple(rejections))
