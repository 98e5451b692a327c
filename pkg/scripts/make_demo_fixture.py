#!/usr/bin/env python3
"""Build a small demo corpus with planted artifacts plus an accept-all
mock LLM table, so the whole pipeline can be driven offline.

Usage: make_demo_fixture.py OUT_DIR  (writes train.jsonl + mock_table.jsonl)

The mock table must be keyed by the prompts the synthesize command will
actually render, so this script mirrors its ranking/selection parameters:
--top-k 2 --per-ngram 6 --seed 11 with the default metric and thresholds.
"""

import json
import sys
from pathlib import Path

from contrastkit.artifact_stats import accumulate_counts, rank_top_k
from contrastkit.corpus import Dataset, Label, NliExample, ngram_text, write_dataset
from contrastkit.synthesis import (
    GenerationTask,
    TargetAssigner,
    mock_key,
    render_generation_prompt,
    render_judge_prompt,
    select_anchors,
)

TOP_K = 2
PER_NGRAM = 6
SEED = 11


def build_corpus() -> Dataset:
    examples = []

    def add(hypothesis, label, times):
        for _ in range(times):
            i = len(examples)
            examples.append(
                NliExample(
                    id=f"train:{i}",
                    premise=f"A group of people in a busy park {i}.",
                    hypothesis=hypothesis,
                    label=label,
                )
            )

    add("nobody is sleeping here", Label.CONTRADICTION, 60)
    add("nobody is swimming today", Label.CONTRADICTION, 45)
    add("a man is sleeping outside", Label.ENTAILMENT, 55)
    add("an animal is outside the house", Label.ENTAILMENT, 50)
    add("the man is waiting for a bus", Label.NEUTRAL, 50)
    add("people are playing in the park", Label.ENTAILMENT, 40)
    return Dataset(name="train", examples=tuple(examples))


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    out_dir = Path(sys.argv[1])
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset = build_corpus()
    write_dataset(dataset, out_dir / "train.jsonl")

    counts = accumulate_counts(dataset, 2)
    scored = []
    for label in Label:
        scored.extend(rank_top_k(counts, label, TOP_K, metric="lf_lmi", min_joint=20))
    scored.sort(key=lambda s: (-s.lf_lmi, -s.joint_count, ngram_text(s.ngram)))
    anchor_set = select_anchors(dataset, scored[:TOP_K], TOP_K, PER_NGRAM, SEED)

    assigner = TargetAssigner()
    with open(out_dir / "mock_table.jsonl", "w", encoding="utf-8") as f:
        for anchor in anchor_set.anchors:
            target = assigner.assign(anchor.label)
            new_premise = anchor.premise.rstrip(".") + " at night."
            gen = render_generation_prompt(GenerationTask(anchor=anchor, target_label=target))
            judge = render_judge_prompt(anchor.premise, anchor.hypothesis, new_premise, target)
            f.write(json.dumps({"prompt_sha256": mock_key(gen), "response": new_premise}) + "\n")
            f.write(
                json.dumps(
                    {"prompt_sha256": mock_key(judge), "response": "true|minimal edit flips the label"}
                )
                + "\n"
            )
    print(f"wrote {out_dir}/train.jsonl ({len(dataset)} examples) and mock_table.jsonl "
          f"({len(anchor_set)} anchors)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
