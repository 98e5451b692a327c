"""Shared fixture builders for the test suite."""

from __future__ import annotations

import json
import random

from contrastkit.corpus import Dataset, Label, NliExample
from contrastkit.synthesis import (
    GenerationTask,
    TargetAssigner,
    mock_key,
    render_generation_prompt,
    render_judge_prompt,
)

WORDS = [
    "dog", "cat", "man", "woman", "boy", "girl", "park", "pool", "ball",
    "red", "blue", "running", "sleeping", "outside", "inside", "nobody",
    "is", "are", "the", "a", "two", "people", "playing", "sitting",
]


def make_example(
    id: str,
    premise: str = "A dog runs in a field.",
    hypothesis: str = "An animal is outside.",
    label: Label = Label.ENTAILMENT,
    **kwargs,
) -> NliExample:
    return NliExample(id=id, premise=premise, hypothesis=hypothesis, label=label, **kwargs)


def random_dataset(rng: random.Random, size: int, name: str = "rand") -> Dataset:
    """Synthetic corpus with random short sentences over a small vocabulary."""
    examples = []
    labels = list(Label)
    for i in range(size):
        premise = " ".join(rng.choices(WORDS, k=rng.randint(3, 10)))
        hypothesis = " ".join(rng.choices(WORDS, k=rng.randint(2, 8)))
        examples.append(
            NliExample(
                id=f"{name}:{i}",
                premise=premise,
                hypothesis=hypothesis,
                label=rng.choice(labels),
            )
        )
    return Dataset(name=name, examples=tuple(examples))


def perturbed_premise(anchor: NliExample) -> str:
    """Canonical 'accepted' mock edit for an anchor's premise."""
    return anchor.premise.rstrip(".") + " near the fence."


def build_mock_table(
    anchor_set,
    reject_anchor_ids=frozenset(),
    echo_anchor_ids=frozenset(),
    malformed_judge_ids=frozenset(),
    drop_judge_ids=frozenset(),
) -> dict:
    """Prompt-hash table driving the offline pipeline.

    Accept-all by default; anchors listed in the knock-out sets get a
    rejecting judge, an unparseable judge, a generator that echoes the
    premise (no perturbation), or no judge entry at all (unreachable).
    """
    table = {}
    assigner = TargetAssigner()
    for anchor in anchor_set.anchors:
        target = assigner.assign(anchor.label)
        task = GenerationTask(anchor=anchor, target_label=target)
        gen_prompt = render_generation_prompt(task)
        if anchor.id in echo_anchor_ids:
            new_premise = anchor.premise
        else:
            new_premise = perturbed_premise(anchor)
        table[mock_key(gen_prompt)] = new_premise
        judge_prompt = render_judge_prompt(
            anchor.premise, anchor.hypothesis, new_premise, target
        )
        if anchor.id in drop_judge_ids:
            continue
        if anchor.id in reject_anchor_ids:
            table[mock_key(judge_prompt)] = "false|premise fully rewritten"
        elif anchor.id in malformed_judge_ids:
            table[mock_key(judge_prompt)] = "maybe so"
        else:
            table[mock_key(judge_prompt)] = "true|label matches under closed world"
    return table


def write_mock_table(table: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for key, response in table.items():
            f.write(json.dumps({"prompt_sha256": key, "response": response}) + "\n")
