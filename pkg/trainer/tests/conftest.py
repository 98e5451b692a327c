"""Builders for canonical-format fixture files (no imports from the main
pipeline package; the jsonl layout is the contract)."""

from __future__ import annotations

import json
import random

LABELS = ("entailment", "neutral", "contradiction")
NOUNS = ["dog", "cat", "man", "woman", "boy", "girl", "team", "crowd"]
VERBS = ["runs", "plays", "sits", "sleeps", "jumps", "reads", "swims"]
PLACES = ["park", "pool", "street", "field", "kitchen", "beach"]


def synthetic_records(rng: random.Random, size: int, prefix: str) -> list:
    records = []
    for i in range(size):
        records.append(
            {
                "id": f"{prefix}:{i}",
                "premise": f"A {rng.choice(NOUNS)} {rng.choice(VERBS)} in the {rng.choice(PLACES)}.",
                "hypothesis": f"The {rng.choice(NOUNS)} is in the {rng.choice(PLACES)}.",
                "label": rng.choice(LABELS),
                "provenance": "original",
            }
        )
    return records


def paired_records(rng: random.Random, n_pairs: int, prefix: str) -> list:
    """Contrast-style file: anchor + counterfactual sharing a hypothesis."""
    records = []
    for i in range(n_pairs):
        hypothesis = f"The {rng.choice(NOUNS)} is in the {rng.choice(PLACES)}."
        pair_id = f"{prefix}:{i}#cf"
        records.append(
            {
                "id": f"{prefix}:{i}",
                "premise": f"A {rng.choice(NOUNS)} {rng.choice(VERBS)} outside.",
                "hypothesis": hypothesis,
                "label": "entailment",
                "provenance": "original",
                "pair_id": pair_id,
                "artifact_ngram": "in the",
            }
        )
        records.append(
            {
                "id": pair_id,
                "premise": f"A {rng.choice(NOUNS)} {rng.choice(VERBS)} indoors.",
                "hypothesis": hypothesis,
                "label": "contradiction",
                "provenance": "synthesized",
                "pair_id": pair_id,
                "artifact_ngram": "in the",
            }
        )
    return records


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
