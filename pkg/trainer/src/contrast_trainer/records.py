"""Minimal reader/writer for the pipeline's file formats.

Intentionally re-implements just enough of the canonical jsonl contract
(id, premise, hypothesis, label) to stay decoupled from the main package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

LABELS = ("entailment", "neutral", "contradiction")
LABEL_TO_INDEX = {label: i for i, label in enumerate(LABELS)}


@dataclass(frozen=True)
class PairRecord:
    id: str
    premise: str
    hypothesis: str
    label: str


def read_examples(path) -> list:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such dataset file: {path}")
    examples = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            for field in ("premise", "hypothesis", "label"):
                if field not in rec:
                    raise ValueError(f"{path}: line {lineno}: missing field {field!r}")
            label = rec["label"]
            if label not in LABEL_TO_INDEX:
                raise ValueError(f"{path}: line {lineno}: unknown label {label!r}")
            examples.append(
                PairRecord(
                    id=str(rec.get("id", f"{path.stem}:{lineno}")),
                    premise=rec["premise"],
                    hypothesis=rec["hypothesis"],
                    label=label,
                )
            )
    return examples


def write_predictions(records, path) -> None:
    """records: iterable of (id, label_string)."""
    with open(path, "w", encoding="utf-8") as f:
        for example_id, label in records:
            f.write(json.dumps({"id": example_id, "predicted": label}) + "\n")


def tokenize(text: str) -> list:
    """Lowercase whitespace tokenization with boundary-punctuation trim."""
    tokens = []
    for raw in text.lower().split():
        start, end = 0, len(raw)
        while start < end and not raw[start].isalnum():
            start += 1
        while end > start and not raw[end - 1].isalnum():
            end -= 1
        if end > start:
            tokens.append(raw[start:end])
    return tokens
