"""Canonical NLI record model: loading, validation, tokenization, n-grams.

One record is a premise/hypothesis pair with a three-way label. Datasets
are immutable after load, iterate in file order, and round-trip through
the canonical jsonl format byte-for-byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional, Sequence

from .errors import DataFormatError

__all__ = [
    "Label",
    "LABEL_ORDER",
    "Provenance",
    "Ngram",
    "NliExample",
    "Dataset",
    "load_dataset",
    "write_dataset",
    "serialize_dataset",
    "tokenize",
    "extract_ngrams",
    "contains_ngram",
    "ngram_text",
    "ngram_from_text",
]


class Label(Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"

    @classmethod
    def from_string(cls, value: str) -> "Label":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"unknown label {value!r}")


# Fixed order used wherever label iteration must be deterministic.
LABEL_ORDER = (Label.ENTAILMENT, Label.NEUTRAL, Label.CONTRADICTION)


class Provenance(Enum):
    ORIGINAL = "original"
    SYNTHESIZED = "synthesized"


# An n-gram is a fixed-length tuple of non-empty tokens; its canonical
# textual form joins the tokens with single spaces.
Ngram = tuple

def ngram_text(ngram: Ngram) -> str:
    return " ".join(ngram)


def ngram_from_text(text: str) -> Ngram:
    tokens = tuple(text.split(" "))
    if not tokens or any(not t for t in tokens):
        raise ValueError(f"invalid n-gram text {text!r}")
    return tokens


@dataclass(frozen=True)
class NliExample:
    """One premise/hypothesis/label record with stable identity.

    ``pair_id`` is set only on contrast-set members; ``artifact_ngram``
    only on anchors and their counterfactuals.
    """

    id: str
    premise: str
    hypothesis: str
    label: Label
    provenance: Provenance = Provenance.ORIGINAL
    pair_id: Optional[str] = None
    artifact_ngram: Optional[Ngram] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("empty id")
        if not self.premise.strip():
            raise ValueError("empty premise")
        if not self.hypothesis.strip():
            raise ValueError("empty hypothesis")
        if self.provenance is Provenance.SYNTHESIZED:
            if self.pair_id is None or self.artifact_ngram is None:
                raise ValueError(
                    "synthesized example requires pair_id and artifact_ngram"
                )

    def to_record(self) -> dict:
        rec = {
            "id": self.id,
            "premise": self.premise,
            "hypothesis": self.hypothesis,
            "label": self.label.value,
            "provenance": self.provenance.value,
        }
        if self.pair_id is not None:
            rec["pair_id"] = self.pair_id
        if self.artifact_ngram is not None:
            rec["artifact_ngram"] = ngram_text(self.artifact_ngram)
        return rec


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of examples.

    Canonical dataset files carry unique ids (the loaders enforce this);
    in-memory mixtures built with anchor re-drawing enabled may repeat an
    id, which is why uniqueness lives at the file/evaluation boundaries
    rather than here. ``skipped_unlabeled`` tallies records dropped for
    carrying the unlabeled marker ``-`` during load.
    """

    name: str
    examples: tuple = ()
    skipped_unlabeled: int = 0

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[NliExample]:
        return iter(self.examples)

    def by_id(self) -> dict:
        return {ex.id: ex for ex in self.examples}


def tokenize(text: str) -> list:
    """Lowercase, split on whitespace, trim boundary punctuation.

    Leading/trailing non-alphanumeric characters are stripped from each
    token (internal apostrophes and hyphens survive); tokens that become
    empty are dropped. Deterministic, and idempotent on its own output
    joined by spaces.
    """
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


def extract_ngrams(tokens: Sequence, n: int) -> list:
    """All contiguous n-grams in order; duplicates preserved."""
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def contains_ngram(tokens: Sequence, ngram: Ngram) -> bool:
    """Token-level contiguous containment test."""
    n = len(ngram)
    if n == 0 or n > len(tokens):
        return False
    target = tuple(ngram)
    return any(tuple(tokens[i : i + n]) == target for i in range(len(tokens) - n + 1))


def _example_from_fields(
    rec: dict, name: str, lineno: int, auto_id: bool = True
) -> Optional[NliExample]:
    """Build one example from a parsed record; None means 'skip (unlabeled)'."""
    for fieldname in ("premise", "hypothesis", "label"):
        if fieldname not in rec or rec[fieldname] is None:
            raise DataFormatError(f"line {lineno}: missing field {fieldname!r}")
    label_raw = rec["label"]
    if label_raw == "-":
        return None
    try:
        label = Label.from_string(label_raw)
    except ValueError:
        raise DataFormatError(f"unknown label {label_raw!r} at line {lineno}")
    provenance_raw = rec.get("provenance", "original")
    try:
        provenance = Provenance(provenance_raw)
    except ValueError:
        raise DataFormatError(
            f"unknown provenance {provenance_raw!r} at line {lineno}"
        )
    example_id = rec.get("id")
    if not example_id:
        if not auto_id:
            raise DataFormatError(f"line {lineno}: missing field 'id'")
        example_id = f"{name}:{lineno}"
    artifact_raw = rec.get("artifact_ngram")
    try:
        return NliExample(
            id=str(example_id),
            premise=rec["premise"],
            hypothesis=rec["hypothesis"],
            label=label,
            provenance=provenance,
            pair_id=rec.get("pair_id"),
            artifact_ngram=ngram_from_text(artifact_raw) if artifact_raw else None,
        )
    except ValueError as exc:
        raise DataFormatError(f"line {lineno}: {exc}")


def _load_jsonl(path: Path, name: str) -> Dataset:
    examples = []
    seen_ids = set()
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"line {lineno}: invalid json ({exc.msg})")
            if not isinstance(rec, dict):
                raise DataFormatError(f"line {lineno}: record is not an object")
            ex = _example_from_fields(rec, name, lineno)
            if ex is None:
                skipped += 1
                continue
            if ex.id in seen_ids:
                raise DataFormatError(
                    f"duplicate example id {ex.id!r} at line {lineno}"
                )
            seen_ids.add(ex.id)
            examples.append(ex)
    return Dataset(name=name, examples=tuple(examples), skipped_unlabeled=skipped)


def _load_tsv(path: Path, name: str) -> Dataset:
    """SNLI-style tab-separated input with a header row naming at least
    gold_label, sentence1 and sentence2."""
    examples = []
    seen_ids = set()
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        header_line = f.readline()
        if not header_line:
            raise DataFormatError("line 1: empty file, expected a header row")
        header = header_line.rstrip("\n").split("\t")
        try:
            col = {
                "label": header.index("gold_label"),
                "premise": header.index("sentence1"),
                "hypothesis": header.index("sentence2"),
            }
        except ValueError:
            raise DataFormatError(
                "line 1: header must contain gold_label, sentence1, sentence2"
            )
        needed = max(col.values()) + 1
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) < needed:
                raise DataFormatError(
                    f"line {lineno}: expected at least {needed} columns, got {len(fields)}"
                )
            rec = {
                "label": fields[col["label"]],
                "premise": fields[col["premise"]],
                "hypothesis": fields[col["hypothesis"]],
            }
            ex = _example_from_fields(rec, name, lineno)
            if ex is None:
                skipped += 1
                continue
            if ex.id in seen_ids:
                raise DataFormatError(
                    f"duplicate example id {ex.id!r} at line {lineno}"
                )
            seen_ids.add(ex.id)
            examples.append(ex)
    return Dataset(name=name, examples=tuple(examples), skipped_unlabeled=skipped)


def load_dataset(path, format: str = "jsonl") -> Dataset:
    """Load a labeled dataset in file order.

    Records carrying the unlabeled marker ``-`` are skipped and counted in
    ``Dataset.skipped_unlabeled``. Missing ids are auto-assigned as
    ``<name>:<line_number>``.
    """
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"no such dataset file: {path}")
    name = path.stem
    if format == "jsonl":
        return _load_jsonl(path, name)
    if format == "tsv":
        return _load_tsv(path, name)
    raise ValueError(f"unknown dataset format {format!r}")


def serialize_dataset(dataset: Dataset) -> bytes:
    """Canonical jsonl bytes for a dataset; stable across runs."""
    lines = [
        json.dumps(ex.to_record(), ensure_ascii=False) + "\n" for ex in dataset
    ]
    return "".join(lines).encode("utf-8")


def write_dataset(dataset: Dataset, path) -> None:
    Path(path).write_bytes(serialize_dataset(dataset))
