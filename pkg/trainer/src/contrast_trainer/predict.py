"""Deterministic inference: checkpoint + eval file -> prediction jsonl."""

from __future__ import annotations

from pathlib import Path

import torch

from .model import TinyPairClassifier, collate
from .records import LABELS, read_examples, write_predictions
from .training import TrainerConfig


def load_checkpoint(path):
    payload = torch.load(Path(path), map_location="cpu", weights_only=True)
    config = TrainerConfig(**{
        **payload["config"],
        "adam_betas": tuple(payload["config"]["adam_betas"]),
    })
    if payload["backend"] == "tiny":
        model = TinyPairClassifier(vocab_size=len(payload["vocab"]), hidden=config.hidden)
        model.load_state_dict(payload["model_state"])
        return config, model, payload["vocab"]
    from transformers import AutoModelForSequenceClassification

    model = AutoModelForSequenceClassification.from_pretrained(
        config.model, num_labels=len(LABELS)
    )
    model.load_state_dict(payload["model_state"])
    return config, model, None


def predict(checkpoint_path, data_path, out_path, batch_size: int = 256) -> Path:
    """One {id, predicted} record per input example, in file order."""
    config, model, vocab = load_checkpoint(checkpoint_path)
    examples = read_examples(data_path)
    ids = [ex.id for ex in examples]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{data_path}: duplicate ids; predictions would not resolve")
    model.eval()
    tokenizer = None
    if vocab is None:
        from transformers import AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(config.model)
    rows = []
    with torch.no_grad():
        for start in range(0, len(examples), batch_size):
            batch = examples[start : start + batch_size]
            if vocab is not None:
                token_ids, segments, mask = collate(vocab, batch, config.max_seq_len)
                logits = model(token_ids, segments, mask)
            else:
                encoded = tokenizer(
                    [ex.premise for ex in batch],
                    [ex.hypothesis for ex in batch],
                    truncation=True,
                    padding=True,
                    max_length=config.max_seq_len,
                    return_tensors="pt",
                )
                logits = model(**encoded).logits
            for ex, choice in zip(batch, logits.argmax(dim=-1).tolist()):
                rows.append((ex.id, LABELS[choice]))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_predictions(rows, out_path)
    return out_path
