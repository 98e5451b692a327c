"""Training loop with naive vs dynamic-balanced curricula.

naive reuses one static file every epoch; dynamic_balanced consumes
epoch_<e>.jsonl in epoch order, so the rotating original slice built by
the sampling stage actually reaches the optimizer. Per-epoch file digests
land in the metrics sidecar, which is how the curriculum difference stays
observable (3 distinct digests vs 1).
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn
from torch.optim import AdamW
from torch.optim.lr_scheduler import LambdaLR

from .model import build_tiny_model, build_vocab, collate
from .records import LABEL_TO_INDEX, read_examples

logger = logging.getLogger(__name__)

STRATEGIES = ("naive", "dynamic_balanced")


@dataclass(frozen=True)
class TrainerConfig:
    """Published configuration: batch 128, 3 epochs, AdamW(0.9, 0.999,
    eps 1e-8), linear schedule, max length 128; learning rate 5e-5 for
    initial training and 1e-6 for the robust fine-tuning phase."""

    model: str = "google/electra-small-discriminator"
    strategy: str = "naive"
    batch_size: int = 128
    epochs: int = 3
    learning_rate: float = 5e-5
    adam_betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-8
    schedule: str = "linear"
    max_seq_len: int = 128
    seed: int = 0
    hidden: int = 64
    vocab_size: int = 5000

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.schedule != "linear":
            raise ValueError("only the linear schedule is supported")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def resolve_epoch_files(config: TrainerConfig, train_file=None, epoch_dir=None) -> list:
    """One input file per epoch; everything must exist before training."""
    if config.strategy == "naive":
        if train_file is None:
            raise ValueError("naive strategy requires a static training file")
        files = [Path(train_file)] * config.epochs
    else:
        if epoch_dir is None:
            raise ValueError("dynamic_balanced strategy requires --epoch-dir")
        files = [Path(epoch_dir) / f"epoch_{e}.jsonl" for e in range(1, config.epochs + 1)]
    missing = [str(p) for p in files if not p.is_file()]
    if missing:
        raise FileNotFoundError(f"missing training file(s): {', '.join(sorted(set(missing)))}")
    return files


class TinyBackend:
    """From-scratch encoder; vocabulary learned from the training stream."""

    name = "tiny"

    def __init__(self, config: TrainerConfig, all_examples):
        self.config = config
        self.vocab = build_vocab(all_examples, max_size=config.vocab_size)
        self.model = build_tiny_model(len(self.vocab), config.hidden, config.seed)
        self._loss = nn.CrossEntropyLoss()

    def step_loss(self, batch):
        ids, segments, mask = collate(self.vocab, batch, self.config.max_seq_len)
        logits = self.model(ids, segments, mask)
        labels = torch.tensor([LABEL_TO_INDEX[ex.label] for ex in batch], dtype=torch.long)
        return self._loss(logits, labels)

    def checkpoint_payload(self) -> dict:
        return {"vocab": self.vocab, "model_state": self.model.state_dict()}


class HuggingFaceBackend:
    """Pretrained encoder path (e.g. ELECTRA-Small) for full-scale runs.

    Requires the checkpoint to be resolvable by `transformers`; unused in
    offline smoke runs.
    """

    name = "hf"

    def __init__(self, config: TrainerConfig, all_examples):
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.config = config
        torch.manual_seed(config.seed)
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForSequenceClassification.from_pretrained(
            config.model, num_labels=len(LABEL_TO_INDEX)
        )

    def step_loss(self, batch):
        encoded = self.tokenizer(
            [ex.premise for ex in batch],
            [ex.hypothesis for ex in batch],
            truncation=True,
            padding=True,
            max_length=self.config.max_seq_len,
            return_tensors="pt",
        )
        labels = torch.tensor([LABEL_TO_INDEX[ex.label] for ex in batch], dtype=torch.long)
        return self.model(**encoded, labels=labels).loss

    def checkpoint_payload(self) -> dict:
        return {"vocab": None, "model_state": self.model.state_dict()}


def _build_backend(config: TrainerConfig, all_examples):
    if config.model == "tiny":
        return TinyBackend(config, all_examples)
    return HuggingFaceBackend(config, all_examples)


def train(config: TrainerConfig, epoch_files, out_dir) -> Path:
    """Run the curriculum and write checkpoint.pt + metrics.json.

    Returns the checkpoint path. The metrics sidecar records per-epoch
    loss and input digest so a run can be audited after the fact.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    epoch_files = [Path(p) for p in epoch_files]
    digests = [sha256_file(p) for p in epoch_files]
    per_epoch_examples = [read_examples(p) for p in epoch_files]

    distinct = len(set(digests))
    if config.strategy == "dynamic_balanced" and distinct != len(epoch_files):
        logger.warning(
            "dynamic_balanced expected %d distinct epoch files, saw %d",
            len(epoch_files),
            distinct,
        )
    if config.strategy == "naive" and distinct != 1:
        logger.warning("naive strategy should reuse one static file, saw %d digests", distinct)

    backend = _build_backend(config, [ex for epoch in per_epoch_examples for ex in epoch])
    optimizer = AdamW(
        backend.model.parameters(),
        lr=config.learning_rate,
        betas=config.adam_betas,
        eps=config.adam_eps,
    )
    total_steps = sum(
        max(1, math.ceil(len(examples) / config.batch_size))
        for examples in per_epoch_examples
    )
    scheduler = LambdaLR(optimizer, lambda step: max(0.0, 1.0 - step / total_steps))

    rng = random.Random(config.seed)
    epoch_rows = []
    backend.model.train()
    for epoch_index, (path, examples) in enumerate(zip(epoch_files, per_epoch_examples), start=1):
        order = list(range(len(examples)))
        rng.shuffle(order)
        losses = []
        for start in range(0, len(order), config.batch_size):
            batch = [examples[i] for i in order[start : start + config.batch_size]]
            loss = backend.step_loss(batch)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
            losses.append(loss.item())
        mean_loss = sum(losses) / len(losses)
        logger.info("epoch %d  file=%s  loss=%.4f", epoch_index, path.name, mean_loss)
        epoch_rows.append(
            {
                "epoch": epoch_index,
                "file": str(path),
                "sha256": digests[epoch_index - 1],
                "n_examples": len(examples),
                "mean_loss": round(mean_loss, 6),
            }
        )

    checkpoint_path = out_dir / "checkpoint.pt"
    payload = {
        "backend": backend.name,
        "config": asdict(config),
        **backend.checkpoint_payload(),
    }
    torch.save(payload, checkpoint_path)
    (out_dir / "metrics.json").write_text(
        json.dumps(
            {
                "strategy": config.strategy,
                "epochs": epoch_rows,
                "distinct_digests": distinct,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return checkpoint_path
