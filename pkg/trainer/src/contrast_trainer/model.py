"""Sequence-pair classifier backends.

The built-in "tiny" backend is a from-scratch torch encoder (word
embeddings + segment embeddings, masked mean pooling, 2-layer head) small
enough for CPU smoke runs. Any other model identifier is treated as a
Hugging Face checkpoint name for full-scale runs (ELECTRA-Small in the
published configuration); that path needs the checkpoint to be locally
available or downloadable.
"""

from __future__ import annotations

from collections import Counter

import torch
from torch import nn

from .records import tokenize

PAD, UNK, CLS, SEP = 0, 1, 2, 3
SPECIALS = ("<pad>", "<unk>", "<cls>", "<sep>")


def build_vocab(examples, max_size: int = 5000) -> dict:
    counter = Counter()
    for ex in examples:
        counter.update(tokenize(ex.premise))
        counter.update(tokenize(ex.hypothesis))
    vocab = {tok: i for i, tok in enumerate(SPECIALS)}
    for token, _count in sorted(counter.items(), key=lambda kv: (-kv[1], kv[0])):
        if len(vocab) >= max_size:
            break
        vocab[token] = len(vocab)
    return vocab


def encode_pair(vocab: dict, premise: str, hypothesis: str, max_len: int):
    """(token ids, segment ids) for [CLS] premise [SEP] hypothesis [SEP]."""
    ids = [CLS]
    segments = [0]
    for token in tokenize(premise):
        ids.append(vocab.get(token, UNK))
        segments.append(0)
    ids.append(SEP)
    segments.append(0)
    for token in tokenize(hypothesis):
        ids.append(vocab.get(token, UNK))
        segments.append(1)
    ids.append(SEP)
    segments.append(1)
    return ids[:max_len], segments[:max_len]


def collate(vocab, examples, max_len: int):
    encoded = [encode_pair(vocab, ex.premise, ex.hypothesis, max_len) for ex in examples]
    width = max(len(ids) for ids, _ in encoded)
    batch_ids = torch.full((len(encoded), width), PAD, dtype=torch.long)
    batch_segments = torch.zeros((len(encoded), width), dtype=torch.long)
    mask = torch.zeros((len(encoded), width), dtype=torch.bool)
    for row, (ids, segments) in enumerate(encoded):
        batch_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        batch_segments[row, : len(segments)] = torch.tensor(segments, dtype=torch.long)
        mask[row, : len(ids)] = True
    return batch_ids, batch_segments, mask


class TinyPairClassifier(nn.Module):
    """Embedding-bag style encoder over the joined pair."""

    def __init__(self, vocab_size: int, hidden: int = 64, num_labels: int = 3):
        super().__init__()
        self.token_embedding = nn.Embedding(vocab_size, hidden, padding_idx=PAD)
        self.segment_embedding = nn.Embedding(2, hidden)
        self.head = nn.Sequential(
            nn.Linear(hidden, hidden),
            nn.GELU(),
            nn.Linear(hidden, num_labels),
        )

    def forward(self, token_ids, segment_ids, mask):
        states = self.token_embedding(token_ids) + self.segment_embedding(segment_ids)
        weights = mask.unsqueeze(-1).float()
        pooled = (states * weights).sum(dim=1) / weights.sum(dim=1).clamp(min=1.0)
        return self.head(pooled)


def build_tiny_model(vocab_size: int, hidden: int, seed: int) -> TinyPairClassifier:
    torch.manual_seed(seed)
    return TinyPairClassifier(vocab_size=vocab_size, hidden=hidden)
