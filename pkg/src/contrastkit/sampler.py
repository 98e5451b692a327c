"""Per-epoch balanced training mixtures: contrast set + equal-size fresh
random slice of the original pool, shuffled and fully reproducible.

Every epoch draws its own original subset (without replacement within the
epoch, independently across epochs) so the contrast portion stays fixed
while the original portion rotates. Seeds derive from the base seed with
a keyed sha256 construction, so the same (base_seed, epoch, inputs) always
produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Dataset, Provenance, serialize_dataset
from .errors import SamplingError
from .util import sha256_bytes

__all__ = [
    "MixConfig",
    "EpochManifest",
    "derive_seed",
    "sample_original_subset",
    "build_epoch_mix",
    "build_all_epochs",
    "emit_epoch_files",
]


@dataclass(frozen=True)
class MixConfig:
    base_seed: int
    epochs: int = 3
    exclude_anchor_ids: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class EpochManifest:
    """Everything needed to reproduce one epoch file byte-for-byte."""

    epoch: int
    contrast_size: int
    original_subset_ids: tuple
    shuffle_seed: int
    output_digest: str

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "contrast_size": self.contrast_size,
            "original_subset_ids": list(self.original_subset_ids),
            "shuffle_seed": self.shuffle_seed,
            "output_digest": self.output_digest,
        }


def derive_seed(base_seed: int, epoch: int, purpose: str) -> int:
    """Keyed seed derivation: first 8 bytes of sha256("base:epoch:purpose").

    Fixed for the life of the format so manifests stay replayable.
    """
    digest = hashlib.sha256(f"{base_seed}:{epoch}:{purpose}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def sample_original_subset(
    pool: Dataset,
    size: int,
    epoch: int,
    config: MixConfig,
    exclude_ids=frozenset(),
) -> list:
    """Uniform sample of ``size`` original-example ids, without replacement.

    Different epochs under the same base seed draw independently.
    """
    eligible = [
        ex.id
        for ex in pool
        if ex.provenance is Provenance.ORIGINAL and ex.id not in exclude_ids
    ]
    if len(eligible) < size:
        raise SamplingError(
            f"original pool too small: need {size}, have {len(eligible)} eligible"
        )
    rng = random.Random(derive_seed(config.base_seed, epoch, "subset"))
    return rng.sample(eligible, size)


def build_epoch_mix(
    contrast: Dataset, pool: Dataset, epoch: int, config: MixConfig
) -> tuple:
    """One epoch's mixture: contrast examples + equal-size fresh originals.

    Output size is exactly 2x the contrast size, globally shuffled with a
    seeded permutation; the manifest records the subset ids, shuffle seed,
    and the content digest of the canonical serialization.
    """
    if len(contrast) == 0:
        raise SamplingError("contrast set is empty")
    exclude = (
        frozenset(ex.id for ex in contrast) if config.exclude_anchor_ids else frozenset()
    )
    subset_ids = sample_original_subset(
        pool, len(contrast), epoch, config, exclude_ids=exclude
    )
    by_id = pool.by_id()
    combined = list(contrast.examples) + [by_id[i] for i in subset_ids]
    shuffle_seed = derive_seed(config.base_seed, epoch, "shuffle")
    random.Random(shuffle_seed).shuffle(combined)
    mixed = Dataset(name=f"epoch_{epoch}", examples=tuple(combined))
    manifest = EpochManifest(
        epoch=epoch,
        contrast_size=len(contrast),
        original_subset_ids=tuple(subset_ids),
        shuffle_seed=shuffle_seed,
        output_digest=sha256_bytes(serialize_dataset(mixed)),
    )
    return mixed, manifest


def build_all_epochs(contrast: Dataset, pool: Dataset, config: MixConfig) -> list:
    return [
        build_epoch_mix(contrast, pool, epoch, config)
        for epoch in range(1, config.epochs + 1)
    ]


def emit_epoch_files(mixes: Sequence, out_dir, config: MixConfig, extra=None) -> list:
    """Write epoch_<e>.jsonl per mixture plus manifest.json.

    Idempotent: identical inputs produce identical bytes on rerun. ``extra``
    is merged into the manifest payload (tool version, input digests, ...)
    and must itself be deterministic for reruns to stay byte-identical.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SamplingError(f"cannot create output directory {out_dir}: {exc}")
    paths = []
    for mixed, manifest in mixes:
        path = out_dir / f"epoch_{manifest.epoch}.jsonl"
        try:
            path.write_bytes(serialize_dataset(mixed))
        except OSError as exc:
            raise SamplingError(f"cannot write {path}: {exc}")
        paths.append(path)
    manifest_path = out_dir / "manifest.json"
    payload = {
        "config": {
            "base_seed": config.base_seed,
            "epochs": config.epochs,
            "exclude_anchor_ids": config.exclude_anchor_ids,
        },
        "epochs": [manifest.to_dict() for _, manifest in mixes],
    }
    if extra:
        payload.update(extra)
    try:
        manifest_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise SamplingError(f"cannot write {manifest_path}: {exc}")
    paths.append(manifest_path)
    return paths
