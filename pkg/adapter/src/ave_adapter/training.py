"""Training loop with best-on-validation checkpoint selection.

Defaults mirror the published setup (batch size 16, learning rate 3e-4);
epochs, truncation lengths, and beam width are exposed as flags since no
published values exist for them. After every epoch the model is scored on
the validation file and the best-scoring weights are what the artifact
keeps.
"""

from __future__ import annotations

import copy
import json
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import torch

from .data import load_training_pairs
from .modeling import build_model, load_artifact, save_artifact

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    model_key: str = "tiny"
    batch_size: int = 16
    learning_rate: float = 3e-4
    max_epochs: int = 20
    max_source_len: int = 256
    max_target_len: int = 128
    seed: int = 0
    selection: str = "best_valid_loss"

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be positive, got {self.max_epochs}")


def _batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator).tolist()
    for i in range(0, n, batch_size):
        yield order[i : i + batch_size]


def _epoch_loss(model, codec, pairs, config, *, optimizer=None, generator=None) -> float:
    training = optimizer is not None
    model.train(training)
    total = 0.0
    count = 0
    if training:
        index_batches = _batches(len(pairs), config.batch_size, generator)
    else:
        index_batches = (
            list(range(i, min(i + config.batch_size, len(pairs))))
            for i in range(0, len(pairs), config.batch_size)
        )
    for indices in index_batches:
        batch = [pairs[i] for i in indices]
        input_ids, attention = codec.encode_batch([p.title for p in batch], config.max_source_len)
        labels = codec.labels_batch([p.target for p in batch], config.max_target_len)
        with torch.set_grad_enabled(training):
            out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
        if training:
            optimizer.zero_grad()
            out.loss.backward()
            optimizer.step()
        total += out.loss.item() * len(batch)
        count += len(batch)
    return total / count


def train(
    train_file: str | Path,
    valid_file: str | Path,
    config: TrainConfig,
    artifact_dir: str | Path,
    *,
    resume_from: str | Path | None = None,
) -> dict:
    """Train and save an artifact; returns the per-epoch metrics log.

    With ``resume_from`` the model and codec are restored from an existing
    artifact instead of being built fresh, and training continues under the
    given config.
    """
    started = time.monotonic()
    train_pairs = load_training_pairs(train_file)
    valid_pairs = load_training_pairs(valid_file)

    torch.manual_seed(config.seed)
    if resume_from is not None:
        model, codec, _ = load_artifact(resume_from)
    else:
        corpus = [p.title for p in train_pairs + valid_pairs] + [
            p.target for p in train_pairs + valid_pairs
        ]
        model, codec = build_model(config.model_key, corpus)

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)

    best_loss = float("inf")
    best_state = None
    history = []
    for epoch in range(1, config.max_epochs + 1):
        train_loss = _epoch_loss(
            model, codec, train_pairs, config, optimizer=optimizer, generator=generator
        )
        valid_loss = _epoch_loss(model, codec, valid_pairs, config)
        is_best = valid_loss < best_loss
        if is_best:
            best_loss = valid_loss
            best_state = copy.deepcopy(model.state_dict())
        history.append({
            "epoch": epoch,
            "train_loss": round(train_loss, 6),
            "valid_loss": round(valid_loss, 6),
            "best": is_best,
        })
        log.info("epoch %d: train %.4f valid %.4f%s", epoch, train_loss, valid_loss,
                 " *" if is_best else "")

    model.load_state_dict(best_state)
    adapter_config = {"model_key": config.model_key, "train_config": asdict(config)}
    save_artifact(artifact_dir, model, codec, adapter_config)

    artifact_dir = Path(artifact_dir)
    with open(artifact_dir / "metrics.jsonl", "w", encoding="utf-8") as fp:
        for row in history:
            fp.write(json.dumps(row) + "\n")
    manifest = {
        "tool": "ave-adapter",
        "subcommand": "train",
        "train_config": asdict(config),
        "inputs": [str(train_file), str(valid_file)],
        "resumed_from": str(resume_from) if resume_from else None,
        "artifact": str(artifact_dir),
        "best_valid_loss": round(best_loss, 6),
        "duration_s": round(time.monotonic() - started, 3),
    }
    (artifact_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return {"history": history, "best_valid_loss": best_loss}
