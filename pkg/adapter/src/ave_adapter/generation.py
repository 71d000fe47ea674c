"""Batch generation from a trained artifact into the pipeline's file contract."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch

from .data import load_generation_inputs
from .modeling import load_artifact

log = logging.getLogger(__name__)


def generate_file(
    artifact_dir: str | Path,
    input_file: str | Path,
    output_file: str | Path,
    *,
    num_beams: int = 1,
    max_target_len: int | None = None,
    batch_size: int = 16,
) -> int:
    """Run generation over ``{id, title}`` lines, writing ``{id, generated}``.

    Output order matches input order, one line per input line. Returns the
    number of lines written.
    """
    model, codec, adapter_config = load_artifact(artifact_dir)
    config = adapter_config.get("train_config", {})
    if max_target_len is None:
        max_target_len = config.get("max_target_len", 128)
    max_source_len = config.get("max_source_len", 256)

    inputs = load_generation_inputs(input_file)
    model.eval()
    n = 0
    with open(output_file, "w", encoding="utf-8") as out:
        for i in range(0, len(inputs), batch_size):
            batch = inputs[i : i + batch_size]
            input_ids, attention = codec.encode_batch([g.title for g in batch], max_source_len)
            with torch.no_grad():
                generated = model.generate(
                    input_ids=input_ids,
                    attention_mask=attention,
                    max_length=max_target_len,
                    num_beams=num_beams,
                    do_sample=False,
                )
            for item, ids in zip(batch, generated):
                out.write(json.dumps(
                    {"id": item.id, "title": item.title, "generated": codec.decode(ids)},
                    ensure_ascii=False,
                ) + "\n")
                n += 1
    log.info("generated %d lines to %s", n, output_file)
    return n
