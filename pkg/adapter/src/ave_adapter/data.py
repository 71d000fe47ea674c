"""JSONL loading for the adapter's two file contracts.

Training files carry ``{id, title, target}`` (the output of ``avegen
encode``); generation inputs carry ``{id, title}``. Schema violations
abort with the offending line number, matching the strictness of the
primary pipeline's loaders.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingPair:
    id: str
    title: str
    target: str


@dataclass(frozen=True)
class GenerationInput:
    id: str
    title: str


def _iter_objects(path: str | Path):
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise SchemaError(f"{path}:{lineno}: expected an object per line")
            yield lineno, obj


def _string_field(obj: dict, key: str, path, lineno: int) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise SchemaError(f"{path}:{lineno}: {key!r} must be a non-empty string")
    return value


def load_training_pairs(path: str | Path) -> list[TrainingPair]:
    pairs = []
    for lineno, obj in _iter_objects(path):
        pairs.append(TrainingPair(
            id=str(obj.get("id", lineno - 1)),
            title=_string_field(obj, "title", path, lineno),
            target=_string_field(obj, "target", path, lineno),
        ))
    if not pairs:
        raise SchemaError(f"{path}: no training pairs found")
    return pairs


def load_generation_inputs(path: str | Path) -> list[GenerationInput]:
    inputs = []
    for lineno, obj in _iter_objects(path):
        inputs.append(GenerationInput(
            id=str(obj.get("id", lineno - 1)),
            title=_string_field(obj, "title", path, lineno),
        ))
    return inputs
