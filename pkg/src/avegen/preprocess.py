"""Derive evaluation-ready record corpora from raw (title, attribute, value) dumps.

Raw tuple dumps are noisy: values can be NULL-marked or uninformative
literals ("yes", "no"), values may not occur in their title, and attribute
frequencies follow a long tail. The pipeline here cleans tuples, filters
attributes by frequency, groups tuples sharing a title into records, and
reports per-stage attrition. Frequency filtering runs *after* value-based
cleaning, so thresholds apply to the tuples that can actually survive.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .records import AVPair, ProductRecord, normalize, unique_pairs
from .tokenization import Tokenization, find_value_span, whitespace_tokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RawTuple:
    title: str
    attribute: str
    value: str


@dataclass(frozen=True)
class PipelineConfig:
    """Cleaning and filtering knobs for :func:`derive`.

    ``min_attr_freq``/``max_attr_freq`` bound attribute frequency counted on
    cleaned tuples; ``null_markers`` and ``drop_value_literals`` are value
    strings to discard (compared normalized); ``require_value_in_title``
    drops tuples whose value has no span in the whitespace-tokenized title.
    """

    min_attr_freq: int = 1
    max_attr_freq: int | None = None
    drop_value_literals: frozenset[str] = frozenset()
    require_value_in_title: bool = False
    null_markers: frozenset[str] = frozenset({"NULL"})

    def __post_init__(self) -> None:
        if self.min_attr_freq < 1:
            raise ValueError(f"min_attr_freq must be >= 1, got {self.min_attr_freq}")
        if self.max_attr_freq is not None and self.max_attr_freq <= self.min_attr_freq:
            raise ValueError(
                f"max_attr_freq ({self.max_attr_freq}) must exceed min_attr_freq ({self.min_attr_freq})"
            )


PRESETS: dict[str, PipelineConfig] = {
    "av-data-v1": PipelineConfig(min_attr_freq=60, null_markers=frozenset({"NULL"})),
    "av-mae": PipelineConfig(
        min_attr_freq=700,
        drop_value_literals=frozenset({"yes", "no", "na"}),
        require_value_in_title=True,
    ),
}


class DeriveError(ValueError):
    """Derivation produced no records; carries the attrition counts."""

    def __init__(self, message: str, attrition: dict[str, int]):
        super().__init__(message)
        self.attrition = attrition


@dataclass
class DeriveResult:
    records: list[ProductRecord]
    attrition: dict[str, int] = field(default_factory=dict)


def derive(raw: Sequence[RawTuple], config: PipelineConfig, *, lowercase: bool = True) -> DeriveResult:
    """Run the cleaning pipeline and group surviving tuples into records.

    Stages, in order: (1) drop tuples with blank fields, reserved separator
    characters, or values in the null-marker/literal drop lists; (2) when
    configured, drop tuples whose value has no span in the title; (3) drop
    tuples whose attribute frequency, measured on the survivors, is below
    ``min_attr_freq`` or above ``max_attr_freq``; (4) group by exact title
    into records, deduplicating pairs; (5) drop empty records. Ordering is
    deterministic: records appear in first-seen title order.
    """
    attrition = {
        "input": len(raw),
        "dropped_blank": 0,
        "dropped_separator": 0,
        "dropped_value_filtered": 0,
        "dropped_value_not_in_title": 0,
        "dropped_attr_frequency": 0,
        "tuples_kept": 0,
        "pairs_deduplicated": 0,
        "records_dropped_empty": 0,
        "records": 0,
    }
    drop_values = {normalize(v, lowercase=lowercase) for v in config.null_markers}
    drop_values |= {normalize(v, lowercase=lowercase) for v in config.drop_value_literals}

    # Stage 1: field cleaning and value drop lists.
    stage1: list[RawTuple] = []
    for t in raw:
        if not t.title.strip() or not t.attribute.strip() or not t.value.strip():
            attrition["dropped_blank"] += 1
            continue
        if any(c in t.attribute or c in t.value for c in ("|", ";")):
            attrition["dropped_separator"] += 1
            continue
        if normalize(t.value, lowercase=lowercase) in drop_values:
            attrition["dropped_value_filtered"] += 1
            continue
        stage1.append(t)

    # Stage 2: value must have a span in its title.
    if config.require_value_in_title:
        tok_cache: dict[str, Tokenization] = {}
        stage2 = []
        for t in stage1:
            tok = tok_cache.get(t.title)
            if tok is None:
                tok = tok_cache[t.title] = whitespace_tokenize(t.title)
            if find_value_span(tok, t.value, lowercase=lowercase) is None:
                attrition["dropped_value_not_in_title"] += 1
            else:
                stage2.append(t)
    else:
        stage2 = stage1

    # Stage 3: attribute frequency bounds, measured on cleaned tuples.
    freq: dict[str, int] = {}
    for t in stage2:
        key = normalize(t.attribute, lowercase=lowercase)
        freq[key] = freq.get(key, 0) + 1
    stage3 = []
    for t in stage2:
        n = freq[normalize(t.attribute, lowercase=lowercase)]
        if n < config.min_attr_freq or (config.max_attr_freq is not None and n > config.max_attr_freq):
            attrition["dropped_attr_frequency"] += 1
        else:
            stage3.append(t)
    attrition["tuples_kept"] = len(stage3)

    # Stage 4: group by exact title, first-seen order; dedup pairs.
    grouped: dict[str, list[AVPair]] = {}
    for t in stage3:
        grouped.setdefault(t.title, []).append(AVPair(t.attribute, t.value))
    records: list[ProductRecord] = []
    seq = 0
    for title, pairs in grouped.items():
        deduped = unique_pairs(pairs, lowercase=lowercase)
        attrition["pairs_deduplicated"] += len(pairs) - len(deduped)
        if not deduped:  # pragma: no cover - grouping only sees surviving tuples
            attrition["records_dropped_empty"] += 1
            continue
        records.append(ProductRecord(f"{seq:06d}", title, tuple(deduped)))
        seq += 1
    attrition["records"] = len(records)

    if not records:
        raise DeriveError(
            "derivation left no records; attrition: "
            + ", ".join(f"{k}={v}" for k, v in attrition.items()),
            attrition,
        )
    return DeriveResult(records, attrition)


def split(
    records: Sequence[ProductRecord],
    ratios: tuple[float, float, float],
    seed: int,
) -> tuple[list[ProductRecord], list[ProductRecord], list[ProductRecord]]:
    """Deterministic shuffled split into train/valid/test.

    Valid and test sizes are floors of their ratios; the remainder goes to
    train, so eval splits never exceed their stated fraction.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be three positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    if len(records) < 3:
        raise ValueError(f"need at least 3 records to split, got {len(records)}")

    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_valid = math.floor(n * ratios[1])
    n_test = math.floor(n * ratios[2])
    n_train = n - n_valid - n_test
    train = shuffled[:n_train]
    valid = shuffled[n_train : n_train + n_valid]
    test = shuffled[n_train + n_valid :]
    return train, valid, test


@dataclass(frozen=True)
class DatasetStats:
    n_sentences: int
    n_single: int
    n_multi: int
    n_attributes: int

    def as_dict(self) -> dict[str, int]:
        return {
            "sentences": self.n_sentences,
            "single": self.n_single,
            "multi": self.n_multi,
            "attributes": self.n_attributes,
        }


def stats(records: Iterable[ProductRecord], *, lowercase: bool = True) -> DatasetStats:
    """Count sentences, single/multi split, and distinct attributes."""
    n = single = multi = 0
    attributes: set[str] = set()
    for record in records:
        n += 1
        if len(record.pairs) == 1:
            single += 1
        elif len(record.pairs) >= 2:
            multi += 1
        for pair in record.pairs:
            attributes.add(normalize(pair.attribute, lowercase=lowercase))
    return DatasetStats(n, single, multi, len(attributes))


def read_raw_tuples(path: str | Path) -> list[RawTuple]:
    """Load raw tuples from JSONL or tab-separated text, by extension.

    ``.tsv``/``.tab``/``.txt`` files are read as three tab-separated columns
    (title, attribute, value); anything else as JSONL objects with those
    fields.
    """
    path = Path(path)
    tuples: list[RawTuple] = []
    with open(path, encoding="utf-8") as fp:
        if path.suffix.lower() in (".tsv", ".tab", ".txt"):
            for lineno, line in enumerate(fp, start=1):
                if not line.strip():
                    continue
                cols = line.rstrip("\n").split("\t")
                if len(cols) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 tab-separated columns, got {len(cols)}")
                tuples.append(RawTuple(*cols))
        else:
            for lineno, line in enumerate(fp, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
                if not isinstance(obj, dict):
                    raise ValueError(f"{path}:{lineno}: expected an object per line")
                try:
                    tuples.append(
                        RawTuple(str(obj["title"]), str(obj["attribute"]), str(obj["value"]))
                    )
                except KeyError as exc:
                    raise ValueError(f"{path}:{lineno}: missing field {exc}") from None
    return tuples


_CONFIG_FIELDS = {
    "min_attr_freq",
    "max_attr_freq",
    "drop_value_literals",
    "require_value_in_title",
    "null_markers",
}


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    """Read a PipelineConfig from a JSON file; unknown keys are an error."""
    with open(path, encoding="utf-8") as fp:
        obj = json.load(fp)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = sorted(set(obj) - _CONFIG_FIELDS)
    if unknown:
        raise ValueError(f"{path}: unknown config fields: {unknown}")
    kwargs = dict(obj)
    for key in ("drop_value_literals", "null_markers"):
        if key in kwargs:
            kwargs[key] = frozenset(str(v) for v in kwargs[key])
    return PipelineConfig(**kwargs)
