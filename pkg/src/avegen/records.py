"""Domain types, text normalization, and the canonical JSONL record model.

A corpus is a sequence of product records, each holding a title and its gold
attribute-value pairs. Records travel between pipeline stages as JSONL: one
object per line with fields ``id`` (string), ``title`` (string), and
``pairs`` (array of ``{"attribute": ..., "value": ...}`` objects), UTF-8
with LF line endings.

Matching throughout the toolkit happens on *normalized* strings: trimmed,
whitespace-collapsed, and lowercased unless case-sensitive mode is selected.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, replace
from typing import IO, Iterable, Iterator

log = logging.getLogger(__name__)

# Reserved by the target-string formats; gold pairs containing them are
# rejected at ingestion (no escaping scheme exists).
RESERVED_CHARS = ("|", ";")


class Paradigm(enum.Enum):
    """How a record is serialized into a generation target."""

    WORD_SEQUENCE = "word"
    POSITIONAL_SEQUENCE = "positional"


class Cardinality(enum.Enum):
    """Single: exactly one gold pair. Multi: two or more."""

    SINGLE = "single"
    MULTI = "multi"


def normalize(text: str, *, lowercase: bool = True) -> str:
    """Canonicalize text for comparison.

    Strips leading/trailing whitespace, collapses internal whitespace runs
    to single spaces, and lowercases unless ``lowercase=False``. Total and
    idempotent; never lengthens its input.
    """
    collapsed = " ".join(text.split())
    return collapsed.lower() if lowercase else collapsed


@dataclass(frozen=True)
class AVPair:
    """One (attribute, value) pair, the atom of extraction.

    Both fields must be non-empty after trimming. Decoded pairs may contain
    stray separator characters inside the attribute (generated text is not
    trusted); *gold* pairs are screened for them at ingestion.
    """

    attribute: str
    value: str

    def __post_init__(self) -> None:
        if not self.attribute.strip():
            raise ValueError("AVPair attribute must be non-empty")
        if not self.value.strip():
            raise ValueError(f"AVPair value must be non-empty (attribute={self.attribute!r})")

    def normalized(self, *, lowercase: bool = True) -> AVPair:
        return AVPair(
            normalize(self.attribute, lowercase=lowercase),
            normalize(self.value, lowercase=lowercase),
        )

    def has_reserved_char(self) -> bool:
        return any(c in self.attribute or c in self.value for c in RESERVED_CHARS)


@dataclass(frozen=True)
class ProductRecord:
    """A title plus its gold pairs; the unit of encoding and evaluation."""

    id: str
    title: str
    pairs: tuple[AVPair, ...]

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise ValueError(f"record {self.id!r}: title must be non-empty")
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def with_pairs(self, pairs: Iterable[AVPair]) -> ProductRecord:
        return replace(self, pairs=tuple(pairs))


def cardinality(record: ProductRecord) -> Cardinality:
    """Classify a record as Single (one gold pair) or Multi (two or more)."""
    if not record.pairs:
        raise ValueError(f"record {record.id!r} has no pairs; cardinality is undefined")
    return Cardinality.SINGLE if len(record.pairs) == 1 else Cardinality.MULTI


def dedup_pairs(pairs: Iterable[AVPair], *, lowercase: bool = True) -> list[AVPair]:
    """Normalize pairs and keep the first occurrence of each distinct one.

    Output pairs are in normalized form, in first-occurrence order.
    Idempotent.
    """
    seen: set[AVPair] = set()
    out: list[AVPair] = []
    for pair in pairs:
        norm = pair.normalized(lowercase=lowercase)
        if norm not in seen:
            seen.add(norm)
            out.append(norm)
    return out


def unique_pairs(pairs: Iterable[AVPair], *, lowercase: bool = True) -> list[AVPair]:
    """Drop pairs that duplicate an earlier one under normalization.

    Unlike :func:`dedup_pairs` the surviving pairs keep their original
    surface text, so gold casing is preserved for encoding.
    """
    seen: set[AVPair] = set()
    out: list[AVPair] = []
    for pair in pairs:
        norm = pair.normalized(lowercase=lowercase)
        if norm not in seen:
            seen.add(norm)
            out.append(pair)
    return out


class RecordFormatError(ValueError):
    """A JSONL line does not match the record or prediction schema."""


def _clean_gold_pairs(raw_pairs: list[AVPair], record_id: str, *, lowercase: bool) -> list[AVPair]:
    kept = []
    for pair in raw_pairs:
        if pair.has_reserved_char():
            log.warning(
                "record %s: dropping pair (%r, %r): contains a reserved separator",
                record_id, pair.attribute, pair.value,
            )
            continue
        kept.append(pair)
    deduped = unique_pairs(kept, lowercase=lowercase)
    if len(deduped) < len(kept):
        log.warning("record %s: dropped %d duplicate pair(s)", record_id, len(kept) - len(deduped))
    return deduped


def _parse_pair_obj(obj: object, where: str) -> AVPair:
    if not isinstance(obj, dict):
        raise RecordFormatError(f"{where}: pair must be an object, got {type(obj).__name__}")
    attribute = obj.get("attribute")
    value = obj.get("value")
    if not isinstance(attribute, str) or not isinstance(value, str):
        raise RecordFormatError(f"{where}: pair needs string 'attribute' and 'value' fields")
    try:
        return AVPair(attribute, value)
    except ValueError as exc:
        raise RecordFormatError(f"{where}: {exc}") from None


def iter_records(lines: Iterable[str], *, lowercase: bool = True) -> Iterator[ProductRecord]:
    """Parse record JSONL lines, synthesizing ids where absent.

    Gold pairs containing reserved separators are dropped with a warning,
    as are duplicates under normalization (first surface form wins).
    Malformed lines raise :class:`RecordFormatError` naming the line.
    """
    seq = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"line {lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordFormatError(f"{where}: invalid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise RecordFormatError(f"{where}: expected an object per line")
        record_id = obj.get("id")
        if record_id is None:
            record_id = f"{seq:06d}"
        elif not isinstance(record_id, str):
            record_id = str(record_id)
        title = obj.get("title")
        if not isinstance(title, str) or not title.strip():
            raise RecordFormatError(f"{where}: 'title' must be a non-empty string")
        raw_pairs = obj.get("pairs")
        if not isinstance(raw_pairs, list):
            raise RecordFormatError(f"{where}: 'pairs' must be an array")
        pairs = [_parse_pair_obj(p, where) for p in raw_pairs]
        yield ProductRecord(record_id, title, tuple(_clean_gold_pairs(pairs, record_id, lowercase=lowercase)))
        seq += 1


def load_records(fp: IO[str] | Iterable[str], *, lowercase: bool = True) -> list[ProductRecord]:
    return list(iter_records(fp, lowercase=lowercase))


def record_to_json(record: ProductRecord) -> str:
    obj = {
        "id": record.id,
        "title": record.title,
        "pairs": [{"attribute": p.attribute, "value": p.value} for p in record.pairs],
    }
    return json.dumps(obj, ensure_ascii=False)


def write_records(fp: IO[str], records: Iterable[ProductRecord]) -> int:
    n = 0
    for record in records:
        fp.write(record_to_json(record) + "\n")
        n += 1
    return n


def load_predictions(lines: Iterable[str]) -> dict[str, list[AVPair]]:
    """Parse prediction JSONL (``{id, pairs: [...]}``) into an id-keyed map.

    Extra fields (e.g. decoder discard reports) are ignored. Duplicate ids
    are an error: ids are the join key back to gold records.
    """
    out: dict[str, list[AVPair]] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"line {lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordFormatError(f"{where}: invalid JSON: {exc}") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), (str, int)):
            raise RecordFormatError(f"{where}: expected an object with an 'id' field")
        record_id = str(obj["id"])
        if record_id in out:
            raise RecordFormatError(f"{where}: duplicate prediction id {record_id!r}")
        raw_pairs = obj.get("pairs")
        if not isinstance(raw_pairs, list):
            raise RecordFormatError(f"{where}: 'pairs' must be an array")
        out[record_id] = [_parse_pair_obj(p, where) for p in raw_pairs]
    return out
