"""Parse generated text back into attribute-value pairs.

Generated sequences are split on "|" and each segment is interpreted
according to the paradigm. Nothing a model can emit makes these functions
raise: malformed segments are discarded with a reason, and every input
segment is accounted for as a pair, a discard, or a removed duplicate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .records import AVPair, Paradigm, normalize
from .tokenization import Tokenization, tokenizer_for_scheme


class DiscardReason(enum.Enum):
    MISSING_SEPARATOR = "missing_separator"
    MISSING_FIELD = "missing_field"
    NON_INTEGER_INDEX = "non_integer_index"
    INVERTED_SPAN = "inverted_span"
    OUT_OF_RANGE = "out_of_range"
    EMPTY_FIELD = "empty_field"


@dataclass(frozen=True)
class DiscardedSegment:
    segment: str
    reason: DiscardReason


@dataclass(frozen=True)
class PositionalTriple:
    """Raw (start, end, attribute) as generated; indices unvalidated."""

    start: int
    end: int
    attribute: str


@dataclass(frozen=True)
class DecodeReport:
    """Outcome of decoding one generated sequence.

    Conservation: ``len(pairs) + len(discarded_segments) +
    duplicates_removed`` equals the number of "|"-segments in the input.
    """

    pairs: tuple[AVPair, ...] = ()
    discarded_segments: tuple[DiscardedSegment, ...] = ()
    duplicates_removed: int = 0

    def pair_set(self) -> set[AVPair]:
        return set(self.pairs)


@dataclass(frozen=True)
class PositionalParse:
    """Triples recovered from positional text, pre-resolution."""

    triples: tuple[PositionalTriple, ...] = ()
    segments: tuple[str, ...] = ()  # raw segment per triple, for reporting
    discarded: tuple[DiscardedSegment, ...] = ()


class _Dedup:
    """First-occurrence pair collector that counts removed duplicates."""

    def __init__(self) -> None:
        self.pairs: list[AVPair] = []
        self.removed = 0
        self._seen: set[AVPair] = set()

    def add(self, pair: AVPair) -> None:
        if pair in self._seen:
            self.removed += 1
        else:
            self._seen.add(pair)
            self.pairs.append(pair)


def parse_word_sequence(text: str, *, lowercase: bool = True) -> DecodeReport:
    """Recover pairs from ``value ; attribute | ...`` text.

    Each "|"-segment is cut at its first ";": left is the value, right the
    attribute (any further ";" stays inside the attribute). Segments with
    no ";" or an empty side are discarded; surviving pairs are normalized
    and deduplicated.
    """
    dedup = _Dedup()
    discards: list[DiscardedSegment] = []
    for segment in text.split("|"):
        if ";" not in segment:
            discards.append(DiscardedSegment(segment, DiscardReason.MISSING_SEPARATOR))
            continue
        raw_value, _, raw_attribute = segment.partition(";")
        value = normalize(raw_value, lowercase=lowercase)
        attribute = normalize(raw_attribute, lowercase=lowercase)
        if not value or not attribute:
            discards.append(DiscardedSegment(segment, DiscardReason.EMPTY_FIELD))
            continue
        dedup.add(AVPair(attribute, value))
    return DecodeReport(tuple(dedup.pairs), tuple(discards), dedup.removed)


def parse_positional_sequence(text: str) -> PositionalParse:
    """Recover (start, end, attribute) triples from positional text.

    A segment must whitespace-split into at least three tokens, the first
    two non-negative integers; the rest is the attribute. Anything else is
    discarded with a reason. Index validity against a title is checked
    later, at resolution.
    """
    triples: list[PositionalTriple] = []
    segments: list[str] = []
    discards: list[DiscardedSegment] = []
    for segment in text.split("|"):
        tokens = segment.split()
        if len(tokens) < 3:
            discards.append(DiscardedSegment(segment, DiscardReason.MISSING_FIELD))
            continue
        try:
            start, end = int(tokens[0]), int(tokens[1])
        except ValueError:
            discards.append(DiscardedSegment(segment, DiscardReason.NON_INTEGER_INDEX))
            continue
        if start < 0 or end < 0:
            discards.append(DiscardedSegment(segment, DiscardReason.NON_INTEGER_INDEX))
            continue
        triples.append(PositionalTriple(start, end, " ".join(tokens[2:])))
        segments.append(segment)
    return PositionalParse(tuple(triples), tuple(segments), tuple(discards))


def resolve_spans(
    triples: Sequence[PositionalTriple],
    tok: Tokenization,
    *,
    segments: Sequence[str] | None = None,
    lowercase: bool = True,
) -> DecodeReport:
    """Materialize triples into pairs by slicing the tokenized title.

    Inverted (start > end) and out-of-range spans are discarded; valid ones
    yield the tokens of the span joined with single spaces, normalized.
    """
    if segments is None:
        segments = [f"{t.start} {t.end} {t.attribute}" for t in triples]
    dedup = _Dedup()
    discards: list[DiscardedSegment] = []
    for triple, segment in zip(triples, segments):
        if triple.start > triple.end:
            discards.append(DiscardedSegment(segment, DiscardReason.INVERTED_SPAN))
            continue
        if triple.start < 0 or triple.end >= len(tok.tokens):
            discards.append(DiscardedSegment(segment, DiscardReason.OUT_OF_RANGE))
            continue
        value = normalize(" ".join(tok.tokens[triple.start : triple.end + 1]), lowercase=lowercase)
        attribute = normalize(triple.attribute, lowercase=lowercase)
        if not value or not attribute:
            discards.append(DiscardedSegment(segment, DiscardReason.EMPTY_FIELD))
            continue
        dedup.add(AVPair(attribute, value))
    return DecodeReport(tuple(dedup.pairs), tuple(discards), dedup.removed)


def decode(
    text: str,
    paradigm: Paradigm,
    title: str = "",
    tokenizer_scheme: str = "whitespace",
    *,
    lowercase: bool = True,
) -> DecodeReport:
    """Decode one generated sequence; total over arbitrary text.

    The title (and tokenizer scheme) ground span resolution and are only
    consulted in the positional paradigm.
    """
    if paradigm is Paradigm.WORD_SEQUENCE:
        return parse_word_sequence(text, lowercase=lowercase)
    parsed = parse_positional_sequence(text)
    tok = tokenizer_for_scheme(tokenizer_scheme)(title)
    resolved = resolve_spans(parsed.triples, tok, segments=parsed.segments, lowercase=lowercase)
    return DecodeReport(
        resolved.pairs,
        parsed.discarded + resolved.discarded_segments,
        resolved.duplicates_removed,
    )
