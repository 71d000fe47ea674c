"""Serialize records into generation targets.

Two layouts are supported. The word-sequence layout spells each pair out as
``value ; attribute``; the positional layout replaces the value with the
token indices of its span in the title, ``start end attribute``. Pairs are
joined with `` | `` in both. Separators are rendered with single
surrounding spaces; the decoder tolerates any spacing.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, replace

from .records import AVPair, Paradigm, ProductRecord
from .tokenization import TokenSpan, find_value_span, remap_span, tokenizer_for_scheme, whitespace_tokenize

log = logging.getLogger(__name__)

PAIR_SEP = " | "
FIELD_SEP = " ; "


class MissingValuePolicy(enum.Enum):
    """What to do when a value has no span in the title (positional only)."""

    SKIP = "skip"
    ERROR = "error"


class PairOrder(enum.Enum):
    """TITLE: ascending value position, unfindable last. INPUT: as given."""

    TITLE = "title"
    INPUT = "input"


@dataclass(frozen=True)
class EncodeOptions:
    paradigm: Paradigm = Paradigm.WORD_SEQUENCE
    tokenizer_scheme: str = "whitespace"
    on_unfindable_value: MissingValuePolicy = MissingValuePolicy.SKIP
    pair_order: PairOrder = PairOrder.TITLE

    def __post_init__(self) -> None:
        tokenizer_for_scheme(self.tokenizer_scheme)  # fail fast on bad keys


def ordered_pairs(
    record: ProductRecord, opts: EncodeOptions, *, lowercase: bool = True
) -> list[tuple[AVPair, TokenSpan | None]]:
    """Pairs in emission order, each with its whitespace-token span (None when
    the value has no span in the title)."""
    ws = whitespace_tokenize(record.title)
    with_spans = [(pair, find_value_span(ws, pair.value, lowercase=lowercase)) for pair in record.pairs]
    if opts.pair_order is PairOrder.INPUT:
        return with_spans
    # Stable sort keeps input order among ties and pushes unfindable values last.
    return sorted(with_spans, key=lambda item: (item[1] is None, item[1].start if item[1] else 0))


def positional_segments(
    record: ProductRecord, opts: EncodeOptions, *, lowercase: bool = True
) -> list[tuple[AVPair, TokenSpan]]:
    """Emission-ordered (pair, span) list under the configured tokenizer.

    Spans are located on whitespace tokens and remapped when the scheme
    differs. Pairs whose value has no span are skipped with a warning or
    raise, per ``opts.on_unfindable_value``.
    """
    tokenize = tokenizer_for_scheme(opts.tokenizer_scheme)
    target_tok = tokenize(record.title)
    ws_tok = target_tok if opts.tokenizer_scheme == "whitespace" else whitespace_tokenize(record.title)

    out: list[tuple[AVPair, TokenSpan]] = []
    for pair, ws_span in ordered_pairs(record, opts, lowercase=lowercase):
        span = ws_span
        if span is not None and target_tok is not ws_tok:
            span = remap_span(span, ws_tok, target_tok)
        if span is None:
            if opts.on_unfindable_value is MissingValuePolicy.ERROR:
                raise ValueError(
                    f"record {record.id!r}: value {pair.value!r} (attribute {pair.attribute!r}) "
                    "has no span in the title"
                )
            log.warning(
                "record %s: skipping pair (%r, %r): value not found in title",
                record.id, pair.attribute, pair.value,
            )
            continue
        out.append((pair, span))
    return out


def encode_word_sequence(
    record: ProductRecord, opts: EncodeOptions | None = None, *, lowercase: bool = True
) -> str:
    """Render ``value ; attribute`` segments joined by `` | ``."""
    opts = opts or EncodeOptions(paradigm=Paradigm.WORD_SEQUENCE)
    if not record.pairs:
        raise ValueError(f"record {record.id!r} has no pairs to encode")
    ordered = ordered_pairs(record, opts, lowercase=lowercase)
    return PAIR_SEP.join(f"{pair.value}{FIELD_SEP}{pair.attribute}" for pair, _ in ordered)


def encode_positional_sequence(
    record: ProductRecord, opts: EncodeOptions | None = None, *, lowercase: bool = True
) -> str:
    """Render ``start end attribute`` segments joined by `` | ``."""
    opts = opts or EncodeOptions(paradigm=Paradigm.POSITIONAL_SEQUENCE)
    if not record.pairs:
        raise ValueError(f"record {record.id!r} has no pairs to encode")
    segments = positional_segments(record, opts, lowercase=lowercase)
    if not segments:
        raise ValueError(f"record {record.id!r}: no value has a span in the title; nothing to encode")
    return PAIR_SEP.join(f"{span.start} {span.end} {pair.attribute}" for pair, span in segments)


def encode(record: ProductRecord, opts: EncodeOptions, *, lowercase: bool = True) -> str:
    if opts.paradigm is Paradigm.WORD_SEQUENCE:
        return encode_word_sequence(record, opts, lowercase=lowercase)
    return encode_positional_sequence(record, opts, lowercase=lowercase)


def shuffle_pairs(record: ProductRecord, seed: int) -> ProductRecord:
    """Deterministically permute a record's pairs (same seed, same order)."""
    pairs = list(record.pairs)
    random.Random(seed).shuffle(pairs)
    return replace(record, pairs=tuple(pairs))
