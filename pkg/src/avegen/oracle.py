"""Pseudo-model generation for validating the pipeline without training.

In copy mode the oracle emits each record's encoded target verbatim, so
decoding and evaluating its output must score a perfect F1. Noise knobs
degrade it in controlled, seeded ways: drop a pair, corrupt its attribute,
or corrupt its value (word layout) / span (positional layout). Unlike the
encoder, the oracle is total: a record left with nothing to emit produces
an empty generation rather than an error.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Iterable, Iterator

from .encoding import EncodeOptions, ordered_pairs, positional_segments
from .records import Paradigm, ProductRecord
from .tokenization import TokenSpan, tokenizer_for_scheme

PAIR_SEP = " | "


@dataclass(frozen=True)
class NoiseSpec:
    p_drop: float = 0.0
    p_attr: float = 0.0
    p_value: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_drop", "p_attr", "p_value"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {rate}")

    def is_noiseless(self) -> bool:
        return self.p_drop == self.p_attr == self.p_value == 0.0


def _corrupt_text(text: str, rng: random.Random) -> str:
    suffix = "".join(rng.choice(string.ascii_lowercase) for _ in range(3))
    return f"{text} {suffix}"


def _wrong_span(span: TokenSpan, n_tokens: int, rng: random.Random) -> TokenSpan:
    if n_tokens > 1:
        j = rng.randrange(n_tokens - 1)
        if j >= span.start:
            j += 1
        return TokenSpan(j, j)
    # Single-token title: no wrong-but-valid span exists, force out of range.
    return TokenSpan(n_tokens, n_tokens)


def oracle_generate(
    records: Iterable[ProductRecord],
    paradigm: Paradigm,
    noise: NoiseSpec,
    seed: int,
    tokenizer_scheme: str = "whitespace",
    *,
    lowercase: bool = True,
) -> Iterator[tuple[ProductRecord, str]]:
    """Yield (record, generated) with seeded noise applied per pair.

    One PRNG stream drives every decision in record order, so identical
    inputs and seed reproduce identical files.
    """
    rng = random.Random(seed)
    opts = EncodeOptions(paradigm=paradigm, tokenizer_scheme=tokenizer_scheme)
    for record in records:
        if paradigm is Paradigm.WORD_SEQUENCE:
            segments = []
            for pair, _ in ordered_pairs(record, opts, lowercase=lowercase):
                if noise.p_drop and rng.random() < noise.p_drop:
                    continue
                attribute = pair.attribute
                value = pair.value
                if noise.p_attr and rng.random() < noise.p_attr:
                    attribute = _corrupt_text(attribute, rng)
                if noise.p_value and rng.random() < noise.p_value:
                    value = _corrupt_text(value, rng)
                segments.append(f"{value} ; {attribute}")
        else:
            n_tokens = len(tokenizer_for_scheme(tokenizer_scheme)(record.title).tokens)
            segments = []
            for pair, span in positional_segments(record, opts, lowercase=lowercase):
                if noise.p_drop and rng.random() < noise.p_drop:
                    continue
                attribute = pair.attribute
                if noise.p_attr and rng.random() < noise.p_attr:
                    attribute = _corrupt_text(attribute, rng)
                if noise.p_value and rng.random() < noise.p_value:
                    span = _wrong_span(span, n_tokens, rng)
                segments.append(f"{span.start} {span.end} {attribute}")
        yield record, PAIR_SEP.join(segments)
