"""Tokenizations of titles with character offsets.

The positional target format points into a tokenization of the title, so
everything here is offset-accurate: each token records the half-open
character range it was cut from, and spans can be remapped between two
tokenizations of the same title (e.g. whitespace tokens to subword pieces).

Tokenizers are pluggable by scheme key: ``"whitespace"`` (default) or
``"mock-subword:<max_piece_len>"``, a deterministic stand-in for a real
subword vocabulary.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Callable

from .records import normalize

_NONSPACE = re.compile(r"\S+")


@dataclass(frozen=True)
class TokenSpan:
    """0-based token indices, end inclusive."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span ({self.start}, {self.end})")


@dataclass(frozen=True)
class Tokenization:
    """Ordered tokens of one title plus their character offsets.

    Offsets are half-open ``[start, end)`` ranges into ``text``; they are
    strictly increasing, non-overlapping, and slice back to the tokens
    exactly.
    """

    text: str
    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    scheme: str

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.offsets):
            raise ValueError("tokens and offsets must have equal length")
        prev_end = 0
        for token, (start, end) in zip(self.tokens, self.offsets):
            if start < prev_end or end <= start:
                raise ValueError(f"offsets must be increasing and non-overlapping, got ({start}, {end})")
            if self.text[start:end] != token:
                raise ValueError(f"token {token!r} does not match text slice {self.text[start:end]!r}")
            prev_end = end

    def __len__(self) -> int:
        return len(self.tokens)

    def char_range(self, span: TokenSpan) -> tuple[int, int]:
        if span.end >= len(self.tokens):
            raise ValueError(f"span {span} out of range for {len(self.tokens)} tokens")
        return self.offsets[span.start][0], self.offsets[span.end][1]


def whitespace_tokenize(title: str) -> Tokenization:
    """Split a title into maximal runs of non-whitespace characters.

    Punctuation stays attached to its word. An empty or all-whitespace
    title is an error: there is nothing to point into.
    """
    tokens = []
    offsets = []
    for m in _NONSPACE.finditer(title):
        tokens.append(m.group(0))
        offsets.append((m.start(), m.end()))
    if not tokens:
        raise ValueError("cannot tokenize an empty or all-whitespace title")
    return Tokenization(title, tuple(tokens), tuple(offsets), "whitespace")


def mock_subword_tokenize(title: str, max_piece_len: int) -> Tokenization:
    """Deterministic subword stand-in: chunk each word into fixed-size pieces.

    Every whitespace token is split into consecutive pieces of at most
    ``max_piece_len`` characters, so piece concatenation reproduces the
    word. With ``max_piece_len`` at or above the longest word this equals
    whitespace tokenization.
    """
    if max_piece_len < 1:
        raise ValueError(f"max_piece_len must be >= 1, got {max_piece_len}")
    tokens = []
    offsets = []
    for m in _NONSPACE.finditer(title):
        word_start = m.start()
        word = m.group(0)
        for i in range(0, len(word), max_piece_len):
            piece = word[i : i + max_piece_len]
            tokens.append(piece)
            offsets.append((word_start + i, word_start + i + len(piece)))
    if not tokens:
        raise ValueError("cannot tokenize an empty or all-whitespace title")
    return Tokenization(title, tuple(tokens), tuple(offsets), f"mock-subword:{max_piece_len}")


def find_value_span(
    tok: Tokenization, value: str, *, lowercase: bool = True
) -> TokenSpan | None:
    """Locate the leftmost contiguous token run matching a value.

    A run matches when its space-joined, normalized text equals the
    normalized value. A single token additionally matches with leading and
    trailing ASCII punctuation stripped, so value "white" matches token
    "white,". Returns None when the value does not occur.
    """
    target = normalize(value, lowercase=lowercase)
    if not target:
        return None
    n = len(tok.tokens)
    for start in range(n):
        stripped = tok.tokens[start].strip(string.punctuation)
        if stripped and normalize(stripped, lowercase=lowercase) == target:
            return TokenSpan(start, start)
        for end in range(start, n):
            joined = normalize(" ".join(tok.tokens[start : end + 1]), lowercase=lowercase)
            if joined == target:
                return TokenSpan(start, end)
            if len(joined) > len(target):
                break
    return None


def remap_span(span: TokenSpan, from_tok: Tokenization, to_tok: Tokenization) -> TokenSpan | None:
    """Re-express a span from one tokenization of a title in another.

    Returns the minimal span of ``to_tok`` whose character range covers the
    character range of ``span`` in ``from_tok``, or None when no token of
    ``to_tok`` overlaps it.
    """
    if from_tok.text != to_tok.text:
        raise ValueError("cannot remap spans across tokenizations of different titles")
    char_start, char_end = from_tok.char_range(span)
    first = None
    last = None
    for i, (s, e) in enumerate(to_tok.offsets):
        if s < char_end and e > char_start:
            if first is None:
                first = i
            last = i
        elif s >= char_end:
            break
    if first is None or last is None:
        return None
    return TokenSpan(first, last)


# Scheme registry. Factories receive the text after the first ":" in the
# scheme key ("" when absent) and return a tokenizer callable.
_SCHEME_FACTORIES: dict[str, Callable[[str], Callable[[str], Tokenization]]] = {}


def register_scheme(name: str, factory: Callable[[str], Callable[[str], Tokenization]]) -> None:
    _SCHEME_FACTORIES[name] = factory


def tokenizer_for_scheme(scheme: str) -> Callable[[str], Tokenization]:
    """Resolve a scheme key like "whitespace" or "mock-subword:4"."""
    name, _, arg = scheme.partition(":")
    factory = _SCHEME_FACTORIES.get(name)
    if factory is None:
        known = ", ".join(sorted(_SCHEME_FACTORIES))
        raise ValueError(f"unknown tokenizer scheme {scheme!r} (known: {known})")
    return factory(arg)


def _whitespace_factory(arg: str) -> Callable[[str], Tokenization]:
    if arg:
        raise ValueError(f"the whitespace scheme takes no parameter, got {arg!r}")
    return whitespace_tokenize


def _mock_subword_factory(arg: str) -> Callable[[str], Tokenization]:
    try:
        max_piece_len = int(arg)
    except ValueError:
        raise ValueError(f"mock-subword needs an integer piece length, got {arg!r}") from None
    if max_piece_len < 1:
        raise ValueError(f"mock-subword piece length must be >= 1, got {max_piece_len}")
    return lambda title: mock_subword_tokenize(title, max_piece_len)


register_scheme("whitespace", _whitespace_factory)
register_scheme("mock-subword", _mock_subword_factory)
