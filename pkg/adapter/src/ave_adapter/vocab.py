"""Character vocabulary for the built-in tiny model.

Titles and targets in this task are short strings over a small alphabet,
so a character codec is enough to train the offline toy model and keeps
the adapter free of any downloaded tokenizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
UNK_ID = 3
_SPECIALS = 4


@dataclass(frozen=True)
class CharVocab:
    chars: tuple[str, ...]

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "CharVocab":
        return cls(tuple(sorted({c for text in texts for c in text})))

    def __len__(self) -> int:
        return len(self.chars) + _SPECIALS

    @cached_property
    def _index(self) -> dict[str, int]:
        return {c: i + _SPECIALS for i, c in enumerate(self.chars)}

    def encode(self, text: str, max_len: int | None = None) -> list[int]:
        ids = [self._index.get(c, UNK_ID) for c in text]
        if max_len is not None:
            ids = ids[: max_len - 2]
        return [BOS_ID] + ids + [EOS_ID]

    def decode(self, ids: Iterable[int]) -> str:
        return "".join(
            self.chars[i - _SPECIALS] for i in ids if _SPECIALS <= int(i) < len(self)
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps({"chars": list(self.chars)}, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "CharVocab":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(tuple(obj["chars"]))
