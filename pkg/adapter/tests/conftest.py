import json
import random
import string

import pytest

from avegen import AVPair, EncodeOptions, Paradigm, ProductRecord, encode
from avegen.records import record_to_json


def make_corpus(n: int, seed: int = 0) -> list[ProductRecord]:
    """Short synthetic records with planted values; titles stay small so the
    character-level toy model sees short sequences."""
    rng = random.Random(seed)

    def word():
        return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(3, 6)))

    records = []
    for i in range(n):
        tokens = [word() for _ in range(5)]
        title = " ".join(tokens)
        pairs = (AVPair("kind", tokens[1]), AVPair("sort", tokens[3]))
        records.append(ProductRecord(f"r{i}", title, pairs))
    return records


def write_records_file(path, records):
    path.write_text("".join(record_to_json(r) + "\n" for r in records))


def write_encoded_file(path, records, paradigm=Paradigm.WORD_SEQUENCE):
    opts = EncodeOptions(paradigm=paradigm)
    lines = []
    for r in records:
        lines.append(json.dumps(
            {"id": r.id, "title": r.title, "target": encode(r, opts)}, ensure_ascii=False
        ))
    path.write_text("".join(line + "\n" for line in lines))


@pytest.fixture(scope="session")
def toy_corpus():
    return make_corpus(10, seed=3)
