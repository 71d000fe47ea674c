import random
import string

import pytest

from avegen import AVPair, ProductRecord

SKI_TITLE = (
    "New Band Women Skiing Jacket Outdoor Thicken Snowboarding Jacket "
    "Waterproof Windproof Outerwear Hooded Ski Coats WY006"
)
ADIDAS_TITLE = (
    "adidas superstar gold label, men's skateboarding shoes, white, "
    "wrap abrasion lightweight breathable b34308"
)


@pytest.fixture
def ski_record():
    return ProductRecord(
        "ski-0",
        SKI_TITLE,
        (
            AVPair("Gender", "Women"),
            AVPair("Sport Type", "Snowboarding"),
            AVPair("Collar", "Hooded"),
            AVPair("Model Number", "WY006"),
        ),
    )


@pytest.fixture
def adidas_record():
    return ProductRecord(
        "adidas-0",
        ADIDAS_TITLE,
        (AVPair("brand name", "adidas"), AVPair("model number", "b34308")),
    )


def random_word(rng: random.Random, min_len: int = 2, max_len: int = 8) -> str:
    n = rng.randint(min_len, max_len)
    return "".join(rng.choice(string.ascii_lowercase + string.digits) for _ in range(n))


def make_synthetic_record(rng: random.Random, rec_id: str, max_pairs: int = 4) -> ProductRecord:
    """A record whose values are planted, non-overlapping token runs of its title.

    Suitable for round-trip tests: every value has a findable span and no
    pair duplicates another under normalization.
    """
    n_tokens = rng.randint(4, 14)
    tokens = [random_word(rng) for _ in range(n_tokens)]
    title = " ".join(tokens)

    n_pairs = rng.randint(1, max_pairs)
    starts = list(range(n_tokens))
    rng.shuffle(starts)
    pairs = []
    used: set[int] = set()
    seen_keys: set[tuple[str, str]] = set()
    for start in starts:
        if len(pairs) == n_pairs:
            break
        width = rng.randint(1, 2)
        span = set(range(start, min(start + width, n_tokens)))
        if span & used:
            continue
        value = " ".join(tokens[i] for i in sorted(span))
        attribute = " ".join(random_word(rng) for _ in range(rng.randint(1, 2)))
        if (attribute, value) in seen_keys:
            continue
        seen_keys.add((attribute, value))
        used |= span
        pairs.append(AVPair(attribute, value))
    if not pairs:
        pairs = [AVPair(random_word(rng), tokens[0])]
    return ProductRecord(rec_id, title, tuple(pairs))
