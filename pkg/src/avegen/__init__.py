"""Generative attribute-value extraction toolkit.

Encodes product records into generation targets (word-sequence or
positional-sequence layout), robustly decodes model generations back into
attribute-value pairs, derives and splits datasets from raw tuple dumps,
and scores predictions with exact-match micro P/R/F1.
"""

from .decoding import (
    DecodeReport,
    DiscardReason,
    DiscardedSegment,
    PositionalTriple,
    decode,
    parse_positional_sequence,
    parse_word_sequence,
    resolve_spans,
)
from .encoding import (
    EncodeOptions,
    MissingValuePolicy,
    PairOrder,
    encode,
    encode_positional_sequence,
    encode_word_sequence,
    shuffle_pairs,
)
from .metrics import PRF, EvalReport, PairField, evaluate, match_joint, match_projected, prf
from .oracle import NoiseSpec, oracle_generate
from .preprocess import (
    PRESETS,
    DatasetStats,
    DeriveError,
    PipelineConfig,
    RawTuple,
    derive,
    split,
    stats,
)
from .records import (
    AVPair,
    Cardinality,
    Paradigm,
    ProductRecord,
    RecordFormatError,
    cardinality,
    dedup_pairs,
    load_records,
    normalize,
    unique_pairs,
)
from .tokenization import (
    Tokenization,
    TokenSpan,
    find_value_span,
    mock_subword_tokenize,
    remap_span,
    tokenizer_for_scheme,
    whitespace_tokenize,
)

__version__ = "0.1.0"
