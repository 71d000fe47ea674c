"""Model construction and artifact persistence.

``model_key`` selects the backbone: the built-in ``"tiny"`` key builds a
small randomly-initialized BART over a corpus-derived character vocabulary
(runs anywhere, used by the tests), while any other key is treated as a
Hugging Face model id or local path and loaded with its own tokenizer
(requires a reachable hub or local cache).

An artifact is a directory: the model in ``save_pretrained`` layout plus
``vocab.json`` (character codec), ``adapter_config.json``, and the
training metrics log.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer, BartConfig, BartForConditionalGeneration

from .vocab import BOS_ID, EOS_ID, PAD_ID, CharVocab

TINY_KEY = "tiny"


class CharCodec:
    """Text codec over a CharVocab, batch-padding to tensors."""

    def __init__(self, vocab: CharVocab):
        self.vocab = vocab

    def encode_batch(self, texts: list[str], max_len: int) -> tuple[torch.Tensor, torch.Tensor]:
        seqs = [self.vocab.encode(t, max_len) for t in texts]
        width = max(len(s) for s in seqs)
        input_ids = torch.full((len(seqs), width), PAD_ID, dtype=torch.long)
        attention = torch.zeros((len(seqs), width), dtype=torch.long)
        for i, seq in enumerate(seqs):
            input_ids[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
            attention[i, : len(seq)] = 1
        return input_ids, attention

    def labels_batch(self, texts: list[str], max_len: int) -> torch.Tensor:
        seqs = [self.vocab.encode(t, max_len) for t in texts]
        width = max(len(s) for s in seqs)
        labels = torch.full((len(seqs), width), -100, dtype=torch.long)
        for i, seq in enumerate(seqs):
            labels[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        return labels

    def decode(self, ids) -> str:
        return self.vocab.decode(ids)


class HFCodec:
    """Thin wrapper giving a pretrained tokenizer the same surface."""

    def __init__(self, tokenizer):
        self.tokenizer = tokenizer

    def encode_batch(self, texts: list[str], max_len: int):
        enc = self.tokenizer(
            texts, padding=True, truncation=True, max_length=max_len, return_tensors="pt"
        )
        return enc["input_ids"], enc["attention_mask"]

    def labels_batch(self, texts: list[str], max_len: int) -> torch.Tensor:
        enc = self.tokenizer(
            texts, padding=True, truncation=True, max_length=max_len, return_tensors="pt"
        )
        labels = enc["input_ids"].clone()
        labels[enc["attention_mask"] == 0] = -100
        return labels

    def decode(self, ids) -> str:
        return self.tokenizer.decode(ids, skip_special_tokens=True)


def build_tiny_model(vocab: CharVocab) -> BartForConditionalGeneration:
    config = BartConfig(
        vocab_size=len(vocab),
        d_model=128,
        encoder_layers=2,
        decoder_layers=2,
        encoder_attention_heads=4,
        decoder_attention_heads=4,
        encoder_ffn_dim=256,
        decoder_ffn_dim=256,
        max_position_embeddings=512,
        pad_token_id=PAD_ID,
        bos_token_id=BOS_ID,
        eos_token_id=EOS_ID,
        decoder_start_token_id=BOS_ID,
        forced_eos_token_id=None,
        dropout=0.1,
        attention_dropout=0.0,
    )
    return BartForConditionalGeneration(config)


def build_model(model_key: str, corpus_texts: list[str]):
    """Resolve a model key into (model, codec)."""
    if model_key == TINY_KEY:
        vocab = CharVocab.from_texts(corpus_texts)
        return build_tiny_model(vocab), CharCodec(vocab)
    tokenizer = AutoTokenizer.from_pretrained(model_key)
    model = AutoModelForSeq2SeqLM.from_pretrained(model_key)
    return model, HFCodec(tokenizer)


def save_artifact(path: str | Path, model, codec, adapter_config: dict) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(path)
    if isinstance(codec, CharCodec):
        codec.vocab.save(path / "vocab.json")
    else:
        codec.tokenizer.save_pretrained(path)
    (path / "adapter_config.json").write_text(
        json.dumps(adapter_config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_artifact(path: str | Path):
    """Load (model, codec, adapter_config) from an artifact directory."""
    path = Path(path)
    config_path = path / "adapter_config.json"
    if not config_path.exists():
        raise FileNotFoundError(f"{path} is not an adapter artifact (missing adapter_config.json)")
    adapter_config = json.loads(config_path.read_text(encoding="utf-8"))
    model = AutoModelForSeq2SeqLM.from_pretrained(path)
    if (path / "vocab.json").exists():
        codec = CharCodec(CharVocab.load(path / "vocab.json"))
    else:
        codec = HFCodec(AutoTokenizer.from_pretrained(path))
    return model, codec, adapter_config
