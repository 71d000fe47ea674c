"""Model bridge for the avegen pipeline.

Fine-tunes a sequence-to-sequence model on encoded targets and emits
generation files in the pipeline's JSONL contract. The pipeline itself
stays model-agnostic: anything that writes ``{id, generated}`` lines can
feed ``avegen decode``.

Training/generation symbols import torch on first use; the data and vocab
helpers stay import-light.
"""

from .data import SchemaError, load_generation_inputs, load_training_pairs
from .vocab import CharVocab

__version__ = "0.1.0"

_LAZY = {
    "TrainConfig": ("ave_adapter.training", "TrainConfig"),
    "train": ("ave_adapter.training", "train"),
    "generate_file": ("ave_adapter.generation", "generate_file"),
}


def __getattr__(name):
    if name in _LAZY:
        import importlib

        module, attr = _LAZY[name]
        return getattr(importlib.import_module(module), attr)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
