"""Transformer scorer for the hopeal active-learning loop."""

from .bridge import BridgeConfig, BridgeError, TransformerScorer, serve
from .finetune import finetune, read_labeled_csv

__version__ = "0.1.0"

__all__ = [
    "BridgeConfig",
    "BridgeError",
    "TransformerScorer",
    "finetune",
    "read_labeled_csv",
    "serve",
]
