"""Transformer-backed scorer behind the al-scorer line protocol.

Wraps a pretrained sequence-classification checkpoint and answers
score requests over stdin/stdout.  Text is passed to the subword
tokenizer untouched (no lowercasing or punctuation stripping here);
inputs are truncated and padded to the configured sequence length.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

PROTOCOL_NAME = "al-scorer"
PROTOCOL_VERSION = 1
CLASS_NAMES = ("Not Hope", "Hope")


class BridgeError(RuntimeError):
    pass


@dataclass(frozen=True)
class BridgeConfig:
    model: str
    max_sequence_length: int = 128
    learning_rate: float = 2e-5
    batch_size: int = 32
    epochs: int = 3
    device: str = "cpu"
    seed: int = 0

    def __post_init__(self):
        if self.max_sequence_length < 1:
            raise BridgeError("max_sequence_length must be >= 1")
        if self.batch_size < 1:
            raise BridgeError("batch_size must be >= 1")
        if self.epochs < 1:
            raise BridgeError("epochs must be >= 1")


def class_column_order(config) -> tuple[int, int]:
    """Logit columns for (Not Hope, Hope).

    Uses the checkpoint's label2id when it names our classes; otherwise
    assumes the conventional 0 = negative, 1 = positive layout.
    """
    label2id = getattr(config, "label2id", None) or {}
    folded = {str(name).strip().lower(): idx for name, idx in label2id.items()}
    if "not hope" in folded and "hope" in folded:
        return folded["not hope"], folded["hope"]
    return 0, 1


class TransformerScorer:
    """Loads a checkpoint once and scores batches of raw texts."""

    def __init__(self, cfg: BridgeConfig):
        self.cfg = cfg
        torch.manual_seed(cfg.seed)
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(cfg.model)
            self.model = AutoModelForSequenceClassification.from_pretrained(cfg.model)
        except Exception as exc:
            raise BridgeError(f"could not load model {cfg.model!r}: {exc}") from exc
        if self.model.config.num_labels != 2:
            raise BridgeError(
                f"model has {self.model.config.num_labels} labels, expected 2"
            )
        self.device = torch.device(cfg.device)
        self.model.to(self.device)
        self.model.eval()
        self.columns = class_column_order(self.model.config)

    def score(self, texts: list[str]) -> list[list[float]]:
        """Softmax probabilities, one [p_not_hope, p_hope] row per text."""
        rows: list[list[float]] = []
        for start in range(0, len(texts), self.cfg.batch_size):
            chunk = texts[start : start + self.cfg.batch_size]
            encoded = self.tokenizer(
                chunk,
                truncation=True,
                padding=True,
                max_length=self.cfg.max_sequence_length,
                return_tensors="pt",
            ).to(self.device)
            try:
                with torch.no_grad():
                    logits = self.model(**encoded).logits
            except torch.cuda.OutOfMemoryError as exc:
                raise BridgeError(f"device out of memory scoring batch: {exc}") from exc
            probs = torch.softmax(logits.double(), dim=-1)
            not_hope, hope = self.columns
            for row in probs:
                rows.append([float(row[not_hope]), float(row[hope])])
        return rows


def serve(cfg: BridgeConfig, stdin=None, stdout=None) -> None:
    """Answer score requests until stdin closes.

    The handshake is only emitted once the model has loaded, so a broken
    checkpoint fails the process before any client commits to it.
    Malformed requests get an error line and the loop continues.
    """
    scorer = TransformerScorer(cfg)
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    stdout.write(
        json.dumps(
            {"protocol": PROTOCOL_NAME, "version": PROTOCOL_VERSION},
            separators=(",", ":"),
        )
        + "\n"
    )
    stdout.flush()

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            request_id = request["request_id"]
            texts = request["texts"]
            if not isinstance(texts, list) or not all(
                isinstance(t, str) for t in texts
            ):
                raise ValueError("texts must be a list of strings")
        except (ValueError, KeyError, TypeError) as exc:
            stdout.write(
                json.dumps({"error": f"bad request: {exc}"}, separators=(",", ":"))
                + "\n"
            )
            stdout.flush()
            continue

        probs = scorer.score(texts)
        stdout.write(
            json.dumps(
                {"request_id": request_id, "probs": probs}, separators=(",", ":")
            )
            + "\n"
        )
        stdout.flush()
