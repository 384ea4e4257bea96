"""Shared builders for the test suite."""

from __future__ import annotations

import csv
import math
from typing import Sequence

from hopeal.classifier import ProbDist
from hopeal.corpus import Document, Label, LabeledDocument


def doc(doc_id: str, text: str) -> Document:
    return Document(id=doc_id, raw_text=text)


def labeled(doc_id: str, text: str, label: Label) -> LabeledDocument:
    return LabeledDocument(doc(doc_id, text), label)


def make_labeled_set(rows: Sequence[tuple[str, str, Label]]) -> list[LabeledDocument]:
    return [labeled(i, t, l) for i, t, l in rows]


def write_csv(path, rows, header=("id", "text", "label")):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        writer.writerows(rows)
    return path


def dyadic_prob(i: int, denom: int = 256) -> tuple[float, float]:
    """A [p_not_hope, p_hope] pair whose float sum is exactly 1.0."""
    p = (i % (denom - 1) + 1) / denom
    return (1.0 - p, p)


class FixedTableScorer:
    """In-process scorer answering from a raw_text -> (p0, p1) table."""

    def __init__(self, table: dict):
        self.table = table

    def score_batch(self, docs):
        return [ProbDist(probs=tuple(self.table[d.raw_text])) for d in docs]


def entropy_oracle(probs) -> float:
    """Independent brute-force entropy: plain sum of -p*ln(p)."""
    return -sum(p * math.log(p) for p in probs if p > 0.0)
