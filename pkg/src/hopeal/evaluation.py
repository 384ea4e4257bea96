"""Classification metrics, confusion matrices and stratified k-fold splits."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, Label, labeled_documents

_CLASS_ORDER = (Label.NOT_HOPE, Label.HOPE)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts indexed [gold][predicted] over (Not Hope, Hope)."""

    counts: tuple

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def count(self, gold: Label, pred: Label) -> int:
        return self.counts[gold.numeric][pred.numeric]

    def render(self) -> str:
        names = [lbl.text for lbl in _CLASS_ORDER]
        width = max(len(n) for n in names) + 2
        cell = max(width, 8)
        lines = [
            " " * width
            + "".join(f"{'pred ' + n:>{cell + 6}}" for n in names)
        ]
        for g, name in enumerate(names):
            row = f"{'gold ' + name:<{width + 5}}"
            row += "".join(f"{self.counts[g][p]:>{cell + 6}}" for p in range(2))
            lines.append(row)
        return "\n".join(lines)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float

    def to_dict(self, ndigits: int | None = 3) -> dict:
        def r(v):
            return round(v, ndigits) if ndigits is not None else v

        out = {
            "accuracy": r(self.accuracy),
            "macro_precision": r(self.macro_precision),
            "macro_recall": r(self.macro_recall),
            "macro_f1": r(self.macro_f1),
            "weighted_precision": r(self.weighted_precision),
            "weighted_recall": r(self.weighted_recall),
            "weighted_f1": r(self.weighted_f1),
            "per_class": {
                lbl.text: {
                    "precision": r(m.precision),
                    "recall": r(m.recall),
                    "f1": r(m.f1),
                    "support": m.support,
                }
                for lbl, m in self.per_class.items()
            },
        }
        return out

    def to_json(self, ndigits: int | None = 3) -> str:
        return json.dumps(self.to_dict(ndigits), sort_keys=True)

    def to_csv_row(
        self,
        model: str,
        language: str,
        split: str,
        ndigits: int | None = 3,
    ) -> dict:
        def r(v):
            return round(v, ndigits) if ndigits is not None else v

        row = {"model": model, "language": language, "split": split}
        row.update(
            accuracy=r(self.accuracy),
            macro_f1=r(self.macro_f1),
            weighted_f1=r(self.weighted_f1),
            macro_precision=r(self.macro_precision),
            macro_recall=r(self.macro_recall),
            weighted_precision=r(self.weighted_precision),
            weighted_recall=r(self.weighted_recall),
        )
        for lbl in _CLASS_ORDER:
            m = self.per_class[lbl]
            key = lbl.text.lower().replace(" ", "_")
            row[f"{key}_precision"] = r(m.precision)
            row[f"{key}_recall"] = r(m.recall)
            row[f"{key}_f1"] = r(m.f1)
            row[f"{key}_support"] = m.support
        return row


CSV_FIELDS = [
    "model", "language", "split",
    "accuracy", "macro_f1", "weighted_f1",
    "macro_precision", "macro_recall",
    "weighted_precision", "weighted_recall",
    "not_hope_precision", "not_hope_recall", "not_hope_f1", "not_hope_support",
    "hope_precision", "hope_recall", "hope_f1", "hope_support",
]


def confusion(gold: Sequence[Label], pred: Sequence[Label]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise EvaluationError(f"{len(gold)} gold labels vs {len(pred)} predictions")
    if not gold:
        raise EvaluationError("cannot build a confusion matrix from no pairs")
    grid = [[0, 0], [0, 0]]
    for g, p in zip(gold, pred):
        grid[g.numeric][p.numeric] += 1
    return ConfusionMatrix(counts=(tuple(grid[0]), tuple(grid[1])))


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Standard per-class and averaged scores with 0/0 defined as 0."""
    if cm.total == 0:
        raise EvaluationError("empty confusion matrix")

    per_class = {}
    for lbl in _CLASS_ORDER:
        c = lbl.numeric
        tp = cm.counts[c][c]
        fp = sum(cm.counts[g][c] for g in range(2)) - tp
        fn = sum(cm.counts[c][p] for p in range(2)) - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        per_class[lbl] = ClassMetrics(
            precision=precision, recall=recall, f1=f1, support=tp + fn
        )

    total = cm.total
    supports = {lbl: per_class[lbl].support for lbl in _CLASS_ORDER}

    def macro(attr):
        return sum(getattr(per_class[lbl], attr) for lbl in _CLASS_ORDER) / 2

    def weighted(attr):
        return (
            sum(getattr(per_class[lbl], attr) * supports[lbl] for lbl in _CLASS_ORDER)
            / total
        )

    return MetricsReport(
        accuracy=(cm.counts[0][0] + cm.counts[1][1]) / total,
        per_class=per_class,
        macro_precision=macro("precision"),
        macro_recall=macro("recall"),
        macro_f1=macro("f1"),
        weighted_precision=weighted("precision"),
        weighted_recall=weighted("recall"),
        weighted_f1=weighted("f1"),
    )


@dataclass(frozen=True)
class FoldSplit:
    k: int
    folds: tuple  # k disjoint id tuples covering the dataset

    def train_ids(self, fold: int) -> list[str]:
        return [i for f in range(self.k) if f != fold for i in self.folds[f]]


def stratified_kfold(
    corpus: Corpus | Sequence, k: int = 5, rng_seed: int = 0
) -> FoldSplit:
    """Split a labeled corpus into k folds preserving class balance.

    Per class, ids are shuffled with the seeded RNG then dealt round-robin,
    so per-class fold counts never differ by more than one.
    """
    if k < 2:
        raise EvaluationError("k must be >= 2")
    items = labeled_documents(corpus)
    by_class: dict[Label, list[str]] = {}
    for item in items:
        by_class.setdefault(item.label, []).append(item.id)

    rng = random.Random(rng_seed)
    folds: list[list[str]] = [[] for _ in range(k)]
    for label in sorted(by_class, key=lambda lbl: lbl.numeric):
        ids = by_class[label]
        if len(ids) < k:
            raise EvaluationError(
                f"class {label.text!r} has {len(ids)} members, fewer than k={k}"
            )
        rng.shuffle(ids)
        for pos, doc_id in enumerate(ids):
            folds[pos % k].append(doc_id)

    return FoldSplit(k=k, folds=tuple(tuple(f) for f in folds))
