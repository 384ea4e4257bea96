"""Pool-based active learning with uncertainty sampling.

Each round the current model scores the unlabeled pool, the most
uncertain documents are selected, a simulated oracle reveals their gold
labels, the batch is appended to the labeled set and the model is
retrained from scratch.  The loop stops after a fixed number of rounds,
when the pool empties, or when accuracy on the remaining pool plateaus.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

from .classifier import ProbDist, Scorer
from .corpus import Corpus, Document, Label, LabeledDocument, labeled_documents


class ActiveLearningError(ValueError):
    pass


class Strategy(Enum):
    ENTROPY = "entropy"
    RANDOM = "random"
    MARGIN = "margin"


@dataclass(frozen=True)
class ALConfig:
    batch_k: int = 20
    max_rounds: int = 5
    min_rounds: int = 3
    plateau_delta: float = 0.002
    seed_fraction: float = 0.10
    strategy: Strategy = Strategy.ENTROPY
    rng_seed: int = 0

    def __post_init__(self):
        if self.batch_k < 1:
            raise ActiveLearningError("batch_k must be >= 1")
        if self.min_rounds > self.max_rounds:
            raise ActiveLearningError("min_rounds must be <= max_rounds")
        if self.plateau_delta < 0:
            raise ActiveLearningError("plateau_delta must be >= 0")
        if not 0 < self.seed_fraction <= 1:
            raise ActiveLearningError("seed_fraction must be in (0, 1]")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    labeled_size: int
    pool_accuracy: float | None
    selected_ids: tuple

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "round": self.round,
                "labeled_size": self.labeled_size,
                "pool_accuracy": self.pool_accuracy,
                "selected_ids": list(self.selected_ids),
            },
            separators=(",", ":"),
        )


@dataclass
class ALState:
    labeled: list
    pool: list
    round: int = 0
    history: list = field(default_factory=list)


@dataclass(frozen=True)
class OracleHandle:
    """Simulated oracle: looks up withheld gold labels by document id."""

    labels: dict

    @classmethod
    def from_labeled(cls, items: Sequence[LabeledDocument]) -> "OracleHandle":
        return cls(labels={item.id: item.label for item in items})

    def lookup(self, doc_id: str) -> Label:
        try:
            return self.labels[doc_id]
        except KeyError:
            raise ActiveLearningError(f"oracle has no label for id {doc_id!r}") from None


def entropy(dist: ProbDist) -> float:
    """Shannon entropy of a prediction, in nats (0 * ln 0 taken as 0)."""
    total = 0.0
    for p in dist.probs:
        if p > 0.0:
            total -= p * math.log(p)
    return total


def select_batch(
    scorer: Scorer,
    pool: Sequence[Document],
    cfg: ALConfig,
    rng: random.Random | None = None,
) -> list[str]:
    """Pick min(batch_k, |pool|) document ids to label next.

    Entropy ranks by descending prediction entropy, Margin by smallest
    probability gap; both break ties on ascending id.  Random draws a
    uniform sample without replacement from ``rng`` (seeded from
    ``cfg.rng_seed`` when not supplied).
    """
    if not pool:
        raise ActiveLearningError("cannot select from an empty pool")
    k = min(cfg.batch_k, len(pool))

    if cfg.strategy is Strategy.RANDOM:
        if rng is None:
            rng = random.Random(cfg.rng_seed)
        return [doc.id for doc in rng.sample(list(pool), k)]

    dists = scorer.score_batch(list(pool))
    if cfg.strategy is Strategy.ENTROPY:
        keyed = sorted(
            ((-entropy(dist), doc.id) for doc, dist in zip(pool, dists))
        )
    else:
        keyed = sorted(
            ((abs(dist.p_hope - dist.p_not_hope), doc.id) for doc, dist in zip(pool, dists))
        )
    return [doc_id for _, doc_id in keyed[:k]]


def _stratified_seed(
    items: Sequence[LabeledDocument], fraction: float, rng: random.Random
) -> tuple[list[LabeledDocument], list[LabeledDocument]]:
    by_class: dict[Label, list[LabeledDocument]] = {}
    for item in items:
        by_class.setdefault(item.label, []).append(item)

    seed_ids = set()
    for label in sorted(by_class, key=lambda lbl: lbl.numeric):
        members = by_class[label]
        take = int(len(members) * fraction)
        if take < 1:
            raise ActiveLearningError(
                f"seed fraction {fraction} too small to cover class {label.text!r} "
                f"({len(members)} members)"
            )
        shuffled = list(members)
        rng.shuffle(shuffled)
        seed_ids.update(item.id for item in shuffled[:take])

    seed = [item for item in items if item.id in seed_ids]
    pool = [item for item in items if item.id not in seed_ids]
    return seed, pool


def _pool_accuracy(scorer: Scorer, pool: Sequence[LabeledDocument]) -> float | None:
    if not pool:
        return None
    dists = scorer.score_batch([item.doc for item in pool])
    hits = sum(
        1 for item, dist in zip(pool, dists)
        if dist.predicted_label() is item.label
    )
    return hits / len(pool)


def run_loop(
    train_set: Corpus | Sequence[LabeledDocument],
    scorer_factory: Callable[[Sequence[LabeledDocument]], Scorer],
    oracle: OracleHandle,
    cfg: ALConfig = ALConfig(),
) -> tuple[Scorer, ALState]:
    """Run the full uncertainty-sampling loop.

    A stratified ``seed_fraction`` sample bootstraps the first model;
    every round then selects a batch from the pool, asks the oracle for
    its labels, appends it to the labeled set and retrains.  Accuracy on
    the remaining pool is recorded per round and, once ``min_rounds``
    have run, an improvement below ``plateau_delta`` stops the loop.

    Returns the final scorer and the loop state (labeled set, leftover
    pool, per-round history).
    """
    items = labeled_documents(train_set)
    for item in items:
        oracle.lookup(item.id)  # fail early if the oracle is not total

    rng = random.Random(cfg.rng_seed)
    seed, pool = _stratified_seed(items, cfg.seed_fraction, rng)
    state = ALState(labeled=list(seed), pool=pool)
    scorer = scorer_factory(state.labeled)

    while state.round < cfg.max_rounds and state.pool:
        round_no = state.round + 1
        selected = select_batch(
            scorer, [item.doc for item in state.pool], cfg, rng=rng
        )
        selected_set = set(selected)
        by_id = {item.id: item for item in state.pool}
        state.labeled.extend(
            LabeledDocument(by_id[doc_id].doc, oracle.lookup(doc_id))
            for doc_id in selected
        )
        state.pool = [item for item in state.pool if item.id not in selected_set]

        scorer = scorer_factory(state.labeled)
        accuracy = _pool_accuracy(scorer, state.pool)
        record = RoundRecord(
            round=round_no,
            labeled_size=len(state.labeled),
            pool_accuracy=accuracy,
            selected_ids=tuple(selected),
        )
        state.history.append(record)
        state.round = round_no

        if (
            round_no >= cfg.min_rounds
            and len(state.history) >= 2
            and accuracy is not None
        ):
            previous = state.history[-2].pool_accuracy
            if previous is not None and accuracy - previous < cfg.plateau_delta:
                break

    return scorer, state


def write_history(history: Sequence[RoundRecord], path: str | Path) -> None:
    """Write one JSON record per round, newline terminated."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in history:
            fh.write(record.to_json_line())
            fh.write("\n")
