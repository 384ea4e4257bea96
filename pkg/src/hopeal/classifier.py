"""Binary logistic regression with L2 regularization.

Training minimizes the convex objective

    J(w, b) = (1/n) sum_i log(1 + exp(-s_i (w.x_i + b))) + (lambda/2) ||w||^2

with s_i in {-1, +1} encoding Not Hope / Hope, by full-batch gradient
descent with Armijo backtracking from zero initialization.  The bias is
not regularized.  Two runs on the same data produce bit-identical models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .corpus import Document, Label, LabeledDocument
from .features import SparseVector, Vectorizer, transform


@dataclass(frozen=True)
class ProbDist:
    """Per-class probabilities in the fixed order [Not Hope, Hope]."""

    probs: tuple

    def __post_init__(self):
        if len(self.probs) != 2:
            raise ValueError("binary task: expected exactly two probabilities")
        if any(p < -1e-9 or p > 1 + 1e-9 for p in self.probs):
            raise ValueError(f"probability out of [0, 1]: {self.probs}")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1: {self.probs}")

    @property
    def p_not_hope(self) -> float:
        return self.probs[0]

    @property
    def p_hope(self) -> float:
        return self.probs[1]

    def predicted_label(self) -> Label:
        # Exact tie resolves to the non-positive class.
        return Label.HOPE if self.p_hope > self.p_not_hope else Label.NOT_HOPE


@runtime_checkable
class Scorer(Protocol):
    """Anything that turns documents into class probabilities."""

    def score_batch(self, docs: Sequence[Document]) -> list[ProbDist]: ...


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 1.0
    max_iters: int = 500
    grad_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be > 0")


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    lam: float
    vectorizer_fingerprint: str = ""

    @property
    def dim(self) -> int:
        return len(self.weights)

    def to_json(self) -> str:
        payload = {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "lambda": self.lam,
            "vectorizer_fingerprint": self.vectorizer_fingerprint,
            "format_version": 1,
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        payload = json.loads(text)
        if payload.get("format_version") != 1:
            raise ValueError(f"unsupported model format: {payload.get('format_version')}")
        return cls(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=float(payload["bias"]),
            lam=float(payload["lambda"]),
            vectorizer_fingerprint=payload["vectorizer_fingerprint"],
        )


@dataclass
class _Design:
    """Row-compressed view of the training vectors for fast numpy math."""

    row_ids: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    n: int
    dim: int

    @classmethod
    def from_vectors(cls, X: Sequence[SparseVector]) -> "_Design":
        dim = X[0].dim
        counts = []
        for i, x in enumerate(X):
            if x.dim != dim:
                raise ValueError(f"vector {i} has dimension {x.dim}, expected {dim}")
            if not np.all(np.isfinite(x.values)):
                raise ValueError(f"vector {i} contains non-finite values")
            counts.append(x.nnz)
        row_ids = np.repeat(np.arange(len(X)), counts)
        indices = (
            np.concatenate([x.indices for x in X])
            if X
            else np.empty(0, dtype=np.int64)
        )
        values = (
            np.concatenate([x.values for x in X]) if X else np.empty(0)
        )
        return cls(row_ids=row_ids, indices=indices, values=values, n=len(X), dim=dim)

    def logits(self, w: np.ndarray, b: float) -> np.ndarray:
        # bincount keeps a fixed summation order and handles empty rows.
        return b + np.bincount(
            self.row_ids, weights=self.values * w[self.indices], minlength=self.n
        )

    def accumulate(self, per_example: np.ndarray) -> np.ndarray:
        """Sum per_example_i * x_i over all rows, as a dense vector."""
        return np.bincount(
            self.indices,
            weights=self.values * per_example[self.row_ids],
            minlength=self.dim,
        )


def _objective(design: _Design, signs: np.ndarray, lam: float,
               w: np.ndarray, b: float) -> float:
    margins = signs * design.logits(w, b)
    # log(1 + exp(-m)) computed stably for both signs of m.
    loss = float(np.mean(np.logaddexp(0.0, -margins)))
    return loss + 0.5 * lam * float(np.dot(w, w))


def _gradient(design: _Design, signs: np.ndarray, lam: float,
              w: np.ndarray, b: float) -> tuple[np.ndarray, float]:
    margins = signs * design.logits(w, b)
    # d/dm log(1+exp(-m)) = -sigmoid(-m)
    coeff = -signs * _sigmoid(-margins) / design.n
    grad_w = design.accumulate(coeff) + lam * w
    grad_b = float(np.sum(coeff))
    return grad_w, grad_b


def _sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train(
    X: Sequence[SparseVector],
    y: Sequence[Label],
    cfg: TrainConfig = TrainConfig(),
    trace: list | None = None,
) -> LinearModel:
    """Fit the regularized logistic model on (X, y).

    Deterministic: zero initialization, full-batch gradient descent with
    backtracking line search, terminating when the gradient's max norm
    drops to ``cfg.grad_tol`` or after ``cfg.max_iters`` steps.  If
    ``trace`` is given, the objective value after every accepted step is
    appended to it (the initial value first).

    Raises:
        ValueError: size mismatch, single-class input, inconsistent
            dimensions or non-finite features.
    """
    if len(X) != len(y):
        raise ValueError(f"{len(X)} vectors but {len(y)} labels")
    if not X:
        raise ValueError("empty training set")
    present = {lbl for lbl in y}
    if len(present) < 2:
        raise ValueError(f"training data contains a single class: {present}")

    design = _Design.from_vectors(X)
    signs = np.array([1.0 if lbl is Label.HOPE else -1.0 for lbl in y])

    w = np.zeros(design.dim)
    b = 0.0
    obj = _objective(design, signs, cfg.lam, w, b)
    if trace is not None:
        trace.append(obj)
    step = 1.0
    for _ in range(cfg.max_iters):
        grad_w, grad_b = _gradient(design, signs, cfg.lam, w, b)
        grad_inf = max(
            float(np.max(np.abs(grad_w))) if design.dim else 0.0, abs(grad_b)
        )
        if grad_inf <= cfg.grad_tol:
            break
        grad_sq = float(np.dot(grad_w, grad_w)) + grad_b * grad_b

        # Armijo backtracking; doubling the last accepted step keeps the
        # search adaptive without losing determinism.
        accepted = False
        while step > 1e-20:
            w_new = w - step * grad_w
            b_new = b - step * grad_b
            obj_new = _objective(design, signs, cfg.lam, w_new, b_new)
            if obj_new <= obj - 1e-4 * step * grad_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        w, b, obj = w_new, b_new, obj_new
        if trace is not None:
            trace.append(obj)
        step *= 2.0

    return LinearModel(weights=w, bias=b, lam=cfg.lam)


def predict_proba(model: LinearModel, x: SparseVector) -> ProbDist:
    """Class probabilities for one vector: p(Hope) = sigmoid(w.x + b)."""
    if x.dim != model.dim:
        raise ValueError(f"vector dimension {x.dim} != model dimension {model.dim}")
    z = x.dot(model.weights) + model.bias
    if z >= 0:
        p_hope = 1.0 / (1.0 + math.exp(-z))
    else:
        ez = math.exp(z)
        p_hope = ez / (1.0 + ez)
    return ProbDist(probs=(1.0 - p_hope, p_hope))


def predict(model: LinearModel, x: SparseVector) -> Label:
    return predict_proba(model, x).predicted_label()


@dataclass(frozen=True)
class TfidfLogisticScorer:
    """In-process Scorer pairing a fitted vectorizer with a trained model."""

    vectorizer: Vectorizer
    model: LinearModel

    def score_batch(self, docs: Sequence[Document]) -> list[ProbDist]:
        return [predict_proba(self.model, transform(self.vectorizer, d)) for d in docs]


def train_tfidf_scorer(
    labeled: Sequence[LabeledDocument],
    cfg: TrainConfig = TrainConfig(),
    max_tokens: int | None = None,
) -> TfidfLogisticScorer:
    """Fit vectorizer and model on a labeled set; the standard learner."""
    from . import features

    kwargs = {} if max_tokens is None else {"max_tokens": max_tokens}
    vectorizer = features.fit([item.doc for item in labeled], **kwargs)
    X = [transform(vectorizer, item.doc) for item in labeled]
    y = [item.label for item in labeled]
    model = train(X, y, cfg)
    model = LinearModel(
        weights=model.weights,
        bias=model.bias,
        lam=model.lam,
        vectorizer_fingerprint=vectorizer.fingerprint(),
    )
    return TfidfLogisticScorer(vectorizer=vectorizer, model=model)
