"""Unigram TF-IDF feature space built from a training corpus.

Terms are indexed in first-appearance order, document frequency counts
documents (not occurrences), and idf uses the smoothed form
``ln((1 + n_docs) / (1 + df)) + 1`` so no weight is ever zero or
divides by zero.  Transformed vectors are L2-normalized unless empty.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus, Document

DEFAULT_MAX_TOKENS = 128


def tokenize(text: str, max_tokens: int = DEFAULT_MAX_TOKENS) -> list[str]:
    """Whitespace-split an already-normalized text, keeping at most
    ``max_tokens`` leading tokens."""
    return text.split()[:max_tokens]


@dataclass(frozen=True)
class Vocabulary:
    term_to_index: dict
    df: tuple  # document frequency per index; empty if not known (loaded models)
    n_docs_fitted: int

    def __len__(self) -> int:
        return len(self.term_to_index)


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, weight) pairs with no explicit zeros."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def dot(self, dense: np.ndarray) -> float:
        return float(np.dot(dense[self.indices], self.values))

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))


def sparse_vector(pairs: Iterable[tuple[int, float]], dim: int) -> SparseVector:
    """Build a SparseVector from (index, weight) pairs, dropping zeros."""
    kept = sorted((i, w) for i, w in pairs if w != 0.0)
    if kept and kept[-1][0] >= dim:
        raise ValueError(f"index {kept[-1][0]} out of range for dimension {dim}")
    indices = np.fromiter((i for i, _ in kept), dtype=np.int64, count=len(kept))
    values = np.fromiter((w for _, w in kept), dtype=np.float64, count=len(kept))
    return SparseVector(indices=indices, values=values, dim=dim)


@dataclass(frozen=True)
class Vectorizer:
    vocab: Vocabulary
    idf: np.ndarray
    max_tokens: int = DEFAULT_MAX_TOKENS

    @property
    def dim(self) -> int:
        return len(self.vocab)

    def to_json(self) -> str:
        terms = [""] * len(self.vocab)
        for term, idx in self.vocab.term_to_index.items():
            terms[idx] = term
        payload = {
            "terms": terms,
            "idf": self.idf.tolist(),
            "n_docs": self.vocab.n_docs_fitted,
            "max_tokens": self.max_tokens,
        }
        return json.dumps(payload, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Vectorizer":
        payload = json.loads(text)
        vocab = Vocabulary(
            term_to_index={t: i for i, t in enumerate(payload["terms"])},
            df=(),
            n_docs_fitted=payload["n_docs"],
        )
        return cls(
            vocab=vocab,
            idf=np.asarray(payload["idf"], dtype=np.float64),
            max_tokens=payload["max_tokens"],
        )

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


def fit(
    train: Corpus | Sequence[Document],
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> Vectorizer:
    """Build the TF-IDF vector space from training documents.

    The vocabulary holds exactly the distinct unigrams of the tokenized
    (truncated) training texts, indexed in first-appearance order.

    Raises:
        ValueError: empty corpus, or no document yields any token.
    """
    docs = train.documents() if isinstance(train, Corpus) else list(train)
    if not docs:
        raise ValueError("cannot fit a vectorizer on an empty corpus")

    term_to_index: dict[str, int] = {}
    df_counts: list[int] = []
    n_docs = 0
    any_tokens = False
    for doc in docs:
        n_docs += 1
        tokens = tokenize(doc.text, max_tokens)
        if tokens:
            any_tokens = True
        seen: set[int] = set()
        for term in tokens:
            idx = term_to_index.get(term)
            if idx is None:
                idx = len(df_counts)
                term_to_index[term] = idx
                df_counts.append(0)
            if idx not in seen:
                df_counts[idx] += 1
                seen.add(idx)
    if not any_tokens:
        raise ValueError("every document tokenized to empty; nothing to fit")

    idf = np.array(
        [math.log((1 + n_docs) / (1 + d)) + 1.0 for d in df_counts],
        dtype=np.float64,
    )
    vocab = Vocabulary(
        term_to_index=term_to_index, df=tuple(df_counts), n_docs_fitted=n_docs
    )
    return Vectorizer(vocab=vocab, idf=idf, max_tokens=max_tokens)


def transform(vectorizer: Vectorizer, doc: Document) -> SparseVector:
    """Embed one document: raw term counts times idf, L2-normalized.

    Out-of-vocabulary tokens are dropped; a fully OOV document maps to
    the zero vector of the right dimension.
    """
    counts: dict[int, int] = {}
    lookup = vectorizer.vocab.term_to_index
    for term in tokenize(doc.text, vectorizer.max_tokens):
        idx = lookup.get(term)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1

    if not counts:
        return sparse_vector((), vectorizer.dim)
    vec = sparse_vector(
        ((idx, n * vectorizer.idf[idx]) for idx, n in counts.items()),
        vectorizer.dim,
    )
    norm = vec.norm()
    return SparseVector(indices=vec.indices, values=vec.values / norm, dim=vec.dim)


def transform_batch(vectorizer: Vectorizer, docs: Iterable[Document]) -> list[SparseVector]:
    return [transform(vectorizer, d) for d in docs]
