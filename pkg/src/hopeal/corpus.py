"""Corpus ingestion, normalization and summary statistics.

Datasets arrive as CSV files (UTF-8, comma separated, double-quote quoting)
with a text column, an optional id column and, for labeled splits, a label
column holding "Hope" / "Not Hope" in any casing.
"""

from __future__ import annotations

import csv
import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence


class CorpusError(ValueError):
    """Raised for malformed input files or schema violations."""


class Label(Enum):
    NOT_HOPE = 0
    HOPE = 1

    @property
    def numeric(self) -> int:
        return self.value

    @property
    def text(self) -> str:
        return "Hope" if self is Label.HOPE else "Not Hope"

    @classmethod
    def parse(cls, raw: str) -> "Label":
        """Parse a CSV label cell, case-insensitively after trimming."""
        folded = raw.strip().lower()
        if folded == "hope":
            return cls.HOPE
        if folded == "not hope":
            return cls.NOT_HOPE
        raise CorpusError(f"unrecognized label string: {raw!r}")


class Split(Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"

    @property
    def labeled(self) -> bool:
        return self is not Split.TEST


# URL removal happens before lowercasing, so match prefixes in any case.
# \S* extends the match up to (not including) the next whitespace.
_URL_RE = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)


@lru_cache(maxsize=None)
def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize(raw: str) -> str:
    """Normalize raw text for the classical feature pipeline.

    Applies, in order: URL removal (maximal substrings starting with
    ``http://``, ``https://`` or ``www.`` up to the next whitespace),
    Unicode lowercasing, removal of all punctuation (Unicode general
    category ``P*``), and whitespace collapse.  Idempotent: a normalized
    string passes through unchanged.
    """
    text = _URL_RE.sub("", raw)
    text = text.lower()
    text = "".join(ch for ch in text if not _is_punct(ch))
    return " ".join(text.split())


@dataclass(frozen=True)
class Document:
    """One text unit; ``text`` is always ``normalize(raw_text)``."""

    id: str
    raw_text: str
    text: str = field(default="")

    def __post_init__(self):
        if not self.text:
            object.__setattr__(self, "text", normalize(self.raw_text))


@dataclass(frozen=True)
class LabeledDocument:
    doc: Document
    label: Label

    @property
    def id(self) -> str:
        return self.doc.id


@dataclass(frozen=True)
class CsvSchema:
    """Column configuration for corpus CSV files.

    Columns are addressed by header name when ``has_header`` is true,
    otherwise by zero-based position.  ``id_col=None`` synthesizes ids
    as decimal row indices; ``label_col=None`` loads an unlabeled corpus.
    """

    text_col: str | int = "text"
    label_col: str | int | None = "label"
    id_col: str | int | None = None
    has_header: bool = True


@dataclass(frozen=True)
class Corpus:
    name: str
    language: str
    split: Split
    docs: tuple = ()

    def __len__(self) -> int:
        return len(self.docs)

    @property
    def labeled(self) -> bool:
        return all(isinstance(d, LabeledDocument) for d in self.docs)

    def documents(self) -> list[Document]:
        """The plain documents, stripped of any labels."""
        return [d.doc if isinstance(d, LabeledDocument) else d for d in self.docs]


@dataclass(frozen=True)
class CorpusStats:
    total: int
    per_class: dict
    mean_words_per_class: dict

    def to_json(self) -> str:
        payload = {
            "total": self.total,
            "per_class": {lbl.text: n for lbl, n in self.per_class.items()},
            "mean_words_per_class": {
                lbl.text: m for lbl, m in self.mean_words_per_class.items()
            },
        }
        return json.dumps(payload, sort_keys=True)


def _cell(row: Sequence[str], col: str | int, header: dict | None, row_no: int):
    if isinstance(col, int):
        if col >= len(row):
            raise CorpusError(f"row {row_no}: missing column index {col}")
        return row[col]
    if header is None:
        raise CorpusError(f"column {col!r} addressed by name but file has no header")
    if col not in header:
        raise CorpusError(f"missing configured column {col!r}")
    idx = header[col]
    if idx >= len(row):
        raise CorpusError(f"row {row_no}: missing column {col!r}")
    return row[idx]


def load_corpus(
    path: str | Path,
    schema: CsvSchema = CsvSchema(),
    split: Split = Split.TRAIN,
    name: str | None = None,
    language: str = "other",
    require_labels: bool | None = None,
) -> Corpus:
    """Load a corpus from a CSV file.

    Args:
        path: CSV file location.
        schema: column configuration (see :class:`CsvSchema`).
        split: which split the file represents; train and dev require labels.
        name: corpus name, defaults to the file stem.
        language: language tag ("english", "urdu", ...).
        require_labels: override the split's labeling requirement.

    Returns:
        A :class:`Corpus` preserving file row order, with every document
        normalized and every label parsed.

    Raises:
        CorpusError: missing file or column, duplicate id, unlabeled row in
            a labeled split, or an unrecognized label (named with its row).
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"no such file: {path}")
    if require_labels is None:
        require_labels = split.labeled

    docs = []
    seen_ids = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        if schema.has_header:
            try:
                header_row = next(reader)
            except StopIteration:
                header_row = []
            header = {h: i for i, h in enumerate(header_row)}
            # Fail fast on misconfigured columns rather than per row.
            for col in (schema.text_col, schema.label_col, schema.id_col):
                if isinstance(col, str) and col not in header:
                    if col is schema.label_col and not require_labels:
                        continue
                    raise CorpusError(f"missing configured column {col!r}")

        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            raw_text = _cell(row, schema.text_col, header, row_no)
            if schema.id_col is not None:
                doc_id = _cell(row, schema.id_col, header, row_no)
            else:
                doc_id = str(row_no - 1)
            if doc_id in seen_ids:
                raise CorpusError(f"row {row_no}: duplicate id {doc_id!r}")
            seen_ids.add(doc_id)
            doc = Document(id=doc_id, raw_text=raw_text)

            label_raw = None
            if schema.label_col is not None:
                if isinstance(schema.label_col, int) or (
                    header and schema.label_col in header
                ):
                    label_raw = _cell(row, schema.label_col, header, row_no)
            if label_raw is not None and label_raw.strip():
                try:
                    docs.append(LabeledDocument(doc, Label.parse(label_raw)))
                except CorpusError:
                    raise CorpusError(
                        f"row {row_no}: unrecognized label {label_raw!r}"
                    ) from None
            elif require_labels:
                raise CorpusError(f"row {row_no}: unlabeled row in a labeled split")
            else:
                docs.append(doc)

    return Corpus(
        name=name if name is not None else path.stem,
        language=language,
        split=split,
        docs=tuple(docs),
    )


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to CSV (id, text, label).

    Raw text is written, so save/load round-trips preserve ids, raw_text
    and labels exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        labeled = corpus.labeled and len(corpus) > 0
        writer.writerow(["id", "text", "label"] if labeled else ["id", "text"])
        for item in corpus.docs:
            if isinstance(item, LabeledDocument):
                writer.writerow([item.doc.id, item.doc.raw_text, item.label.text])
            else:
                writer.writerow([item.id, item.raw_text])


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Per-class counts and mean whitespace-token counts.

    Empty corpora yield zero-total stats with no per-class means.
    """
    if len(corpus) > 0 and not corpus.labeled:
        raise CorpusError("corpus_stats requires a fully labeled corpus")

    counts = {Label.NOT_HOPE: 0, Label.HOPE: 0}
    word_totals = {Label.NOT_HOPE: 0, Label.HOPE: 0}
    for item in corpus.docs:
        counts[item.label] += 1
        word_totals[item.label] += len(item.doc.text.split())

    means = {
        lbl: word_totals[lbl] / counts[lbl] for lbl in counts if counts[lbl] > 0
    }
    return CorpusStats(
        total=len(corpus), per_class=counts, mean_words_per_class=means
    )


def labeled_documents(source: Corpus | Iterable) -> list[LabeledDocument]:
    """Coerce a labeled corpus (or iterable) to a list of LabeledDocuments."""
    items = source.docs if isinstance(source, Corpus) else source
    out = []
    for item in items:
        if not isinstance(item, LabeledDocument):
            raise CorpusError(f"document {getattr(item, 'id', item)!r} has no label")
        out.append(item)
    return out
