"""Fine-tune a sequence-classification checkpoint on a labeled CSV.

The CSV follows the corpus contract of the main toolkit: a text column
and a label column holding "Hope" / "Not Hope" (any casing).  Labels map
to class ids 0 = Not Hope, 1 = Hope.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .bridge import BridgeConfig, BridgeError, class_column_order

LABEL_IDS = {"not hope": 0, "hope": 1}


def read_labeled_csv(
    path: str | Path, text_col: str = "text", label_col: str = "label"
) -> tuple[list[str], list[int]]:
    texts, labels = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or text_col not in reader.fieldnames:
            raise BridgeError(f"missing column {text_col!r} in {path}")
        if label_col not in reader.fieldnames:
            raise BridgeError(f"missing column {label_col!r} in {path}")
        for row_no, row in enumerate(reader, start=1):
            label = row[label_col].strip().lower()
            if label not in LABEL_IDS:
                raise BridgeError(f"row {row_no}: unrecognized label {row[label_col]!r}")
            texts.append(row[text_col])
            labels.append(LABEL_IDS[label])
    if not texts:
        raise BridgeError(f"no rows in {path}; nothing to fine-tune on")
    return texts, labels


def _mean_loss(model, tokenizer, texts, labels, cfg, device) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for start in range(0, len(texts), cfg.batch_size):
            chunk = texts[start : start + cfg.batch_size]
            target = torch.tensor(labels[start : start + cfg.batch_size], device=device)
            encoded = tokenizer(
                chunk,
                truncation=True,
                padding=True,
                max_length=cfg.max_sequence_length,
                return_tensors="pt",
            ).to(device)
            loss = model(**encoded, labels=target).loss
            total += float(loss) * len(chunk)
            count += len(chunk)
    return total / count


def finetune(cfg: BridgeConfig, train_csv: str | Path, out_dir: str | Path,
             text_col: str = "text", label_col: str = "label") -> tuple[Path, list[float]]:
    """Train for ``cfg.epochs`` epochs and save the checkpoint.

    Returns the checkpoint path and the dataset mean losses: the value
    before training followed by one value per epoch.
    """
    texts, labels = read_labeled_csv(train_csv, text_col, label_col)

    torch.manual_seed(cfg.seed)
    device = torch.device(cfg.device)
    try:
        tokenizer = AutoTokenizer.from_pretrained(cfg.model)
        model = AutoModelForSequenceClassification.from_pretrained(cfg.model)
    except Exception as exc:
        raise BridgeError(f"could not load model {cfg.model!r}: {exc}") from exc
    # remap targets if the checkpoint indexes its labels differently
    not_hope_col, hope_col = class_column_order(model.config)
    targets = [hope_col if lbl == 1 else not_hope_col for lbl in labels]
    model.to(device)

    losses = [_mean_loss(model, tokenizer, texts, targets, cfg, device)]
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    generator = torch.Generator().manual_seed(cfg.seed)

    for _ in range(cfg.epochs):
        model.train()
        order = torch.randperm(len(texts), generator=generator).tolist()
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            encoded = tokenizer(
                [texts[i] for i in batch],
                truncation=True,
                padding=True,
                max_length=cfg.max_sequence_length,
                return_tensors="pt",
            ).to(device)
            target = torch.tensor([targets[i] for i in batch], device=device)
            optimizer.zero_grad()
            try:
                loss = model(**encoded, labels=target).loss
                loss.backward()
            except torch.cuda.OutOfMemoryError as exc:
                raise BridgeError(
                    f"device out of memory on a {len(batch)}-row batch: {exc}"
                ) from exc
            optimizer.step()
        losses.append(_mean_loss(model, tokenizer, texts, targets, cfg, device))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    (out_dir / "training_log.json").write_text(
        json.dumps({"losses": losses, "epochs": cfg.epochs,
                    "learning_rate": cfg.learning_rate,
                    "batch_size": cfg.batch_size}, indent=2)
        + "\n",
        encoding="utf-8",
    )
    return out_dir, losses
