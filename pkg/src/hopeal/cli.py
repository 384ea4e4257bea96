"""Command-line entry point.

Subcommands: ``stats`` (label distribution of a CSV), ``al-run`` (the
active-learning loop), ``predict`` (label a test CSV with a saved
model), ``cv`` (stratified k-fold evaluation).  Exit codes: 0 success,
2 input or configuration error, 3 external-scorer failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import shlex
import sys
from pathlib import Path

from . import active_learning as al
from . import evaluation
from .classifier import LinearModel, TrainConfig, predict, train_tfidf_scorer
from .corpus import CorpusError, CsvSchema, Split, corpus_stats, load_corpus
from .features import DEFAULT_MAX_TOKENS, Vectorizer, transform
from .scorer_protocol import ExternalScorer, ProtocolError, spawn_scorer

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SCORER = 3


def _add_schema_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--text-col", default=None, help="text column (default: text)")
    parser.add_argument("--label-col", default=None, help="label column (default: label)")
    parser.add_argument("--id-col", default=None, help="id column (default: synthesized row index)")
    parser.add_argument(
        "--no-header",
        action="store_true",
        help="file has no header row; address columns by position",
    )
    parser.add_argument("--language", default=None, help="language tag for reports")


def _col(value, no_header: bool):
    if value is None:
        return None
    if no_header:
        try:
            return int(value)
        except ValueError:
            raise CorpusError(
                f"--no-header requires positional column indices, got {value!r}"
            ) from None
    return value


def _schema(args, cfg) -> CsvSchema:
    no_header = bool(args.no_header or cfg.get("no_header", False))
    text_col = args.text_col if args.text_col is not None else cfg.get("text_col", "text")
    label_col = args.label_col if args.label_col is not None else cfg.get("label_col", "label")
    id_col = args.id_col if args.id_col is not None else cfg.get("id_col")
    return CsvSchema(
        text_col=_col(text_col, no_header) if no_header else text_col,
        label_col=_col(label_col, no_header) if no_header else label_col,
        id_col=_col(id_col, no_header) if no_header else id_col,
        has_header=not no_header,
    )


def _load_config(args) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _get(args, cfg, key, default):
    """Flag value if given, else config-file value, else the default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    return cfg.get(key, default)


def cmd_stats(args) -> int:
    cfg = _load_config(args)
    split = Split(_get(args, cfg, "split", "train"))
    corpus = load_corpus(
        args.input,
        schema=_schema(args, cfg),
        split=split,
        language=_get(args, cfg, "language", "other"),
        require_labels=True if args.labeled else None,
    )
    print(corpus_stats(corpus).to_json())
    return EXIT_OK


def _make_train_config(args, cfg) -> TrainConfig:
    return TrainConfig(
        lam=float(_get(args, cfg, "lam", 1.0)),
        max_iters=int(_get(args, cfg, "max_iters", 500)),
        grad_tol=float(_get(args, cfg, "grad_tol", 1e-6)),
    )


def cmd_al_run(args) -> int:
    cfg = _load_config(args)
    schema = _schema(args, cfg)
    language = _get(args, cfg, "language", "other")
    train_corpus = load_corpus(args.train, schema=schema, split=Split.TRAIN, language=language)
    dev_corpus = load_corpus(args.dev, schema=schema, split=Split.DEV, language=language)

    al_cfg = al.ALConfig(
        batch_k=int(_get(args, cfg, "batch_k", 20)),
        max_rounds=int(_get(args, cfg, "max_rounds", 5)),
        min_rounds=int(_get(args, cfg, "min_rounds", 3)),
        plateau_delta=float(_get(args, cfg, "plateau_delta", 0.002)),
        seed_fraction=float(_get(args, cfg, "seed_frac", 0.10)),
        strategy=al.Strategy(_get(args, cfg, "strategy", "entropy")),
        rng_seed=int(_get(args, cfg, "rng_seed", 0)),
    )
    train_cfg = _make_train_config(args, cfg)
    max_tokens = int(_get(args, cfg, "max_tokens", DEFAULT_MAX_TOKENS))
    model_choice = _get(args, cfg, "model", "lr")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    oracle = al.OracleHandle.from_labeled(list(train_corpus.docs))
    session = None
    try:
        if model_choice == "lr":
            def factory(labeled):
                return train_tfidf_scorer(labeled, train_cfg, max_tokens=max_tokens)
        elif model_choice.startswith("external:"):
            command = shlex.split(model_choice[len("external:"):])
            session = spawn_scorer(command, timeout=float(_get(args, cfg, "scorer_timeout", 60.0)))
            external = ExternalScorer(session)

            def factory(labeled):
                # External models own their training; the loop only queries.
                return external
        else:
            raise CorpusError(f"unknown model choice: {model_choice!r}")

        scorer, state = al.run_loop(train_corpus, factory, oracle, al_cfg)
        al.write_history(state.history, out_dir / "history.jsonl")

        gold = [item.label for item in dev_corpus.docs]
        dists = scorer.score_batch([item.doc for item in dev_corpus.docs])
        report = evaluation.metrics(
            evaluation.confusion(gold, [d.predicted_label() for d in dists])
        )
        (out_dir / "metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")

        if model_choice == "lr":
            (out_dir / "vectorizer.json").write_text(
                scorer.vectorizer.to_json() + "\n", encoding="utf-8"
            )
            (out_dir / "model.json").write_text(
                scorer.model.to_json() + "\n", encoding="utf-8"
            )
    finally:
        if session is not None:
            session.close()
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = _load_config(args)
    vectorizer = Vectorizer.from_json(Path(args.vectorizer).read_text(encoding="utf-8"))
    model = LinearModel.from_json(Path(args.model).read_text(encoding="utf-8"))
    if model.vectorizer_fingerprint != vectorizer.fingerprint():
        raise CorpusError("model was trained against a different vectorizer (fingerprint mismatch)")

    schema = _schema(args, cfg)
    corpus = load_corpus(args.input, schema=schema, split=Split.TEST)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"])
        for doc in corpus.documents():
            writer.writerow([doc.id, predict(model, transform(vectorizer, doc)).text])
    return EXIT_OK


def cmd_cv(args) -> int:
    cfg = _load_config(args)
    language = _get(args, cfg, "language", "other")
    corpus = load_corpus(
        args.input, schema=_schema(args, cfg), split=Split.TRAIN, language=language
    )
    k = int(_get(args, cfg, "k", 5))
    rng_seed = int(_get(args, cfg, "rng_seed", 0))
    train_cfg = _make_train_config(args, cfg)
    max_tokens = int(_get(args, cfg, "max_tokens", DEFAULT_MAX_TOKENS))

    split = evaluation.stratified_kfold(corpus, k=k, rng_seed=rng_seed)
    by_id = {item.id: item for item in corpus.docs}

    rows = []
    for fold in range(k):
        train_items = [by_id[i] for i in split.train_ids(fold)]
        eval_items = [by_id[i] for i in split.folds[fold]]
        scorer = train_tfidf_scorer(train_items, train_cfg, max_tokens=max_tokens)
        dists = scorer.score_batch([item.doc for item in eval_items])
        report = evaluation.metrics(
            evaluation.confusion(
                [item.label for item in eval_items],
                [d.predicted_label() for d in dists],
            )
        )
        # Full precision so the mean row is exactly the arithmetic mean.
        rows.append(
            report.to_csv_row("lr", language, f"fold{fold + 1}", ndigits=None)
        )

    mean_row = {"model": "lr", "language": language, "split": "mean"}
    for key in evaluation.CSV_FIELDS[3:]:
        mean_row[key] = sum(row[key] for row in rows) / len(rows)
    rows.append(mean_row)

    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=evaluation.CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopeal",
        description="Hope-speech classification with pool-based active learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="label distribution and mean lengths of a CSV")
    p_stats.add_argument("--input", required=True)
    p_stats.add_argument("--split", choices=["train", "dev", "test"], default=None)
    p_stats.add_argument("--labeled", action="store_true", help="require labels even for test splits")
    p_stats.add_argument("--config", default=None)
    _add_schema_flags(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    p_al = sub.add_parser("al-run", help="run the active-learning loop")
    p_al.add_argument("--train", required=True)
    p_al.add_argument("--dev", required=True)
    p_al.add_argument("--out-dir", required=True)
    p_al.add_argument("--model", default=None, help='"lr" or "external:<command>"')
    p_al.add_argument("--batch-k", type=int, default=None)
    p_al.add_argument("--max-rounds", type=int, default=None)
    p_al.add_argument("--min-rounds", type=int, default=None)
    p_al.add_argument("--plateau-delta", type=float, default=None)
    p_al.add_argument("--seed-frac", type=float, default=None)
    p_al.add_argument("--strategy", choices=["entropy", "random", "margin"], default=None)
    p_al.add_argument("--rng-seed", type=int, default=None)
    p_al.add_argument("--lambda", dest="lam", type=float, default=None)
    p_al.add_argument("--max-iters", type=int, default=None)
    p_al.add_argument("--grad-tol", type=float, default=None)
    p_al.add_argument("--max-tokens", type=int, default=None)
    p_al.add_argument("--scorer-timeout", type=float, default=None)
    p_al.add_argument("--config", default=None)
    _add_schema_flags(p_al)
    p_al.set_defaults(func=cmd_al_run)

    p_pred = sub.add_parser("predict", help="label a test CSV with a saved model")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--vectorizer", required=True)
    p_pred.add_argument("--input", required=True)
    p_pred.add_argument("--output", required=True)
    p_pred.add_argument("--config", default=None)
    _add_schema_flags(p_pred)
    p_pred.set_defaults(func=cmd_predict)

    p_cv = sub.add_parser("cv", help="stratified k-fold cross-validation")
    p_cv.add_argument("--input", required=True)
    p_cv.add_argument("--k", type=int, default=None)
    p_cv.add_argument("--rng-seed", type=int, default=None)
    p_cv.add_argument("--lambda", dest="lam", type=float, default=None)
    p_cv.add_argument("--max-iters", type=int, default=None)
    p_cv.add_argument("--grad-tol", type=float, default=None)
    p_cv.add_argument("--max-tokens", type=int, default=None)
    p_cv.add_argument("--output", default=None)
    p_cv.add_argument("--config", default=None)
    _add_schema_flags(p_cv)
    p_cv.set_defaults(func=cmd_cv)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProtocolError as exc:
        print(f"hopeal: scorer error: {exc}", file=sys.stderr)
        return EXIT_SCORER
    except (ValueError, OSError) as exc:
        print(f"hopeal: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
