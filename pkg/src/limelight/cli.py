"""Command-line interface: train, evaluate, explain, inspect-dict.

Exit codes are a stable scripting contract: 0 success, 2 missing or
invalid input, 3 degenerate instance (document empty after
preprocessing), 64 bad usage or unparseable config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import report
from .config import (
    AppConfig,
    parse_config_file,
    parse_float_list,
    parse_int_list,
    parse_str_list,
    resolve_config,
)
from .corpus import (
    CleanDocument,
    LabeledDataset,
    PreprocessConfig,
    build_vocabulary,
    filter_by_length,
    load_corpus,
    load_vocabulary,
    preprocess,
    save_vocabulary,
    split_dataset,
    strip_metadata,
)
from .errors import ConfigError, EmptyInstanceError, LimelightError
from .lime import ExplainConfig, explain, heuristic_num_features
from .mlp import (
    Metrics,
    SearchGrid,
    TrainConfig,
    evaluate,
    grid_search,
    load_model,
    save_model,
    train,
)

CONFIG_ENV_VAR = "LIMELIGHT_CONFIG"

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 64 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common_flags(parser):
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--corpus-root", dest="corpus_root")
    parser.add_argument(
        "--categories", dest="categories", type=parse_str_list,
        help="comma-separated category directory names",
    )
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--seed", dest="seed", type=int)
    parser.add_argument("--min-token-len", dest="min_token_len", type=int)
    parser.add_argument("--min-df", dest="min_df", type=int)
    parser.add_argument("--max-df-frac", dest="max_df_frac", type=float)
    parser.add_argument("--min-tokens", dest="min_tokens", type=int)
    parser.add_argument(
        "--max-tokens", dest="max_tokens", type=int,
        help="maximum document length; 0 means unbounded",
    )


def _add_model_path_flags(parser):
    parser.add_argument("--model-path", help="defaults to <output-dir>/model.txt")
    parser.add_argument("--vocab-path", help="defaults to <output-dir>/vocabulary.tsv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="limelight",
        description="Train a small text classifier and explain its predictions word by word.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a classifier and write model artifacts")
    _add_common_flags(p_train)
    p_train.add_argument("--train-frac", dest="train_frac", type=float)
    p_train.add_argument("--learning-rate", dest="learning_rate", type=float)
    p_train.add_argument("--batch-size", dest="batch_size", type=int)
    p_train.add_argument("--epochs", dest="epochs", type=int)
    p_train.add_argument("--hidden-dim", dest="hidden_dim", type=int)
    p_train.add_argument(
        "--grid", dest="use_grid", action="store_const", const=True, default=None,
        help="pick the training config by grid search instead of the single config",
    )
    p_train.add_argument("--grid-lr", dest="grid_learning_rates", type=parse_float_list)
    p_train.add_argument("--grid-batch", dest="grid_batch_sizes", type=parse_int_list)
    p_train.add_argument("--grid-epochs", dest="grid_epochs", type=parse_int_list)
    p_train.add_argument("--grid-hidden", dest="grid_hidden_dims", type=parse_int_list)
    p_train.set_defaults(handler=cmd_train)

    p_eval = sub.add_parser("evaluate", help="compute metrics for a stored model")
    _add_common_flags(p_eval)
    _add_model_path_flags(p_eval)
    p_eval.add_argument("--split", choices=("train", "test"), default="test")
    p_eval.set_defaults(handler=cmd_evaluate)

    p_explain = sub.add_parser("explain", help="explain one document of a split")
    _add_common_flags(p_explain)
    _add_model_path_flags(p_explain)
    p_explain.add_argument("--split", choices=("train", "test"), default="test")
    p_explain.add_argument("--index", type=int, required=True)
    p_explain.add_argument("--class", dest="class_name", help="class to explain (default: predicted class)")
    p_explain.add_argument("--num-features", dest="num_features", type=int)
    p_explain.add_argument(
        "--auto-num-features", action="store_true",
        help="choose the feature count from the document size",
    )
    p_explain.add_argument("--num-samples", dest="num_samples", type=int)
    p_explain.add_argument("--kernel-width", dest="kernel_width", type=float)
    p_explain.add_argument("--alpha", dest="alpha", type=float)
    p_explain.add_argument(
        "--format", default="text",
        help="comma-separated subset of text,json,html (default: text)",
    )
    p_explain.set_defaults(handler=cmd_explain)

    p_dict = sub.add_parser("inspect-dict", help="show vocabulary size and top words")
    _add_common_flags(p_dict)
    _add_model_path_flags(p_dict)
    p_dict.add_argument("--top", type=int, default=10)
    p_dict.set_defaults(handler=cmd_inspect_dict)

    return parser


def _resolve_app_config(args) -> AppConfig:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    file_values = parse_config_file(config_path) if config_path else None
    cli_values = {k: v for k, v in vars(args).items() if k in AppConfig.__dataclass_fields__}
    return resolve_config(file_values, cli_values)


def _build_dataset(cfg: AppConfig) -> LabeledDataset:
    raw_docs = load_corpus(cfg.corpus_root, cfg.categories)
    pconf = PreprocessConfig(
        min_token_len=cfg.min_token_len,
        min_df=cfg.min_df,
        max_df_frac=cfg.max_df_frac,
        min_tokens=cfg.min_tokens,
        max_tokens=cfg.max_tokens if cfg.max_tokens > 0 else None,
    )
    categories = tuple(cfg.categories)
    label_of = {name: i for i, name in enumerate(categories)}
    clean = [
        CleanDocument(
            tokens=tuple(preprocess(strip_metadata(doc.text), pconf)),
            source_id=(doc.category, doc.id),
            label=label_of[doc.category],
        )
        for doc in raw_docs
    ]
    kept = filter_by_length(clean, pconf.min_tokens, pconf.max_tokens)
    return LabeledDataset(tuple(kept), categories, "all")


def _model_paths(cfg: AppConfig, args) -> tuple[Path, Path]:
    model_path = Path(getattr(args, "model_path", None) or Path(cfg.output_dir) / "model.txt")
    vocab_path = Path(getattr(args, "vocab_path", None) or Path(cfg.output_dir) / "vocabulary.tsv")
    return model_path, vocab_path


def _print_metrics(metrics: Metrics, heading: str) -> None:
    print(f"{heading}:")
    print(f"  accuracy         {report.fmt_decimal(metrics.accuracy)}")
    print(f"  macro precision  {report.fmt_decimal(metrics.macro_precision)}")
    print(f"  macro recall     {report.fmt_decimal(metrics.macro_recall)}")
    print(f"  macro f1         {report.fmt_decimal(metrics.macro_f1)}")


def _metrics_payload(metrics: Metrics, categories, split_tag: str) -> str:
    payload = {
        "split": split_tag,
        "size": int(metrics.confusion.sum()),
        "accuracy": metrics.accuracy,
        "macro_precision": metrics.macro_precision,
        "macro_recall": metrics.macro_recall,
        "macro_f1": metrics.macro_f1,
        "categories": list(categories),
        "confusion": metrics.confusion.tolist(),
    }
    return json.dumps(payload, indent=2) + "\n"


def cmd_train(cfg: AppConfig, args) -> int:
    dataset = _build_dataset(cfg)
    print(f"Documents after preprocessing and length filter: {len(dataset.documents)}")
    train_set, test_set = split_dataset(dataset, cfg.train_frac, cfg.seed)
    print(
        f"Split: train={len(train_set.documents)} test={len(test_set.documents)}"
        f" (train_frac={cfg.train_frac}, seed={cfg.seed})"
    )
    vocab = build_vocabulary(train_set.documents, cfg.min_df, cfg.max_df_frac)
    print(f"Vocabulary: {len(vocab)} words (min_df={cfg.min_df}, max_df_frac={cfg.max_df_frac})")

    if cfg.use_grid:
        grid = SearchGrid(
            learning_rates=cfg.grid_learning_rates,
            batch_sizes=cfg.grid_batch_sizes,
            epoch_counts=cfg.grid_epochs,
            hidden_dims=cfg.grid_hidden_dims,
        )
        print(f"Grid search over {len(grid)} configurations")
        train_config = grid_search(train_set, vocab, grid, cfg.seed)
        print(
            f"Best config: lr={train_config.learning_rate} batch={train_config.batch_size}"
            f" epochs={train_config.epochs} hidden={train_config.hidden_dim}"
        )
    else:
        train_config = TrainConfig(
            learning_rate=cfg.learning_rate,
            batch_size=cfg.batch_size,
            epochs=cfg.epochs,
            hidden_dim=cfg.hidden_dim,
            seed=cfg.seed,
        )

    model, losses = train(train_set, vocab, train_config)
    print(
        f"Trained {model.input_dim}-{model.hidden_dim}-{model.num_classes} model:"
        f" loss {report.fmt_decimal(losses[0])} -> {report.fmt_decimal(losses[-1])}"
        f" over {len(losses)} epochs"
    )
    metrics = evaluate(model, test_set, vocab)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / "model.txt"
    vocab_path = out_dir / "vocabulary.tsv"
    metrics_path = out_dir / "metrics.json"
    save_model(model, model_path, train_config)
    save_vocabulary(vocab, vocab_path)
    metrics_path.write_text(_metrics_payload(metrics, dataset.categories, "test"), encoding="utf-8")

    _print_metrics(metrics, "Test metrics")
    print(f"Wrote {model_path}, {vocab_path}, {metrics_path}")
    return EXIT_OK


def cmd_evaluate(cfg: AppConfig, args) -> int:
    model_path, vocab_path = _model_paths(cfg, args)
    model = load_model(model_path)
    vocab = load_vocabulary(vocab_path)
    dataset = _build_dataset(cfg)
    train_set, test_set = split_dataset(dataset, cfg.train_frac, cfg.seed)
    chosen = train_set if args.split == "train" else test_set
    metrics = evaluate(model, chosen, vocab)
    _print_metrics(metrics, f"Metrics on {args.split} split")
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / f"metrics_{args.split}.json"
    metrics_path.write_text(
        _metrics_payload(metrics, model.categories, args.split), encoding="utf-8"
    )
    print(f"Wrote {metrics_path}")
    return EXIT_OK


def cmd_explain(cfg: AppConfig, args) -> int:
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    unknown = [f for f in formats if f not in ("text", "json", "html")]
    if unknown or not formats:
        print(f"error: unknown format(s): {', '.join(unknown) or args.format!r}", file=sys.stderr)
        return EXIT_USAGE

    model_path, vocab_path = _model_paths(cfg, args)
    model = load_model(model_path)
    vocab = load_vocabulary(vocab_path)
    if args.class_name is not None and args.class_name not in model.categories:
        print(
            f"error: unknown class {args.class_name!r};"
            f" model classes are {', '.join(model.categories)}",
            file=sys.stderr,
        )
        return EXIT_INVALID_INPUT

    dataset = _build_dataset(cfg)
    train_set, test_set = split_dataset(dataset, cfg.train_frac, cfg.seed)
    chosen = train_set if args.split == "train" else test_set
    if not 0 <= args.index < len(chosen.documents):
        print(
            f"error: index {args.index} out of range for {args.split} split"
            f" of size {len(chosen.documents)}",
            file=sys.stderr,
        )
        return EXIT_INVALID_INPUT
    document = chosen.documents[args.index]
    if not document.tokens:
        print(
            f"error: document {args.split}#{args.index} is empty after preprocessing;"
            " nothing to explain",
            file=sys.stderr,
        )
        return EXIT_DEGENERATE

    num_features = cfg.num_features
    if args.auto_num_features:
        num_features = heuristic_num_features(len(set(document.tokens)))
    explain_config = ExplainConfig(
        num_samples=cfg.num_samples,
        kernel_width=cfg.kernel_width,
        alpha=cfg.alpha,
        num_features=num_features,
        seed=cfg.seed,
        class_to_explain=args.class_name,
    )
    explanation = explain(
        model, vocab, document, explain_config, document_ref=(args.split, args.index)
    )
    for warning in explanation.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    for fmt in formats:
        if fmt == "text":
            sys.stdout.write(report.to_text(explanation))
        elif fmt == "json":
            print(report.to_json(explanation))
        else:
            out_dir = Path(cfg.output_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            html_path = out_dir / f"explanation_{args.split}_{args.index}.html"
            html_path.write_text(
                report.to_html(explanation, document.tokens), encoding="utf-8"
            )
            print(f"Wrote {html_path}")
    return EXIT_OK


def cmd_inspect_dict(cfg: AppConfig, args) -> int:
    _, vocab_path = _model_paths(cfg, args)
    vocab = load_vocabulary(vocab_path)
    print(f"Vocabulary size: {len(vocab)}")
    shown = min(args.top, len(vocab))
    print(f"Top {shown} words by document frequency:")
    ranked = sorted(zip(vocab.words, vocab.doc_freq), key=lambda pair: (-pair[1], pair[0]))
    for word, count in ranked[:shown]:
        print(f"{word}  {count}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    try:
        cfg = _resolve_app_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(cfg, args)
    except EmptyInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (LimelightError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
