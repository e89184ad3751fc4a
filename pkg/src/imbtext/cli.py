"""Command-line interface: prep, vocab, augment, balance, train, eval, grid, synth."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .augment import AugmentConfig, SynonymLexicon, augment_all, expand_minority
from .data import DEFAULT_SCHEMA, fit_label_codec, load_dataset, save_dataset
from .experiment import RESULT_HEADER, load_specs, run_config, run_grid
from .metrics import confusion, scores
from .model import load_checkpoint, predict
from .oversample import make_plan, plan_report
from .preprocess import IqrConfig, TextCleaner, iqr_bounds, iqr_filter, record_word_count
from .seeding import derive_seed
from .synth import gen_synthetic, gen_synthetic_lexicon
from .wordpiece import encode, load_vocab, train_vocab


def _schema_from(args) -> dict[str, str]:
    return {
        "id": args.col_id,
        "title": args.col_title,
        "body": args.col_body,
        "label": args.col_label,
    }


def _add_schema_flags(parser):
    parser.add_argument("--col-id", default=DEFAULT_SCHEMA["id"], help="id column name")
    parser.add_argument("--col-title", default=DEFAULT_SCHEMA["title"], help="title column name")
    parser.add_argument("--col-body", default=DEFAULT_SCHEMA["body"], help="body text column name")
    parser.add_argument("--col-label", default=DEFAULT_SCHEMA["label"], help="label column name")
    parser.add_argument("--delimiter", default=",", help="field delimiter (default comma)")


def _common_flags(parser):
    parser.add_argument("--seed", type=int, default=0, help="top-level random seed")
    parser.add_argument("--out-dir", default="runs", help="directory for run artifacts")
    parser.add_argument("--config", default=None, help="experiment config file (YAML)")


def cmd_synth(args) -> int:
    counts = [int(c) for c in args.counts.split(",")]
    data = gen_synthetic(
        num_classes=len(counts),
        counts=counts,
        vocab_per_class=args.vocab_per_class,
        noise=args.noise,
        seed=args.seed,
    )
    save_dataset(data, args.out)
    print(f"wrote {len(data)} records to {args.out} ({data.class_counts})")
    if args.lexicon_out:
        lex = gen_synthetic_lexicon(len(counts), args.vocab_per_class, args.seed)
        lex.save(args.lexicon_out)
        print(f"wrote {len(lex)}-word lexicon to {args.lexicon_out}")
    return 0


def cmd_prep(args) -> int:
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    cleaner = TextCleaner(
        stopwords=args.stopwords,
        remove_numeric=not args.keep_numeric,
        lowercase=not args.keep_case,
        lemmatize=not args.no_lemmatize,
    )
    cleaned = cleaner.transform_dataset(data)
    lengths = [record_word_count(rec) for rec in cleaned]
    lo, hi = iqr_bounds(lengths, args.iqr_multiplier)
    filtered = iqr_filter(cleaned, IqrConfig(multiplier=args.iqr_multiplier)) if args.apply_iqr else cleaned
    print(f"records: {len(cleaned)}")
    print(f"word-count fence: [{lo:.2f}, {hi:.2f}] (multiplier {args.iqr_multiplier})")
    outside = sum(1 for c in lengths if not lo <= c <= hi)
    print(f"outside fence: {outside}" + ("" if args.apply_iqr else " (not dropped; use --apply-iqr)"))
    if args.out:
        save_dataset(filtered, args.out, _schema_from(args), delimiter=args.delimiter)
        print(f"wrote {len(filtered)} records to {args.out}")
    return 0


def cmd_vocab(args) -> int:
    if args.vocab:
        vocab = load_vocab(args.vocab)
        print(f"loaded {len(vocab)} tokens from {args.vocab}")
        return 0
    if not args.data:
        raise SystemExit("vocab requires --data to train or --vocab to validate")
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    corpus = [f"{rec.title} {rec.body}".strip() for rec in data]
    vocab = train_vocab(corpus, args.target_size)
    vocab.save(args.out)
    print(f"trained {len(vocab)}-token vocabulary -> {args.out}")
    return 0


def cmd_augment(args) -> int:
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    lex = SynonymLexicon.from_file(args.lexicon) if args.lexicon else SynonymLexicon.empty()
    cfg = AugmentConfig(
        op_probability=args.op_probability,
        deletion_p=args.deletion_p,
        seed=derive_seed(args.seed, "eda"),
    )
    if args.augment_all:
        out = augment_all(data, cfg, lex)
    else:
        out = expand_minority(data, args.rate, cfg, lex)
    save_dataset(out, args.out, _schema_from(args), delimiter=args.delimiter)
    print(f"{len(data)} -> {len(out)} records; class counts {out.class_counts}")
    return 0


def cmd_balance(args) -> int:
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    codec = fit_label_codec(data)
    counts = {codec.encode(label): count for label, count in data.class_counts.items()}
    plan = make_plan(counts, args.rate)
    report = plan_report(plan, counts, class_names=list(codec.classes_))
    print(report)
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="utf-8")
    return 0


def cmd_train(args) -> int:
    if not args.config:
        raise SystemExit("train requires --config with a single experiment spec")
    specs = load_specs(args.config)
    if len(specs) != 1:
        raise SystemExit(f"train expects exactly one spec, found {len(specs)} in {args.config}")
    spec = specs[0]
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    lexicon = SynonymLexicon.from_file(args.lexicon) if args.lexicon else None
    row = run_config(spec, data, out_dir=args.out_dir, lexicon=lexicon, overwrite=args.overwrite)
    print(RESULT_HEADER)
    print(row.as_csv())
    return 0


def cmd_eval(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    vocab = load_vocab(args.vocab)
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    cleaner = TextCleaner()
    cleaned = cleaner.transform_dataset(data)
    index = {name: i for i, name in enumerate(ckpt.classes)}
    seqs = []
    for rec in cleaned:
        if rec.label not in index:
            raise SystemExit(f"record {rec.id!r} has label {rec.label!r} unknown to the checkpoint")
        seqs.append(
            encode(
                f"{rec.title} {rec.body}".strip(), vocab, args.capacity,
                label_id=index[rec.label], uid=rec.id,
            )
        )
    preds, _ = predict(ckpt, seqs)
    matrix = confusion(preds, [s.label_id for s in seqs], len(ckpt.classes))
    report = scores(matrix)
    print("accuracy,f1_macro,f1_weighted")
    print(f"{report.accuracy:.6f},{report.f1_macro:.6f},{report.f1_weighted:.6f}")
    return 0


def cmd_grid(args) -> int:
    if not args.config:
        raise SystemExit("grid requires --config with an experiment grid file")
    specs = load_specs(args.config)
    data = load_dataset(args.data, _schema_from(args), delimiter=args.delimiter)
    seeds = [int(s) for s in args.seeds.split(",")]
    lexicon = SynonymLexicon.from_file(args.lexicon) if args.lexicon else None
    rows = run_grid(
        specs, data, seeds, out_dir=args.out_dir, lexicon=lexicon, overwrite=args.overwrite
    )
    print(RESULT_HEADER)
    for row in rows:
        print(row.as_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imbtext",
        description="Class-imbalance toolkit for short-text classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic imbalanced corpus")
    _common_flags(p)
    p.add_argument("--out", required=True, help="output dataset file")
    p.add_argument("--counts", default="100,10,10,5,5", help="comma-separated class sizes")
    p.add_argument("--vocab-per-class", type=int, default=30)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--lexicon-out", default=None, help="also write the matching synonym lexicon")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("prep", help="clean text and report the IQR length fence")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None, help="write the cleaned (and filtered) dataset here")
    p.add_argument("--stopwords", default=None, help="stopword file (default: bundled list)")
    p.add_argument("--keep-numeric", action="store_true")
    p.add_argument("--keep-case", action="store_true")
    p.add_argument("--no-lemmatize", action="store_true")
    p.add_argument("--apply-iqr", action="store_true", help="drop records outside the fence")
    p.add_argument("--iqr-multiplier", type=float, default=1.5)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("vocab", help="train or validate a subword vocabulary")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--data", default=None, help="cleaned dataset to train on")
    p.add_argument("--vocab", default=None, help="existing vocabulary to validate")
    p.add_argument("--target-size", type=int, default=8000)
    p.add_argument("--out", default="vocab.txt")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("augment", help="EDA minority expansion (or --augment-all)")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=float, default=0.2, help="upsample-to-rate*max target")
    p.add_argument("--lexicon", default=None, help="synonym lexicon file")
    p.add_argument("--op-probability", type=float, default=0.5)
    p.add_argument("--deletion-p", type=float, default=0.1)
    p.add_argument("--augment-all", action="store_true",
                   help="append one EDA variant of every record instead of targeting minorities")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("balance", help="print the oversampling plan for a dataset")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--rate", type=float, default=0.1)
    p.add_argument("--out", default=None, help="also write the report here")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("train", help="run one experiment spec end to end")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a saved checkpoint on a dataset")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--capacity", type=int, default=64)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="run a grid of experiment specs across seeds")
    _common_flags(p)
    _add_schema_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--seeds", default="0", help="comma-separated seed list")
    p.add_argument("--lexicon", default=None)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_grid)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
