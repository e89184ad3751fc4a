"""Config-driven end-to-end runs: stage pipeline, result rows, and the grid.

A run executes the fixed stage order clean -> split -> IQR filter (train
only) -> EDA expansion -> tokenize -> oversample -> train -> predict ->
score. Every stage draws its seed from (spec seed, stage name), so toggling
one technique never perturbs another's randomness.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import statistics
import time
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

import yaml

from .augment import AugmentConfig, SynonymLexicon, augment_all, expand_minority
from .data import Dataset, fit_label_codec, split
from .losses import FocalParams
from .metrics import confusion, scores
from .model import BackboneConfig, predict, save_checkpoint
from .oversample import apply_plan, make_plan, plan_report
from .preprocess import IqrConfig, TextCleaner, iqr_filter
from .seeding import derive_seed
from .training import LR_PROFILES, TrainConfig, train
from .wordpiece import encode, load_vocab, train_vocab

# backbone profiles; "wide" mirrors a swapped, larger encoder variant
BACKBONES = {
    "base": {"embedding_dim": 64, "hidden": (128,)},
    "small": {"embedding_dim": 32, "hidden": (64,)},
    "wide": {"embedding_dim": 96, "hidden": (128, 64)},
}


class StageError(RuntimeError):
    """Wraps a stage failure with the stage name attached."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[stage {stage}] {cause}")
        self.stage = stage
        self.__cause__ = cause


@dataclass(frozen=True)
class ExperimentSpec:
    """One grid cell: technique toggles, rates, and every stage's knobs."""

    name: str
    # augmentation / resampling
    use_eda: bool = False
    eda_rate: float = 0.2
    augment_all: bool = False
    use_oversampling: bool = False
    oversampling_rate: float = 0.1
    op_probability: float = 0.5
    deletion_p: float = 0.1
    augment_title: bool = False
    lexicon_file: str | None = None
    # loss
    loss: str = "cross_entropy"
    alpha: float = 1.0
    gamma: float = 2.0
    # backbone / training
    backbone: str = "base"
    lr_profile: str = "desk"
    peak_lr: float | None = None
    dropout_rate: float = 0.0
    epochs: int = 20
    batch_size: int = 32
    warmup_fraction: float = 0.10
    weight_decay: float = 0.01
    # cleaning / filtering
    stopword_file: str | None = None
    remove_numeric: bool = True
    lowercase: bool = True
    lemmatize: bool = True
    apply_iqr: bool = True
    iqr_multiplier: float = 1.5
    # tokenizer
    vocab_file: str | None = None
    vocab_size: int = 8000
    capacity: int = 64
    # split
    test_fraction: float = 0.2
    val_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.name:
            raise ValueError("spec name must be non-empty")
        if self.use_eda and not 0.0 < self.eda_rate <= 1.0:
            raise ValueError(f"eda_rate must be in (0, 1], got {self.eda_rate}")
        if self.use_oversampling and not 0.0 < self.oversampling_rate <= 1.0:
            raise ValueError(f"oversampling_rate must be in (0, 1], got {self.oversampling_rate}")
        if self.backbone not in BACKBONES:
            raise ValueError(f"backbone must be one of {sorted(BACKBONES)}, got {self.backbone!r}")
        if self.lr_profile not in LR_PROFILES:
            raise ValueError(f"lr_profile must be one of {sorted(LR_PROFILES)}, got {self.lr_profile!r}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**raw)


@dataclass(frozen=True)
class ResultRow:
    name: str
    accuracy: float
    f1_macro: float
    f1_weighted: float
    seconds: float
    seed: int

    def __post_init__(self):
        for metric in ("accuracy", "f1_macro", "f1_weighted"):
            value = getattr(self, metric)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{metric} must be in [0, 1], got {value}")

    def as_csv(self) -> str:
        return (
            f"{self.name},{self.accuracy:.6f},{self.f1_macro:.6f},"
            f"{self.f1_weighted:.6f},{self.seconds:.3f},{self.seed}"
        )


RESULT_HEADER = "method,accuracy,f1_macro,f1_weighted,seconds,seed"


def config_hash(spec: ExperimentSpec) -> str:
    payload = json.dumps(spec.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def _resolve_lexicon(spec: ExperimentSpec, lexicon: SynonymLexicon | None) -> SynonymLexicon:
    if lexicon is not None:
        return lexicon
    if spec.lexicon_file:
        return SynonymLexicon.from_file(spec.lexicon_file)
    return SynonymLexicon.empty()


def run_config(
    spec: ExperimentSpec,
    data: Dataset,
    *,
    out_dir=None,
    lexicon: SynonymLexicon | None = None,
    overwrite: bool = False,
) -> ResultRow:
    """Execute one configuration end to end and return its metric row.

    With ``out_dir`` set, persists the checkpoint, the vocabulary, the
    oversampling plan report, a machine-readable run manifest, and appends
    the metric row to results.csv (existing (name, seed) rows are an error
    unless ``overwrite``).
    """
    if len(data) == 0:
        raise ValueError("dataset must be non-empty")
    timings: dict[str, float] = {}
    stage_counts: dict[str, int] = {}

    @contextmanager
    def stage(name: str):
        t0 = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        timings[name] = time.perf_counter() - t0

    started = time.perf_counter()

    with stage("clean"):
        cleaner = TextCleaner(
            stopwords=spec.stopword_file,
            remove_numeric=spec.remove_numeric,
            lowercase=spec.lowercase,
            lemmatize=spec.lemmatize,
        )
        clean_data = cleaner.transform_dataset(data)
        codec = fit_label_codec(clean_data)
        stage_counts["clean"] = len(clean_data)

    with stage("split"):
        train_ds, test_ds = split(clean_data, spec.test_fraction, derive_seed(spec.seed, "split"))
        stage_counts["train"] = len(train_ds)
        stage_counts["test"] = len(test_ds)

    with stage("iqr"):
        if spec.apply_iqr:
            train_ds = iqr_filter(train_ds, IqrConfig(multiplier=spec.iqr_multiplier))
        stage_counts["after_iqr"] = len(train_ds)

    with stage("eda"):
        if spec.use_eda:
            lex = _resolve_lexicon(spec, lexicon)
            acfg = AugmentConfig(
                op_probability=spec.op_probability,
                deletion_p=spec.deletion_p,
                seed=derive_seed(spec.seed, "eda"),
                augment_title=spec.augment_title,
            )
            if spec.augment_all:
                train_ds = augment_all(train_ds, acfg, lex)
            else:
                train_ds = expand_minority(train_ds, spec.eda_rate, acfg, lex)
        stage_counts["after_eda"] = len(train_ds)

    with stage("tokenize"):
        def full_text(rec):
            return f"{rec.title} {rec.body}".strip()

        if spec.vocab_file:
            vocab = load_vocab(spec.vocab_file)
        else:
            vocab = train_vocab((full_text(r) for r in train_ds), spec.vocab_size)
        train_seqs = [
            encode(full_text(r), vocab, spec.capacity, label_id=codec.encode(r.label), uid=r.id)
            for r in train_ds
        ]
        test_seqs = [
            encode(full_text(r), vocab, spec.capacity, label_id=codec.encode(r.label), uid=r.id)
            for r in test_ds
        ]
        stage_counts["tokenized_train"] = len(train_seqs)

    plan = None
    pre_plan_counts: dict[int, int] = {}
    with stage("oversample"):
        if spec.use_oversampling:
            for seq in train_seqs:
                pre_plan_counts[seq.label_id] = pre_plan_counts.get(seq.label_id, 0) + 1
            plan = make_plan(pre_plan_counts, spec.oversampling_rate)
            train_seqs = apply_plan(train_seqs, plan, derive_seed(spec.seed, "oversample"))
        stage_counts["after_oversample"] = len(train_seqs)

    with stage("train"):
        profile = BACKBONES[spec.backbone]
        bcfg = BackboneConfig(
            vocab_size=len(vocab),
            num_classes=codec.num_classes,
            embedding_dim=profile["embedding_dim"],
            hidden=profile["hidden"],
            dropout_rate=spec.dropout_rate,
            seed=derive_seed(spec.seed, "init"),
        )
        tcfg = TrainConfig(
            epochs=spec.epochs,
            batch_size=spec.batch_size,
            peak_lr=spec.peak_lr if spec.peak_lr is not None else LR_PROFILES[spec.lr_profile],
            warmup_fraction=spec.warmup_fraction,
            weight_decay=spec.weight_decay,
            loss=spec.loss,
            focal=FocalParams(alpha=spec.alpha, gamma=spec.gamma),
            seed=derive_seed(spec.seed, "train"),
        )
        ckpt, trace = train(train_seqs, tcfg, bcfg, classes=codec.classes_)

    with stage("score"):
        preds, _ = predict(ckpt, test_seqs)
        golds = [seq.label_id for seq in test_seqs]
        matrix = confusion(preds, golds, codec.num_classes)
        report = scores(matrix)

    seconds = time.perf_counter() - started
    row = ResultRow(
        name=spec.name,
        accuracy=report.accuracy,
        f1_macro=report.f1_macro,
        f1_weighted=report.f1_weighted,
        seconds=seconds,
        seed=spec.seed,
    )

    if out_dir is not None:
        _persist_run(
            out_dir, spec, row, ckpt, vocab, plan, pre_plan_counts, trace, timings,
            stage_counts, overwrite,
        )
    return row


def _persist_run(out_dir, spec, row, ckpt, vocab, plan, plan_counts, trace, timings, stage_counts, overwrite):
    out_dir = Path(out_dir)
    run_dir = out_dir / spec.name / f"seed{spec.seed}"
    run_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(ckpt, run_dir / "checkpoint.json")
    vocab.save(run_dir / "vocab.txt")
    if plan is not None:
        (run_dir / "plan.txt").write_text(
            plan_report(plan, plan_counts, class_names=list(ckpt.classes)) + "\n", encoding="utf-8"
        )
    manifest = {
        "name": spec.name,
        "seed": spec.seed,
        "config_hash": config_hash(spec),
        "spec": spec.to_dict(),
        "stage_seconds": timings,
        "stage_counts": stage_counts,
        "loss_trace": trace,
        "metrics": {
            "accuracy": row.accuracy,
            "f1_macro": row.f1_macro,
            "f1_weighted": row.f1_weighted,
        },
    }
    (run_dir / "manifest.json").write_text(json.dumps(manifest, indent=1), encoding="utf-8")
    append_result(out_dir / "results.csv", row, overwrite=overwrite)


def append_result(path, row: ResultRow, *, overwrite: bool = False) -> None:
    """Append a row to the results file; duplicate (name, seed) pairs are
    rejected unless ``overwrite`` replaces the old row."""
    path = Path(path)
    rows: list[str] = []
    if path.exists():
        rows = [line for line in path.read_text(encoding="utf-8").splitlines() if line][1:]
    key = (row.name, str(row.seed))
    kept = []
    for line in rows:
        parts = line.split(",")
        if (parts[0], parts[-1]) == key:
            if not overwrite:
                raise ValueError(
                    f"results already contain a row for {row.name!r} seed {row.seed}; "
                    "pass overwrite to replace it"
                )
            continue
        kept.append(line)
    kept.append(row.as_csv())
    path.write_text(RESULT_HEADER + "\n" + "\n".join(kept) + "\n", encoding="utf-8")


def run_grid(
    specs: Sequence[ExperimentSpec],
    data: Dataset,
    seeds: Sequence[int],
    *,
    out_dir=None,
    lexicon: SynonymLexicon | None = None,
    overwrite: bool = False,
) -> list[ResultRow]:
    """Run every spec at every seed (specs in input order, seeds inner) and
    append one median-aggregate row per spec (seed field -1)."""
    if not specs:
        raise ValueError("specs must be non-empty")
    if not seeds:
        raise ValueError("seeds must be non-empty")
    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise ValueError(f"duplicate spec names: {dupes}")

    rows: list[ResultRow] = []
    for spec in specs:
        seed_rows = []
        for seed in seeds:
            cell = replace(spec, seed=seed)
            seed_rows.append(
                run_config(cell, data, out_dir=out_dir, lexicon=lexicon, overwrite=overwrite)
            )
        rows.extend(seed_rows)
        aggregate = ResultRow(
            name=f"{spec.name}/median",
            accuracy=statistics.median(r.accuracy for r in seed_rows),
            f1_macro=statistics.median(r.f1_macro for r in seed_rows),
            f1_weighted=statistics.median(r.f1_weighted for r in seed_rows),
            seconds=sum(r.seconds for r in seed_rows),
            seed=-1,
        )
        rows.append(aggregate)
        if out_dir is not None:
            append_result(Path(out_dir) / "results.csv", aggregate, overwrite=True)
    return rows


def load_specs(path) -> list[ExperimentSpec]:
    """Load experiment specs from a YAML file.

    Two layouts are accepted: a single mapping of spec fields, or
    {"defaults": {...}, "experiments": [{...}, ...]} where each experiment
    overrides the defaults. Field names mirror ExperimentSpec exactly.
    """
    doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a mapping at the top level")
    if "experiments" in doc:
        defaults = doc.get("defaults", {}) or {}
        specs = []
        for entry in doc["experiments"]:
            merged = {**defaults, **(entry or {})}
            specs.append(ExperimentSpec.from_dict(merged))
        return specs
    return [ExperimentSpec.from_dict(doc)]
