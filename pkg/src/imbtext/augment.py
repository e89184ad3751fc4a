"""EDA text edits (synonym replace, insert, swap, delete) and minority expansion."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator

from .data import Dataset, Record
from .seeding import derive_seed


class SynonymLexicon:
    """Word -> ordered synonym list, lowercase keys.

    A word never lists itself and no entry is empty; both are validated at
    construction so lookups can trust the table.
    """

    def __init__(self, entries: Mapping[str, Sequence[str]]):
        table: dict[str, tuple[str, ...]] = {}
        for word, syns in entries.items():
            word = word.lower()
            syns = tuple(s.lower() for s in syns)
            if not syns:
                raise ValueError(f"lexicon entry {word!r} has no synonyms")
            if word in syns:
                raise ValueError(f"lexicon entry {word!r} lists itself as a synonym")
            table[word] = syns
        self._entries = table

    def synonyms(self, word: str) -> tuple[str, ...]:
        return self._entries.get(word.lower(), ())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    @classmethod
    def empty(cls) -> "SynonymLexicon":
        return cls({})

    @classmethod
    def from_file(cls, path) -> "SynonymLexicon":
        """Parse `word<TAB>syn1,syn2,...` lines; '#' comment lines ignored."""
        entries: dict[str, list[str]] = {}
        text = Path(path).read_text(encoding="utf-8")
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise ValueError(f"{Path(path).name}:{line_no}: expected word<TAB>synonyms")
            word, _, rest = line.partition("\t")
            syns = [s.strip() for s in rest.split(",") if s.strip()]
            entries[word.strip()] = syns
        return cls(entries)

    @classmethod
    def bundled(cls) -> "SynonymLexicon":
        text = resources.files("imbtext").joinpath("assets/lexicon.tsv").read_text("utf-8")
        entries: dict[str, list[str]] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, _, rest = line.partition("\t")
            entries[word.strip()] = [s.strip() for s in rest.split(",") if s.strip()]
        return cls(entries)

    def save(self, path) -> None:
        lines = [f"{word}\t{','.join(syns)}" for word, syns in sorted(self._entries.items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


OPS = ("replace", "insert", "swap", "delete")


@dataclass(frozen=True)
class AugmentConfig:
    """Stochastic parameters for the four edit operations.

    ``op_probability`` is either one probability shared by all four
    operations or a mapping per operation name (missing names mean 0, so
    e.g. {"delete": 1.0} is a deletion-only configuration). The first three
    operations draw their repeat count n per ``n_mode`` ("uniform" means a
    uniform integer in [1, current word count]; "fixed:<k>" pins n to
    min(k, count)). Deletion removes each word with ``deletion_p``.
    """

    op_probability: float | Mapping[str, float] = 0.5
    deletion_p: float = 0.1
    n_mode: str = "uniform"
    seed: int = 0
    augment_title: bool = False

    def __post_init__(self):
        if isinstance(self.op_probability, Mapping):
            unknown = set(self.op_probability) - set(OPS)
            if unknown:
                raise ValueError(f"unknown operations {sorted(unknown)}; known: {OPS}")
            probs = self.op_probability.values()
        else:
            probs = [self.op_probability]
        for p in probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"operation probability must be in [0, 1], got {p}")
        if not 0.0 <= self.deletion_p <= 1.0:
            raise ValueError(f"deletion_p must be in [0, 1], got {self.deletion_p}")
        if self.n_mode != "uniform" and not self.n_mode.startswith("fixed:"):
            raise ValueError(f"n_mode must be 'uniform' or 'fixed:<k>', got {self.n_mode!r}")

    def prob(self, op: str) -> float:
        if isinstance(self.op_probability, Mapping):
            return float(self.op_probability.get(op, 0.0))
        return float(self.op_probability)


def _draw_n(cfg: AugmentConfig, word_count: int, rng: random.Random) -> int:
    if cfg.n_mode == "uniform":
        return rng.randint(1, word_count)
    return min(int(cfg.n_mode.split(":", 1)[1]), word_count)


def synonym_replace(
    words: Sequence[str], n: int, lex: SynonymLexicon, rng: random.Random
) -> list[str]:
    """Replace up to n distinct lexicon-covered positions with a uniformly
    chosen synonym; length never changes."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    out = list(words)
    eligible = [i for i, word in enumerate(out) if lex.synonyms(word)]
    if not eligible:
        return out
    for i in rng.sample(eligible, min(n, len(eligible))):
        out[i] = rng.choice(lex.synonyms(out[i]))
    return out


def random_insert(
    words: Sequence[str], n: int, lex: SynonymLexicon, rng: random.Random
) -> list[str]:
    """n times: pick a random covered word occurrence from the sentence and
    insert one of its synonyms at a random position."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    out = list(words)
    for _ in range(n):
        eligible = [word for word in out if lex.synonyms(word)]
        if not eligible:
            break
        syn = rng.choice(lex.synonyms(rng.choice(eligible)))
        out.insert(rng.randint(0, len(out)), syn)
    return out


def random_swap(words: Sequence[str], n: int, rng: random.Random) -> list[str]:
    """Exchange two distinct random positions, n times; permutes the input."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    out = list(words)
    if len(out) < 2:
        return out
    for _ in range(n):
        i, j = rng.sample(range(len(out)), 2)
        out[i], out[j] = out[j], out[i]
    return out


def random_delete(words: Sequence[str], p: float, rng: random.Random) -> list[str]:
    """Delete each word independently with probability p, preserving order.

    If every word would be deleted, one uniformly random original word is
    retained instead, so the output is never empty.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    out = [word for word in words if rng.random() >= p]
    if not out and words:
        out = [words[rng.randrange(len(words))]]
    return out


def _augment_words(words: list[str], cfg: AugmentConfig, lex: SynonymLexicon, rng: random.Random) -> list[str]:
    # fixed operation order: replace, insert, swap, delete
    if rng.random() < cfg.prob("replace"):
        words = synonym_replace(words, _draw_n(cfg, len(words), rng), lex, rng)
    if rng.random() < cfg.prob("insert"):
        words = random_insert(words, _draw_n(cfg, len(words), rng), lex, rng)
    if rng.random() < cfg.prob("swap"):
        words = random_swap(words, _draw_n(cfg, len(words), rng), rng)
    if rng.random() < cfg.prob("delete"):
        words = random_delete(words, cfg.deletion_p, rng)
    return words


def _augment_text(text: str, cfg: AugmentConfig, lex: SynonymLexicon, rng: random.Random) -> str:
    words = text.split()
    if not words:
        return text
    out = _augment_words(words, cfg, lex, rng)
    return text if out == words else " ".join(out)


def eda_augment(
    rec: Record,
    cfg: AugmentConfig,
    lex: SynonymLexicon,
    rng: random.Random,
    tag: str = "aug",
) -> Record:
    """Produce one augmented variant of a record.

    The label is copied unchanged, the title too unless ``cfg.augment_title``;
    the new id derives from the source id and ``tag``.
    """
    body = _augment_text(rec.body, cfg, lex, rng)
    title = _augment_text(rec.title, cfg, lex, rng) if cfg.augment_title else rec.title
    return Record(id=f"{rec.id}~{tag}", title=title, body=body, label=rec.label)


def expand_minority(
    train: Dataset, r: float, cfg: AugmentConfig, lex: SynonymLexicon
) -> Dataset:
    """Grow every class below ceil(r * max class count) up to that target by
    appending EDA variants of uniformly resampled class members.

    Each class draws from its own sub-seed of (cfg.seed, class name), so
    results do not depend on processing order.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError(f"sample rate r must be in (0, 1], got {r}")
    if len(train) == 0:
        raise ValueError("cannot expand an empty dataset")
    counts = train.class_counts
    target = math.ceil(r * max(counts.values()))
    by_class = train.by_class()
    records = list(train.records)
    for label in sorted(counts):
        have = counts[label]
        if have >= target:
            continue
        rng = random.Random(derive_seed(cfg.seed, "expand", label))
        pool = by_class[label]
        for i in range(target - have):
            src = pool[rng.randrange(len(pool))]
            records.append(eda_augment(src, cfg, lex, rng, tag=f"aug{i}"))
    return Dataset(records)


def augment_all(train: Dataset, cfg: AugmentConfig, lex: SynonymLexicon) -> Dataset:
    """Append one EDA variant of every record (the per-instance reading of
    the augmentation protocol); doubles the dataset."""
    rng = random.Random(derive_seed(cfg.seed, "augment-all"))
    extra = [eda_augment(rec, cfg, lex, rng, tag="aug") for rec in train]
    return Dataset(list(train.records) + extra)


class EdaAugmenter(BaseEstimator):
    """Minority-class expander with imblearn-style fit_resample semantics.

    ``lexicon`` may be None (no synonym source: replace/insert become
    no-ops), a path to a lexicon file, or a SynonymLexicon.
    """

    def __init__(
        self,
        rate=0.2,
        op_probability=0.5,
        deletion_p=0.1,
        n_mode="uniform",
        seed=0,
        lexicon=None,
        augment_title=False,
        expand_all=False,
    ):
        self.rate = rate
        self.op_probability = op_probability
        self.deletion_p = deletion_p
        self.n_mode = n_mode
        self.seed = seed
        self.lexicon = lexicon
        self.augment_title = augment_title
        self.expand_all = expand_all

    def _resolve(self) -> tuple[AugmentConfig, SynonymLexicon]:
        lex = self.lexicon
        if lex is None:
            lex = SynonymLexicon.empty()
        elif isinstance(lex, (str, Path)):
            lex = SynonymLexicon.from_file(lex)
        cfg = AugmentConfig(
            op_probability=self.op_probability,
            deletion_p=self.deletion_p,
            n_mode=self.n_mode,
            seed=self.seed,
            augment_title=self.augment_title,
        )
        return cfg, lex

    def fit(self, dataset: Dataset):
        return self

    def fit_resample(self, dataset: Dataset) -> Dataset:
        cfg, lex = self._resolve()
        if self.expand_all:
            return augment_all(dataset, cfg, lex)
        return expand_minority(dataset, self.rate, cfg, lex)
