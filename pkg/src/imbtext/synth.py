"""Deterministic synthetic imbalanced corpora with per-class signature words.

Each class owns a disjoint signature vocabulary; record bodies mix signature
words with shared filler words at a configurable noise rate. At noise 0 the
classes are perfectly separable by word counts; at noise 1 every class has
the same word distribution. A companion generator derives a synonym lexicon
from the same signature sets, so augmentation has a class-preserving synonym
source on synthetic data.
"""

from __future__ import annotations

import random
from typing import Sequence

from .augment import SynonymLexicon
from .data import Dataset, Record
from .seeding import derive_seed

_CONSONANTS = "bcdfghjklmnpqrstvwz"
_VOWELS = "aeiou"


def _make_word(rng: random.Random) -> str:
    syllables = rng.randint(2, 4)
    return "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables))


def _word_pool(size: int, rng: random.Random) -> list[str]:
    pool: list[str] = []
    seen: set[str] = set()
    while len(pool) < size:
        word = _make_word(rng)
        if word not in seen:
            seen.add(word)
            pool.append(word)
    return pool


def _signatures(num_classes: int, vocab_per_class: int, seed: int) -> list[list[str]]:
    # drawn before any filler so the signature sets depend only on
    # (num_classes, vocab_per_class, seed)
    rng = random.Random(seed)
    pool = _word_pool(num_classes * vocab_per_class, rng)
    return [pool[k * vocab_per_class:(k + 1) * vocab_per_class] for k in range(num_classes)]


def class_name(k: int) -> str:
    return f"class_{k:02d}"


def gen_synthetic(
    num_classes: int,
    counts: Sequence[int],
    vocab_per_class: int = 30,
    noise: float = 0.3,
    seed: int = 0,
    *,
    body_words: tuple[int, int] = (8, 20),
    filler_size: int | None = None,
) -> Dataset:
    """Build a labeled synthetic corpus with the given per-class sizes.

    Bodies draw each word from the class signature with probability
    1 - noise, otherwise from the shared filler pool. Titles are classless
    running identifiers. Deterministic for fixed arguments.
    """
    if num_classes < 2:
        raise ValueError("num_classes must be at least 2")
    if len(counts) != num_classes:
        raise ValueError(f"expected {num_classes} class counts, got {len(counts)}")
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must be in [0, 1], got {noise}")
    if vocab_per_class < 1:
        raise ValueError("vocab_per_class must be positive")

    signatures = _signatures(num_classes, vocab_per_class, seed)
    taken = {w for sig in signatures for w in sig}
    filler_rng = random.Random(derive_seed(seed, "filler"))
    filler: list[str] = []
    while len(filler) < (filler_size or vocab_per_class):
        word = _make_word(filler_rng)
        if word not in taken:
            taken.add(word)
            filler.append(word)

    rng = random.Random(derive_seed(seed, "bodies"))

    records = []
    for k, count in enumerate(counts):
        label = class_name(k)
        sig = signatures[k]
        for i in range(count):
            length = rng.randint(*body_words)
            words = [
                rng.choice(filler) if rng.random() < noise else rng.choice(sig)
                for _ in range(length)
            ]
            records.append(
                Record(
                    id=f"syn-{k}-{i}",
                    title=f"notice {k}-{i}",
                    body=" ".join(words),
                    label=label,
                )
            )
    return Dataset(records)


def gen_synthetic_lexicon(
    num_classes: int,
    vocab_per_class: int = 30,
    seed: int = 0,
    *,
    synonyms_per_word: int = 4,
) -> SynonymLexicon:
    """Synonym lexicon matching gen_synthetic's signature sets for the same
    (num_classes, vocab_per_class, seed): each signature word maps to other
    words of its own class, so substitution preserves the label signal."""
    if synonyms_per_word < 1:
        raise ValueError("synonyms_per_word must be positive")
    signatures = _signatures(num_classes, vocab_per_class, seed)
    rng = random.Random(derive_seed(seed, "lexicon"))
    entries: dict[str, list[str]] = {}
    for sig in signatures:
        if len(sig) < 2:
            continue
        for word in sig:
            others = [w for w in sig if w != word]
            take = min(synonyms_per_word, len(others))
            entries[word] = rng.sample(others, take)
    return SynonymLexicon(entries)
