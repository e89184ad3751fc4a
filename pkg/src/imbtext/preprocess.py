"""Text cleaning (stopwords, numerals, punctuation, lemmas) and IQR length filtering."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .data import Dataset, Record

_NUMERIC_RE = re.compile(r"^\d+(?:[.,]\d+)*$")
_SIBILANT_ENDINGS = ("ch", "sh", "s", "x", "z")
# doubled-final-consonant reduction skips these (fall/miss/buzz stay intact)
_KEEP_DOUBLED = frozenset("lsz")
_VOWELS = frozenset("aeiou")


def load_stopwords(path=None) -> frozenset[str]:
    """Read a stopword file: UTF-8, one lowercase word per line, '#' comments.

    With no path, the bundled English list is used.
    """
    if path is None:
        text = resources.files("imbtext").joinpath("assets/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line)
    return frozenset(words)


@dataclass(frozen=True)
class CleanConfig:
    stopword_set: frozenset[str] = frozenset()
    remove_numeric: bool = True
    lowercase: bool = True
    lemmatize: bool = True

    def __post_init__(self):
        for word in self.stopword_set:
            if word != word.lower() or any(ch.isspace() for ch in word):
                raise ValueError(f"stopword {word!r} must be lowercase with no whitespace")


def _strip_one_suffix(word: str) -> str:
    """Apply the first matching suffix rule, or return the word unchanged."""
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("es") and len(word) > 3 and word[:-2].endswith(_SIBILANT_ENDINGS):
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss") and len(word) > 3:
        return word[:-1]
    if word.endswith("ing") and len(word) > 5:
        return _undouble(word[:-3])
    if word.endswith("ed") and len(word) > 4:
        return _undouble(word[:-2])
    return word


def _undouble(stem: str) -> str:
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-1] not in _KEEP_DOUBLED
    ):
        return stem[:-1]
    return stem


def lemmatize_token(word: str) -> str:
    """Rule-based lemmatizer over ordered suffix rules.

    Rules (first match wins per pass): -ies→-y; -es→∅ after a sibilant;
    -s→∅ except after -ss; -ing→∅ and -ed→∅, both with doubled-final-
    consonant reduction. Passes repeat until no rule fires, which makes the
    map idempotent by construction. Expects a non-empty lowercase token.
    """
    while True:
        shorter = _strip_one_suffix(word)
        if shorter == word:
            return word
        word = shorter


def clean_text(raw: str, cfg: CleanConfig, lemmatizer=lemmatize_token) -> str:
    """Clean one text: tokenize on whitespace, strip edge punctuation, drop
    stopwords and purely-numeric tokens, lemmatize, re-join with spaces.

    Total and idempotent under a fixed config: stopword and numeric checks
    re-run on the lemma, since lemmatization can produce either. Punctuation
    is stripped from token edges only, so hyphenated terms survive.
    """
    if cfg.lowercase:
        raw = raw.lower()
    out = []
    for token in raw.split():
        token = token.strip(string.punctuation)
        if not token:
            continue
        if token.lower() in cfg.stopword_set:
            continue
        if cfg.remove_numeric and _NUMERIC_RE.match(token):
            continue
        if cfg.lemmatize:
            token = lemmatizer(token)
            if token.lower() in cfg.stopword_set:
                continue
            if cfg.remove_numeric and _NUMERIC_RE.match(token):
                continue
        out.append(token)
    return " ".join(out)


@dataclass(frozen=True)
class IqrConfig:
    """Tukey-fence config; the length measure is the whitespace word count
    over a record's title and body."""

    multiplier: float = 1.5

    def __post_init__(self):
        if self.multiplier < 0:
            raise ValueError(f"multiplier must be nonnegative, got {self.multiplier}")


def record_word_count(rec: Record) -> int:
    return len(rec.title.split()) + len(rec.body.split())


def iqr_bounds(counts, multiplier: float) -> tuple[float, float]:
    """[Q1 - m*IQR, Q3 + m*IQR] with linear-interpolation quantiles."""
    counts = np.asarray(counts, dtype=float)
    q1, q3 = np.quantile(counts, [0.25, 0.75])
    iqr = q3 - q1
    return q1 - multiplier * iqr, q3 + multiplier * iqr


def iqr_filter(train: Dataset, cfg: IqrConfig = IqrConfig()) -> Dataset:
    """Drop records whose word count falls outside the Tukey fence.

    Record order is preserved. If the fence would reject every record the
    input is returned unchanged (the filter never empties a dataset).
    """
    if len(train) == 0:
        raise ValueError("cannot IQR-filter an empty dataset")
    counts = [record_word_count(rec) for rec in train]
    lo, hi = iqr_bounds(counts, cfg.multiplier)
    kept = [rec for rec, c in zip(train, counts) if lo <= c <= hi]
    if not kept or len(kept) == len(train):
        return train
    return Dataset(kept)


class TextCleaner(BaseEstimator, TransformerMixin):
    """Stateless cleaning transformer over lists of raw strings.

    ``stopwords`` may be None (bundled list), a path to a stopword file, or
    an iterable of lowercase words.
    """

    def __init__(self, stopwords=None, remove_numeric=True, lowercase=True, lemmatize=True):
        self.stopwords = stopwords
        self.remove_numeric = remove_numeric
        self.lowercase = lowercase
        self.lemmatize = lemmatize

    def _config(self) -> CleanConfig:
        stopwords = self.stopwords
        if stopwords is None or isinstance(stopwords, (str, Path)):
            stopwords = load_stopwords(stopwords)
        return CleanConfig(
            stopword_set=frozenset(stopwords),
            remove_numeric=self.remove_numeric,
            lowercase=self.lowercase,
            lemmatize=self.lemmatize,
        )

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> list[str]:
        cfg = self._config()
        return [clean_text(text, cfg) for text in X]

    def transform_dataset(self, dataset: Dataset) -> Dataset:
        """Clean title and body of every record, keeping ids and labels."""
        cfg = self._config()
        return Dataset(
            Record(
                id=rec.id,
                title=clean_text(rec.title, cfg),
                body=clean_text(rec.body, cfg),
                label=rec.label,
            )
            for rec in dataset
        )


class IqrLengthFilter(BaseEstimator):
    """Length-outlier filter with imblearn-style resampling semantics."""

    def __init__(self, multiplier=1.5):
        self.multiplier = multiplier

    def fit(self, dataset: Dataset):
        if len(dataset) == 0:
            raise ValueError("cannot fit on an empty dataset")
        counts = [record_word_count(rec) for rec in dataset]
        self.lower_, self.upper_ = iqr_bounds(counts, self.multiplier)
        return self

    def fit_resample(self, dataset: Dataset) -> Dataset:
        self.fit(dataset)
        return iqr_filter(dataset, IqrConfig(multiplier=self.multiplier))
