"""Labeled text records, label encoding, and deterministic stratified splits."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

# Logical field -> column name in the file header. The body text commonly
# ships under a "text" column in recall-report exports.
DEFAULT_SCHEMA = {"id": "id", "title": "title", "body": "text", "label": "label"}


@dataclass(frozen=True)
class Record:
    """One labeled text instance."""

    id: str
    title: str
    body: str
    label: str


class Dataset:
    """Immutable, ordered collection of records with a label histogram.

    Construction validates the collection invariants: unique record ids and
    non-empty labels. ``class_counts`` is always the recomputed histogram of
    record labels, so it cannot drift from the records themselves.
    """

    def __init__(self, records: Iterable[Record]):
        records = tuple(records)
        seen: set[str] = set()
        for rec in records:
            if not rec.label:
                raise ValueError(f"record {rec.id!r} has an empty label")
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)
        self._records = records
        self._class_counts = dict(Counter(rec.label for rec in records))

    @property
    def records(self) -> tuple[Record, ...]:
        return self._records

    @property
    def class_counts(self) -> dict[str, int]:
        return dict(self._class_counts)

    def by_class(self) -> dict[str, list[Record]]:
        groups: dict[str, list[Record]] = {}
        for rec in self._records:
            groups.setdefault(rec.label, []).append(rec)
        return groups

    def ids(self) -> set[str]:
        return {rec.id for rec in self._records}

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self._records)

    def __getitem__(self, index: int) -> Record:
        return self._records[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, Dataset) and self._records == other._records

    def __repr__(self) -> str:
        return f"Dataset({len(self)} records, {len(self._class_counts)} classes)"


def load_dataset(path, schema: dict[str, str] | None = None, delimiter: str = ",") -> Dataset:
    """Read a delimited text file (UTF-8, header row) into a Dataset.

    ``schema`` maps the logical fields id/title/body/label to column names.
    Quoted fields with embedded delimiters and newlines are supported. A
    missing title or body cell (or a whole missing title/body column) loads
    as the empty string; a missing label or id column is a hard error.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        header = reader.fieldnames or []
        for field in ("id", "label"):
            column = schema[field]
            if column not in header:
                raise ValueError(f"{field} column {column!r} not found in {path.name} header")
        id_col, label_col = schema["id"], schema["label"]
        title_col, body_col = schema.get("title"), schema.get("body")
        records = []
        for row_no, row in enumerate(reader, start=2):
            rid = (row.get(id_col) or "").strip()
            label = (row.get(label_col) or "").strip()
            if not rid:
                raise ValueError(f"{path.name}:{row_no}: empty id")
            if not label:
                raise ValueError(f"{path.name}:{row_no}: empty label")
            title = row.get(title_col) or "" if title_col else ""
            body = row.get(body_col) or "" if body_col else ""
            records.append(Record(id=rid, title=title, body=body, label=label))
    return Dataset(records)


def save_dataset(dataset: Dataset, path, schema: dict[str, str] | None = None, delimiter: str = ",") -> None:
    """Write a Dataset back to a delimited file using column names from ``schema``."""
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([schema["id"], schema["title"], schema["body"], schema["label"]])
        for rec in dataset:
            writer.writerow([rec.id, rec.title, rec.body, rec.label])


class LabelCodec:
    """Bijection between class names and contiguous integer ids.

    Ids are assigned by lexicographic order of the class names so the same
    label set always yields the same encoding, independent of record order.
    """

    def __init__(self):
        self.classes_: tuple[str, ...] | None = None
        self._index: dict[str, int] = {}

    def fit(self, labels: Iterable[str]) -> "LabelCodec":
        classes = sorted(set(labels))
        if not classes:
            raise ValueError("cannot fit a label codec on an empty label set")
        self.classes_ = tuple(classes)
        self._index = {name: i for i, name in enumerate(classes)}
        return self

    @property
    def index(self) -> dict[str, int]:
        return dict(self._index)

    @property
    def num_classes(self) -> int:
        self._check_fitted()
        return len(self.classes_)

    def encode(self, label: str) -> int:
        self._check_fitted()
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown class {label!r}; known: {list(self.classes_)}") from None

    def decode(self, class_id: int) -> str:
        self._check_fitted()
        if not 0 <= class_id < len(self.classes_):
            raise ValueError(f"class id {class_id} out of range [0, {len(self.classes_)})")
        return self.classes_[class_id]

    def transform(self, labels: Iterable[str]) -> list[int]:
        return [self.encode(label) for label in labels]

    def inverse_transform(self, ids: Iterable[int]) -> list[str]:
        return [self.decode(i) for i in ids]

    def _check_fitted(self) -> None:
        if self.classes_ is None:
            raise ValueError("LabelCodec is not fitted")


def fit_label_codec(dataset: Dataset) -> LabelCodec:
    """Fit a LabelCodec on the label set of ``dataset`` (non-empty)."""
    if len(dataset) == 0:
        raise ValueError("cannot fit a label codec on an empty dataset")
    return LabelCodec().fit(rec.label for rec in dataset)


def _class_test_count(n: int, fraction: float) -> int:
    # round half up; singleton classes stay entirely in train, and every
    # class keeps at least one training record
    allotted = int(n * fraction + 0.5)
    return min(allotted, n - 1)


def split(dataset: Dataset, test_fraction: float, seed: int, *, val_fraction: float = 0.0):
    """Deterministic stratified train/test split.

    Per class, the test allotment is round(count * test_fraction); classes
    with a single record stay entirely in train. Record order from the input
    is preserved within each part. With ``val_fraction`` > 0 a validation
    part is carved out of the remaining train records by the same rule and
    the return value becomes (train, val, test).
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if not 0.0 <= val_fraction < 1.0:
        raise ValueError(f"val_fraction must be in [0, 1), got {val_fraction}")
    if test_fraction + val_fraction >= 1.0:
        raise ValueError("test_fraction + val_fraction must be below 1")
    if len(dataset) == 0:
        raise ValueError("cannot split an empty dataset")

    by_class: dict[str, list[int]] = {}
    for i, rec in enumerate(dataset):
        by_class.setdefault(rec.label, []).append(i)

    rng = np.random.default_rng(seed)
    test_idx: set[int] = set()
    val_idx: set[int] = set()
    for label in sorted(by_class):
        indices = by_class[label]
        order = rng.permutation(len(indices))
        n_test = _class_test_count(len(indices), test_fraction)
        for j in order[:n_test]:
            test_idx.add(indices[j])
        if val_fraction > 0.0:
            remaining = len(indices) - n_test
            n_val = min(int(len(indices) * val_fraction + 0.5), remaining - 1)
            for j in order[n_test:n_test + max(n_val, 0)]:
                val_idx.add(indices[j])

    train = Dataset(rec for i, rec in enumerate(dataset) if i not in test_idx and i not in val_idx)
    test = Dataset(rec for i, rec in enumerate(dataset) if i in test_idx)
    if val_fraction > 0.0:
        val = Dataset(rec for i, rec in enumerate(dataset) if i in val_idx)
        return train, val, test
    return train, test
