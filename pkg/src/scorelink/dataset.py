"""German credit data ingestion and subpopulation splitting.

The reference input is the numeric German credit file: a comma-separated
UTF-8 table of 1000 rows and 21 columns, one header row, every cell a
number. The target column (``kredit``) is 1 for creditworthy borrowers and
0 otherwise; the account-status column (``laufkont``) separates bank
customers (value > 1) from non-customers (value = 1).

Learning/test partitions are drawn with numpy's Philox bit generator
(philox4x64), a published counter-based PRNG, keyed by
``(seed, learning_size, repetition)`` so that every partition is
reproducible across runs, platforms, and process counts.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import DataError

SOURCE_TAG = "source"
TARGET_TAG = "target"
POOLED_TAG = "pooled"
_TAGS = (SOURCE_TAG, TARGET_TAG, POOLED_TAG)

DEFAULT_TARGET_COLUMN = "kredit"
DEFAULT_SPLIT_COLUMN = "laufkont"


@dataclass(frozen=True)
class CreditRecord:
    """One applicant: a numeric feature vector and a binary repayment label."""

    features: np.ndarray
    label: int

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        if feats.ndim != 1:
            raise DataError("record features must be a 1-d vector")
        if self.label not in (0, 1):
            raise DataError(f"label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "features", feats)


@dataclass(frozen=True)
class LabeledSample:
    """A feature matrix plus binary labels for one subpopulation.

    ``features`` has shape (n, d), ``labels`` shape (n,) with values in
    {0, 1}. ``tag`` names the subpopulation: "source" (customers),
    "target" (non-customers) or "pooled".
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    tag: str = POOLED_TAG

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if feats.ndim != 2:
            raise DataError("features must be a 2-d matrix")
        if labels.shape != (feats.shape[0],):
            raise DataError("labels must be a vector matching the row count")
        if feats.shape[0] == 0:
            raise DataError("empty dataset")
        if not np.all((labels == 0) | (labels == 1)):
            raise DataError("labels must be 0 or 1")
        if len(self.feature_names) != feats.shape[1]:
            raise DataError("feature_names length must equal the column count")
        if self.tag not in _TAGS:
            raise DataError(f"tag must be one of {_TAGS}, got {self.tag!r}")
        feats.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_records(self) -> int:
        return self.features.shape[0]

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def record(self, index: int) -> CreditRecord:
        return CreditRecord(self.features[index], int(self.labels[index]))

    @property
    def records(self) -> list[CreditRecord]:
        return [self.record(i) for i in range(self.n_records)]

    def class_counts(self) -> tuple[int, int]:
        """(count of label 0, count of label 1)."""
        ones = int(self.labels.sum())
        return self.n_records - ones, ones

    def subset(self, indices: np.ndarray, tag: str | None = None) -> "LabeledSample":
        return LabeledSample(
            self.features[indices],
            self.labels[indices],
            self.feature_names,
            self.tag if tag is None else tag,
        )

    @classmethod
    def from_records(
        cls,
        records: list[CreditRecord],
        feature_names: tuple[str, ...],
        tag: str = POOLED_TAG,
    ) -> "LabeledSample":
        if not records:
            raise DataError("empty dataset")
        feats = np.vstack([r.features for r in records])
        labels = np.array([r.label for r in records])
        return cls(feats, labels, feature_names, tag)


@dataclass(frozen=True)
class SplitPlan:
    """Repeated learning/test subsampling plan for the target subpopulation."""

    learning_size: int
    repetitions: int = 1
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if self.learning_size < 1:
            raise DataError("learning_size must be positive")
        if self.repetitions < 1:
            raise DataError("repetitions must be >= 1")


def load_csv(path: str | Path, target_column: str = DEFAULT_TARGET_COLUMN) -> LabeledSample:
    """Load a numeric CSV with a header row into a LabeledSample.

    The target column supplies the binary label and is removed from the
    feature set. Raises DataError for a missing file, a missing target
    column, an unparseable cell (reported with row and column), or an
    empty table.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        return _parse_csv(f, target_column, str(path))


def load_german_credit() -> LabeledSample:
    """Load the packaged numeric German credit file (1000 rows, 21 columns)."""
    text = resources.files("scorelink").joinpath("data/german.csv").read_text(encoding="utf-8")
    return _parse_csv(text.splitlines(), DEFAULT_TARGET_COLUMN, "packaged german.csv")


def _parse_csv(lines, target_column: str, origin: str) -> LabeledSample:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{origin}: empty file") from None
    header = [h.strip() for h in header]
    if target_column not in header:
        raise DataError(f"{origin}: target column {target_column!r} not in header")
    target_idx = header.index(target_column)

    rows = []
    labels = []
    for i, row in enumerate(reader):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"{origin}: row {i + 2} has {len(row)} cells, expected {len(header)}")
        values = []
        for j, cell in enumerate(row):
            try:
                values.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{origin}: cell at row {i + 2}, column {header[j]!r} is not numeric: {cell!r}"
                ) from None
        label = values.pop(target_idx)
        if label not in (0.0, 1.0):
            raise DataError(f"{origin}: row {i + 2}: label must be 0 or 1, got {label}")
        rows.append(values)
        labels.append(int(label))

    if not rows:
        raise DataError(f"{origin}: empty dataset (header only)")
    feature_names = tuple(h for k, h in enumerate(header) if k != target_idx)
    return LabeledSample(np.array(rows), np.array(labels), feature_names, POOLED_TAG)


def write_csv(
    sample: LabeledSample, path: str | Path, target_column: str = DEFAULT_TARGET_COLUMN
) -> None:
    """Write a sample back to CSV with the label as the last column."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(list(sample.feature_names) + [target_column])
        for x, y in zip(sample.features, sample.labels):
            writer.writerow([_format_number(v) for v in x] + [int(y)])


def _format_number(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def split_by_account_status(
    sample: LabeledSample, split_column: str = DEFAULT_SPLIT_COLUMN
) -> tuple[LabeledSample, LabeledSample]:
    """Separate customers (split column > 1) from non-customers (= 1).

    The split column is removed from the predictors of both outputs: it is
    constant on the non-customer side, so its coefficient could never be
    estimated from a target sample.
    """
    if split_column not in sample.feature_names:
        raise DataError(f"split column {split_column!r} not among features")
    col = sample.feature_names.index(split_column)
    values = sample.features[:, col]
    if np.any(values < 1):
        bad = int(np.argmax(values < 1))
        raise DataError(f"split column {split_column!r} has value below 1 at record {bad}")

    keep = [j for j in range(sample.dimension) if j != col]
    names = tuple(n for j, n in enumerate(sample.feature_names) if j != col)
    source_mask = values > 1
    for mask, side in ((source_mask, "source"), (~source_mask, "target")):
        if not mask.any():
            raise DataError(f"empty subpopulation: no {side} records")
    source = LabeledSample(
        sample.features[np.ix_(source_mask, keep)], sample.labels[source_mask], names, SOURCE_TAG
    )
    target = LabeledSample(
        sample.features[np.ix_(~source_mask, keep)], sample.labels[~source_mask], names, TARGET_TAG
    )
    return source, target


def _philox(seed: int, learning_size: int, repetition_index: int) -> np.random.Generator:
    # philox4x64 key = (seed, learning_size * 2^32 + repetition); both words mod 2^64
    sub = (int(learning_size) << 32) + int(repetition_index)
    key = np.array([int(seed) % 2**64, sub % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_split(
    target: LabeledSample, plan: SplitPlan, repetition_index: int = 0
) -> tuple[LabeledSample, LabeledSample]:
    """Draw one learning/test partition of the target subpopulation.

    The learning sample has exactly ``plan.learning_size`` rows drawn
    without replacement; the test sample is the complement. The partition
    is a pure function of (seed, learning_size, repetition_index).
    """
    if not 0 <= repetition_index < plan.repetitions:
        raise DataError(
            f"repetition_index {repetition_index} outside [0, {plan.repetitions})"
        )
    n = plan.learning_size
    total = target.n_records
    if n >= total:
        raise DataError(f"learning_size {n} must be smaller than the target size {total}")

    rng = _philox(plan.seed, n, repetition_index)
    if plan.stratified:
        chosen = _stratified_choice(target.labels, n, rng)
    else:
        chosen = rng.permutation(total)[:n]
    mask = np.zeros(total, dtype=bool)
    mask[chosen] = True
    learning = target.subset(np.flatnonzero(mask))
    test = target.subset(np.flatnonzero(~mask))
    return learning, test


def _stratified_choice(labels: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    # per-class quotas by largest remainder, then a uniform draw inside each class
    total = labels.shape[0]
    classes = [np.flatnonzero(labels == 0), np.flatnonzero(labels == 1)]
    exact = [n * len(idx) / total for idx in classes]
    quota = [int(np.floor(e)) for e in exact]
    order = sorted(range(2), key=lambda k: exact[k] - quota[k], reverse=True)
    for k in order:
        if sum(quota) == n:
            break
        if quota[k] < len(classes[k]):
            quota[k] += 1
    chosen = [rng.permutation(len(idx))[:q] for idx, q in zip(classes, quota)]
    return np.concatenate([idx[c] for idx, c in zip(classes, chosen)])
