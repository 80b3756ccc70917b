"""Labeled multidimensional datasets: CSV ingestion, validation, unit-interval scaling.

Datasets are immutable after construction and safe to share across workers.
Rows are held as a read-only float64 matrix; labels are opaque strings.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class DatasetError(ValueError):
    """Base class for ingestion and validation failures."""


class CellParseError(DatasetError):
    """A cell could not be parsed as a number (names row and column)."""


class RaggedRowError(DatasetError):
    """A data row has a different number of cells than the header."""


class EmptyDatasetError(DatasetError):
    """No usable data rows."""


#: Cell values treated as missing. Rows containing one are dropped (and
#: counted) rather than imputed; imputing would silently corrupt the
#: exact-recovery guarantees everything downstream relies on.
MISSING_TOKENS = frozenset({"", "?", "na", "n/a", "nan", "null", "none"})


@dataclass(frozen=True)
class AttributeMeta:
    """Name plus observed value range of one attribute (column)."""

    name: str
    observed_min: float
    observed_max: float
    declared_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.observed_min > self.observed_max:
            raise DatasetError(
                f"attribute {self.name!r}: observed_min > observed_max"
            )
        if self.declared_range is not None:
            lo, hi = self.declared_range
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DatasetError(
                    f"attribute {self.name!r}: declared range must be finite"
                )
            if not lo < hi:
                raise DatasetError(
                    f"attribute {self.name!r}: declared range must satisfy lo < hi"
                )

    @property
    def span(self) -> tuple[float, float]:
        """Range used for scaling: the declared range when given, else observed."""
        if self.declared_range is not None:
            return self.declared_range
        return (self.observed_min, self.observed_max)


@dataclass(frozen=True)
class ColumnScale:
    """Affine map for one column: normalized = (raw - offset) * scale.

    Constant columns get scale 0 and are flagged; they normalize to 0 and
    denormalize back to `offset` (the constant value).
    """

    scale: float
    offset: float
    constant: bool = False

    def apply(self, values: np.ndarray) -> np.ndarray:
        if self.constant:
            return np.zeros_like(values)
        return (values - self.offset) * self.scale

    def invert(self, values: np.ndarray) -> np.ndarray:
        if self.constant:
            return np.full_like(values, self.offset)
        return values / self.scale + self.offset


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-attribute affine maps taking raw values into [0, 1]."""

    columns: tuple[ColumnScale, ...]

    def to_json(self) -> dict:
        return {
            "columns": [
                {"scale": c.scale, "offset": c.offset, "constant": c.constant}
                for c in self.columns
            ]
        }

    @staticmethod
    def from_json(obj: dict) -> "NormalizationSpec":
        return NormalizationSpec(
            tuple(
                ColumnScale(c["scale"], c["offset"], c.get("constant", False))
                for c in obj["columns"]
            )
        )


@dataclass(frozen=True)
class Dataset:
    """Labeled n-D numeric points with attribute metadata.

    rows is (N, n) float64 and read-only; labels[i] is the class of rows[i].
    `dropped_rows` counts input rows removed at load time for missing cells.
    """

    attributes: tuple[AttributeMeta, ...]
    rows: np.ndarray
    labels: tuple[str, ...]
    dropped_rows: int = 0

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise DatasetError("rows must be a 2-D matrix")
        if rows.shape[0] == 0:
            raise EmptyDatasetError("dataset has no rows")
        if rows.shape[1] != len(self.attributes):
            raise DatasetError(
                f"rows have {rows.shape[1]} values but {len(self.attributes)} attributes declared"
            )
        if not np.all(np.isfinite(rows)):
            raise DatasetError("rows contain non-finite values")
        if len(self.labels) != rows.shape[0]:
            raise DatasetError("labels and rows differ in length")
        rows = rows.copy()
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def class_set(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.labels)))

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for l in self.labels:
            counts[l] = counts.get(l, 0) + 1
        return counts

    def label_mask(self, cls: str) -> np.ndarray:
        return np.array([l == cls for l in self.labels], dtype=bool)

    def select_attributes(self, indices: Sequence[int]) -> "Dataset":
        """Dataset restricted to the given attribute columns (order kept)."""
        idx = list(indices)
        if not idx:
            raise DatasetError("cannot select zero attributes")
        return Dataset(
            attributes=tuple(self.attributes[i] for i in idx),
            rows=self.rows[:, idx],
            labels=self.labels,
            dropped_rows=self.dropped_rows,
        )

    def select_classes(self, classes: Sequence[str]) -> "Dataset":
        """Rows whose label is in `classes` (binary tasks pick two explicitly)."""
        keep = [i for i, l in enumerate(self.labels) if l in set(classes)]
        if not keep:
            raise EmptyDatasetError(f"no rows with classes {classes}")
        return Dataset(
            attributes=self.attributes,
            rows=self.rows[keep],
            labels=tuple(self.labels[i] for i in keep),
            dropped_rows=self.dropped_rows,
        )


def _parse_cell(text: str, row: int, col_name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CellParseError(
            f"row {row}, column {col_name!r}: cannot parse {text!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise CellParseError(
            f"row {row}, column {col_name!r}: non-finite value {text!r}"
        )
    return value


def load_csv(
    source: bytes | str | Path | io.IOBase,
    label_column: str | int,
    delimiter: str = ",",
    drop_missing: bool = True,
) -> Dataset:
    """Parse header-first CSV into a Dataset.

    `label_column` selects the class column by header name or 0-based index;
    every other column must be numeric. Rows with missing cells (see
    MISSING_TOKENS) are dropped and counted when `drop_missing` is true,
    otherwise they raise CellParseError.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("source has no header row") from None
    header = [h.strip() for h in header]

    if isinstance(label_column, int):
        if not 0 <= label_column < len(header):
            raise DatasetError(f"label column index {label_column} out of range")
        label_idx = label_column
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DatasetError(
                f"label column {label_column!r} not in header {header}"
            ) from None

    attr_idx = [i for i in range(len(header)) if i != label_idx]
    names = [header[i] for i in attr_idx]

    rows: list[list[float]] = []
    labels: list[str] = []
    dropped = 0
    for lineno, record in enumerate(reader, start=1):
        if not record or (len(record) == 1 and record[0].strip() == ""):
            continue  # blank line
        if len(record) != len(header):
            raise RaggedRowError(
                f"row {lineno}: expected {len(header)} cells, got {len(record)}"
            )
        cells = [record[i].strip() for i in attr_idx]
        if drop_missing and any(c.lower() in MISSING_TOKENS for c in cells):
            dropped += 1
            continue
        rows.append(
            [_parse_cell(c, lineno, names[j]) for j, c in enumerate(cells)]
        )
        labels.append(record[label_idx].strip())

    if not rows:
        raise EmptyDatasetError("no data rows after the header")

    matrix = np.array(rows, dtype=np.float64)
    attributes = tuple(
        AttributeMeta(
            name=names[j],
            observed_min=float(matrix[:, j].min()),
            observed_max=float(matrix[:, j].max()),
        )
        for j in range(matrix.shape[1])
    )
    return Dataset(attributes=attributes, rows=matrix, labels=tuple(labels), dropped_rows=dropped)


def serialize_csv(d: Dataset, label_name: str = "class", delimiter: str = ",") -> str:
    """Canonical CSV form: attribute columns then the label column."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow([a.name for a in d.attributes] + [label_name])
    for row, label in zip(d.rows, d.labels):
        writer.writerow([repr(float(v)) for v in row] + [label])
    return out.getvalue()


def normalize(d: Dataset) -> tuple[Dataset, NormalizationSpec]:
    """Scale every attribute into [0, 1] by its span (declared or observed).

    Constant attributes map to 0 and are flagged in the returned spec.
    Values outside a declared range are an error, never clamped.
    """
    columns: list[ColumnScale] = []
    out = np.empty_like(d.rows)
    for j, attr in enumerate(d.attributes):
        lo, hi = attr.span
        col = d.rows[:, j]
        if attr.declared_range is not None and (col.min() < lo or col.max() > hi):
            raise DatasetError(
                f"attribute {attr.name!r}: values outside declared range [{lo}, {hi}]"
            )
        span = hi - lo
        # a span whose reciprocal overflows is constant at float precision;
        # mapping it to 0 keeps the 1e-9 absolute round-trip guarantee
        if span == 0.0 or not math.isfinite(1.0 / span):
            scale = ColumnScale(scale=0.0, offset=lo, constant=True)
        else:
            scale = ColumnScale(scale=1.0 / span, offset=lo)
        columns.append(scale)
        out[:, j] = scale.apply(col)

    attributes = tuple(
        AttributeMeta(
            name=a.name,
            observed_min=float(out[:, j].min()),
            observed_max=float(out[:, j].max()),
            declared_range=(0.0, 1.0) if not columns[j].constant else None,
        )
        for j, a in enumerate(d.attributes)
    )
    normalized = Dataset(
        attributes=attributes, rows=out, labels=d.labels, dropped_rows=d.dropped_rows
    )
    return normalized, NormalizationSpec(tuple(columns))


def denormalize(d: Dataset, spec: NormalizationSpec) -> Dataset:
    """Invert `normalize`; exact up to float rounding."""
    if len(spec.columns) != d.n_attributes:
        raise DatasetError("normalization spec does not match dataset width")
    out = np.empty_like(d.rows)
    for j, col in enumerate(spec.columns):
        out[:, j] = col.invert(d.rows[:, j])
    attributes = tuple(
        AttributeMeta(
            name=a.name,
            observed_min=float(out[:, j].min()),
            observed_max=float(out[:, j].max()),
        )
        for j, a in enumerate(d.attributes)
    )
    return Dataset(
        attributes=attributes, rows=out, labels=d.labels, dropped_rows=d.dropped_rows
    )


def pad_even(x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Repeat the last value when the dimension is odd, so pairs always cover it."""
    vec = np.asarray(x, dtype=np.float64).ravel()
    if vec.size == 0:
        raise DatasetError("cannot pad an empty vector")
    if vec.size % 2 == 0:
        return vec.copy()
    return np.concatenate([vec, vec[-1:]])
