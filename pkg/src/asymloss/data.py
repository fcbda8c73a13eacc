"""Labeled datasets: labels in {-1,+1}, a feature matrix, optional group ids,
and optional named auxiliary columns (per-row costs, crime categories, ...).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyData, ParseError, SchemaError


@dataclass(frozen=True)
class Row:
    """A single-sample view used by loss quartets."""

    index: int
    y: int
    x: np.ndarray
    group: int | None
    extras: dict[str, object]


@dataclass
class Dataset:
    """Samples (y_i, x_i) with optional group ids and auxiliary columns.

    `extras` maps column name -> array of length n; quartets that need
    per-row information beyond the feature vector (tabular costs, crime
    categories, detention days) read it from here.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    groups: np.ndarray | None = None
    extras: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y)
        if self.X.shape[0] != self.y.shape[0]:
            raise SchemaError(
                f"X has {self.X.shape[0]} rows but y has {self.y.shape[0]}"
            )
        if self.X.shape[1] != len(self.feature_names):
            raise SchemaError(
                f"X has {self.X.shape[1]} columns but "
                f"{len(self.feature_names)} feature names given"
            )
        bad = ~np.isin(self.y, (-1, 1))
        if bad.any():
            raise SchemaError(f"labels must be -1/+1; offending rows {np.flatnonzero(bad)[:5]}")
        self.y = self.y.astype(int)
        if self.groups is not None:
            self.groups = np.asarray(self.groups, dtype=int)
            if self.groups.shape[0] != self.n:
                raise SchemaError("groups length does not match")
        for name, col in self.extras.items():
            if len(col) != self.n:
                raise SchemaError(f"extra column {name!r} length does not match")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def row(self, i: int) -> Row:
        return Row(
            index=i,
            y=int(self.y[i]),
            x=self.X[i],
            group=None if self.groups is None else int(self.groups[i]),
            extras={k: v[i] for k, v in self.extras.items()},
        )

    def subset(self, idx: np.ndarray) -> "Dataset":
        return Dataset(
            X=self.X[idx],
            y=self.y[idx],
            feature_names=list(self.feature_names),
            groups=None if self.groups is None else self.groups[idx],
            extras={k: np.asarray(v)[idx] for k, v in self.extras.items()},
        )

    def split(self, test_fraction: float) -> tuple["Dataset", "Dataset"]:
        """Train/test split; the test set is the LAST ceil(test_fraction*n) rows.

        Rows are i.i.d. in every generator we use, so position carries no
        information; a positional split keeps replications reproducible.
        """
        n_test = int(np.ceil(test_fraction * self.n))
        if n_test <= 0 or n_test >= self.n:
            raise EmptyData(f"split leaves an empty side (n={self.n}, test={n_test})")
        idx = np.arange(self.n)
        return self.subset(idx[: self.n - n_test]), self.subset(idx[self.n - n_test :])


def map_labels(raw, column: str = "y") -> np.ndarray:
    """Map {0,1} or {-1,+1} encoded outcomes to {-1,+1}; 1 -> +1."""
    arr = np.asarray(raw, dtype=float)
    vals = set(np.unique(arr).tolist())
    if vals <= {-1.0, 1.0}:
        return arr.astype(int)
    if vals <= {0.0, 1.0}:
        return (2 * arr - 1).astype(int)
    raise SchemaError(f"column {column!r} must be encoded 0/1 or -1/+1, got values {sorted(vals)[:6]}")


def load_csv(
    path,
    label_col: str = "y",
    group_col: str | None = "group",
    feature_cols: list[str] | None = None,
    extra_cols: list[str] | None = None,
) -> Dataset:
    """Read a CSV with a header row into a Dataset.

    Features default to every column that is not the label, the group, or a
    named extra. Extra columns are kept verbatim (strings stay strings).
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file or missing header")
        header = list(reader.fieldnames)
        rows = list(reader)
    if not rows:
        raise EmptyData(f"{path}: no data rows")
    if label_col not in header:
        raise SchemaError(f"{path}: missing label column {label_col!r}")
    extra_cols = extra_cols or []
    for col in extra_cols:
        if col not in header:
            raise SchemaError(f"{path}: missing extra column {col!r}")
    has_group = group_col is not None and group_col in header
    if feature_cols is None:
        skip = {label_col, *extra_cols} | ({group_col} if has_group else set())
        feature_cols = [c for c in header if c not in skip]
    else:
        missing = [c for c in feature_cols if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing feature columns {missing}")

    def parse_float(val, col, i):
        try:
            return float(val)
        except (TypeError, ValueError):
            raise ParseError(f"column {col!r} value {val!r} is not numeric", row=i)

    X = np.array(
        [[parse_float(r[c], c, i) for c in feature_cols] for i, r in enumerate(rows)]
    )
    y = map_labels([parse_float(r[label_col], label_col, i) for i, r in enumerate(rows)], label_col)
    groups = None
    if has_group:
        groups = np.array(
            [int(parse_float(r[group_col], group_col, i)) for i, r in enumerate(rows)]
        )
    extras = {}
    for col in extra_cols:
        vals = [r[col] for r in rows]
        try:
            extras[col] = np.array([float(v) for v in vals])
        except (TypeError, ValueError):
            extras[col] = np.array(vals, dtype=object)
    return Dataset(X=X, y=y, feature_names=feature_cols, groups=groups, extras=extras)
