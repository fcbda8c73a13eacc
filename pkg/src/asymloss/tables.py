"""CSV/JSON writers with round-trip-exact float formatting."""

from __future__ import annotations

import csv
import json


def fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(row.get(col)) for col in header])


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def comparison_csv_rows(columns: dict, row_labels) -> tuple[list[str], list[dict]]:
    """Pivot {(family, variant): {label: value}} into Table-3-shaped rows."""
    col_names = [f"{family}:{variant}" for family, variant in columns]
    header = ["row"] + col_names
    rows = []
    for label in row_labels:
        row = {"row": label}
        for (family, variant), vals in columns.items():
            row[f"{family}:{variant}"] = vals.get(label)
        rows.append(row)
    return header, rows
