"""CSV reading against the simulator's dataset contract.

A valid file is: one or more ``# key = value`` metadata lines, a
comma-separated header row naming the columns, then float rows. Every
violation raises SchemaError with a message that names the offending
column or metadata key, so a caller can fail loudly and precisely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SchemaError(Exception):
    """CSV does not match the dataset contract; message names the key."""


@dataclass(frozen=True)
class Table:
    """One parsed CSV: metadata dict, column names, float data block."""

    path: str
    meta: dict[str, str]
    columns: tuple[str, ...]
    data: np.ndarray  # shape (n_rows, n_columns)

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(
                f"{self.path}: missing column '{name}' "
                f"(found: {', '.join(self.columns)})")
        return self.data[:, self.columns.index(name)]

    def meta_value(self, key: str) -> str:
        if key not in self.meta:
            raise SchemaError(f"{self.path}: missing metadata key '{key}'")
        return self.meta[key]

    def meta_float(self, key: str) -> float:
        raw = self.meta_value(key)
        try:
            return float(raw)
        except ValueError:
            raise SchemaError(
                f"{self.path}: metadata key '{key}' is not a number: "
                f"{raw!r}") from None


def read_table(path: str) -> Table:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None

    meta: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        key, sep, value = body.partition("=")
        if sep:
            meta[key.strip()] = value.strip()
        i += 1

    if not meta:
        raise SchemaError(f"{path}: missing '#'-prefixed metadata header")
    if i >= len(lines) or not lines[i].strip():
        raise SchemaError(f"{path}: missing column header row")
    columns = tuple(c.strip() for c in lines[i].split(","))
    i += 1

    rows = []
    for lineno, raw in enumerate(lines[i:], start=i + 1):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != len(columns):
            raise SchemaError(
                f"{path}:{lineno}: expected {len(columns)} values "
                f"(columns: {', '.join(columns)}), got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise SchemaError(
                f"{path}:{lineno}: non-numeric value in row") from None

    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(path=path, meta=meta, columns=columns,
                 data=np.asarray(rows, dtype=float))


def require_columns(table: Table, names: tuple[str, ...]) -> None:
    for name in names:
        table.column(name)


def require_command(table: Table, expected: str) -> None:
    got = table.meta_value("command")
    if got != expected:
        raise SchemaError(
            f"{table.path}: metadata key 'command' is '{got}', "
            f"expected '{expected}'")
