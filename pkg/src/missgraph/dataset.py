"""Tabular container with an explicit per-cell observation mask, plus CSV I/O.

A :class:`Dataset` stores an ``(n_rows, n_cols)`` float matrix together with a
boolean mask (``True`` = observed).  Missing cells hold ``NaN`` as a sentinel
and must never be consumed as values.  Parsing is strict: every non-missing
cell has to be a finite number, and structural problems are reported with row
and column coordinates.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import ParseError, SchemaError

#: Cell texts (after stripping) treated as missing when no explicit set is given.
DEFAULT_NA_TOKENS = frozenset({"", "NA", "NaN", "null"})


class Category(str, enum.Enum):
    """Reporting category of a variable."""

    VITAL_PHYSIOLOGY = "VitalPhysiology"
    BLOOD_TESTS = "BloodTests"
    DEMOGRAPHICS = "Demographics"
    MORTALITY = "Mortality"
    ICU_MANAGEMENT = "IcuManagement"
    OTHER = "Other"


class VarKind(str, enum.Enum):
    """Whether a variable is a measured quantity or a completeness indicator."""

    OBSERVATION = "Observation"
    COMPLETENESS = "Completeness"


@dataclass(frozen=True)
class VariableMeta:
    """Name, category and kind of one variable.

    Completeness indicators carry ``parent``, the name of the observation
    variable whose presence they record.
    """

    name: str
    category: Category = Category.OTHER
    kind: VarKind = VarKind.OBSERVATION
    parent: str | None = None

    def __post_init__(self):
        if self.kind is VarKind.COMPLETENESS and not self.parent:
            raise ValueError(f"completeness variable {self.name!r} needs a parent")
        if self.kind is VarKind.OBSERVATION and self.parent is not None:
            raise ValueError(f"observation variable {self.name!r} cannot have a parent")


class ProfileRow(NamedTuple):
    name: str
    category: Category
    missing_proportion: float


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric table with a per-cell observation mask.

    Attributes
    ----------
    metas : list of VariableMeta, one per column, names unique.
    values : float array (n_rows, n_cols); NaN exactly at masked cells.
    mask : bool array, same shape; True = observed.
    """

    metas: tuple[VariableMeta, ...]
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        mask = np.array(self.mask, dtype=bool)
        object.__setattr__(self, "metas", tuple(self.metas))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        if values.ndim != 2 or mask.shape != values.shape:
            raise ValueError("values and mask must be 2-D arrays of equal shape")
        if values.shape[0] < 1:
            raise ValueError("a Dataset needs at least one row")
        if values.shape[1] != len(self.metas):
            raise ValueError("one VariableMeta per column required")
        names = [m.name for m in self.metas]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        # Sentinel discipline: NaN exactly where masked-missing.
        if not np.all(np.isnan(values[~mask])) or not np.all(np.isfinite(values[mask])):
            raise ValueError("masked cells must be NaN, observed cells finite")
        values.setflags(write=False)
        mask.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def names(self) -> list[str]:
        return [m.name for m in self.metas]

    def columns(self) -> Iterator[tuple[VariableMeta, np.ndarray]]:
        for j, meta in enumerate(self.metas):
            yield meta, self.values[:, j]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no variable named {name!r}") from None


def _parse_cell(text: str, na_tokens: frozenset[str]) -> float:
    """Return the cell value, NaN if the trimmed text is a missing token."""
    trimmed = text.strip()
    if trimmed in na_tokens:
        return math.nan
    value = float(trimmed)  # may raise ValueError
    if not math.isfinite(value):
        raise ValueError("non-finite")
    return value


def load_schema(path: str | Path) -> dict[str, Category]:
    """Read a JSON file mapping variable name -> category name."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read schema file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"schema file {path} must hold a JSON object")
    schema = {}
    for name, cat in raw.items():
        try:
            schema[name] = Category(cat)
        except ValueError:
            valid = ", ".join(c.value for c in Category)
            raise SchemaError(
                f"schema file {path}: unknown category {cat!r} for {name!r}"
                f" (expected one of {valid})"
            ) from None
    return schema


def parse_csv(
    path: str | Path,
    na_tokens: Iterable[str] = DEFAULT_NA_TOKENS,
    schema: dict[str, Category] | None = None,
) -> Dataset:
    """Parse an RFC-4180-style CSV with a mandatory header into a Dataset.

    Parameters
    ----------
    path : file to read; UTF-8, comma separated, header row first.
    na_tokens : cell texts, matched case-sensitively after trimming, that mark
        a missing cell.  Defaults to ``{"", "NA", "NaN", "null"}``.
    schema : optional map from variable name to :class:`Category`; unmapped
        variables fall back to ``Category.OTHER``.

    Raises
    ------
    ParseError for missing files, empty tables, ragged rows (with the row
    number) and non-numeric cells (with row/column coordinates);
    SchemaError for duplicate header names.
    """
    path = Path(path)
    na = frozenset(str(t) for t in na_tokens)
    if not path.is_file():
        raise ParseError(f"input file not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise SchemaError(f"{path}: duplicate header name(s): {', '.join(dupes)}")
        n_cols = len(header)
        rows: list[list[float]] = []
        for row_no, row in enumerate(reader, start=2):  # header is line 1
            if len(row) != n_cols:
                raise ParseError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {n_cols}"
                )
            parsed = []
            for j, cell in enumerate(row):
                try:
                    parsed.append(_parse_cell(cell, na))
                except ValueError:
                    raise ParseError(
                        f"{path}: row {row_no}, column {header[j]!r}: "
                        f"cannot parse {cell!r} as a finite number"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no data rows below the header")
    values = np.array(rows, dtype=float)
    mask = ~np.isnan(values)
    schema = schema or {}
    metas = tuple(
        VariableMeta(name=name, category=schema.get(name, Category.OTHER))
        for name in header
    )
    return Dataset(metas=metas, values=values, mask=mask)


def write_csv(dataset: Dataset, path: str | Path, na_token: str = "NA") -> None:
    """Write a Dataset back to CSV; observed floats use shortest round-trip repr."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(dataset.names)
        for i in range(dataset.n_rows):
            writer.writerow(
                [
                    repr(float(dataset.values[i, j])) if dataset.mask[i, j] else na_token
                    for j in range(dataset.n_cols)
                ]
            )


def missing_profile(dataset: Dataset) -> list[ProfileRow]:
    """Per-variable missing proportion, in column order."""
    missing = (~dataset.mask).mean(axis=0)
    return [
        ProfileRow(meta.name, meta.category, float(missing[j]))
        for j, meta in enumerate(dataset.metas)
    ]
