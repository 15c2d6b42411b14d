"""Reader for the simulation CLI's CSV contract.

The contract: leading ``# key: value`` comment lines, one header row of
``name[unit]`` cells, then numeric rows (``nan`` marks padding in ragged
sweeps).  This module parses that — and nothing else; all numbers shown in a
figure come straight from the file.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingColumnError, PlotsError

_HEADER_CELL = re.compile(r"^(?P<name>[A-Za-z0-9_]+)\[(?P<unit>[^\]]+)\]$")


@dataclass(frozen=True)
class Table:
    """One parsed CSV: column names, their units, rows, and the comment block."""

    source: str
    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: dict[str, str]

    def column(self, name: str) -> list[float]:
        if name not in self.columns:
            raise MissingColumnError(name, list(self.columns), self.source)
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def unit_of(self, name: str) -> str:
        if name not in self.columns:
            raise MissingColumnError(name, list(self.columns), self.source)
        return self.units[self.columns.index(name)]

    def columns_matching(self, prefix: str) -> list[str]:
        return [c for c in self.columns if c.startswith(prefix)]


def read_table(path: str | Path) -> Table:
    path = Path(path)
    if not path.is_file():
        raise PlotsError(f"CSV file not found: {path}")
    metadata: dict[str, str] = {}
    header: list[str] | None = None
    units: list[str] = []
    rows: list[tuple[float, ...]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        for record in csv.reader(fh):
            if not record or not any(cell.strip() for cell in record):
                continue
            if record[0].lstrip().startswith("#"):
                text = ",".join(record).lstrip()[1:].strip()
                key, sep, value = text.partition(":")
                if sep:
                    metadata[key.strip()] = value.strip()
                continue
            if header is None:
                header = []
                for cell in record:
                    m = _HEADER_CELL.match(cell.strip())
                    if not m:
                        raise PlotsError(
                            f"{path}: header cell {cell!r} is not name[unit]"
                        )
                    header.append(m.group("name"))
                    units.append(m.group("unit"))
                continue
            if len(record) != len(header):
                raise PlotsError(
                    f"{path}: row {len(rows) + 1} has {len(record)} cells, "
                    f"expected {len(header)}"
                )
            try:
                rows.append(tuple(float(cell) for cell in record))
            except ValueError as exc:
                raise PlotsError(
                    f"{path}: non-numeric value in row {len(rows) + 1}: {exc}"
                ) from None
    if header is None:
        raise PlotsError(f"empty CSV: {path} contains no header row")
    if not rows:
        raise PlotsError(f"empty CSV: {path} has a header but no data rows")
    return Table(str(path), tuple(header), tuple(units), tuple(rows), metadata)
