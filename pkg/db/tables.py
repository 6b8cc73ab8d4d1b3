"""Golden-table storage: exact expected R_t values and table reports on disk."""

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

import config
from engine.errors import DataFileError
from engine.precision import parse_rational


@dataclass(frozen=True)
class TableEntry:
    """One published value R_t for a family member X_t."""

    family: str
    t: Fraction
    expected_R: Fraction
    n: Optional[int] = None


def load_golden_tables(path: Optional[Path] = None) -> Dict[str, List[TableEntry]]:
    """Load every golden table from the JSON data file.

    Args:
        path: Override for the data file location.

    Returns:
        Dict[str, List[TableEntry]]: Entries keyed by family, in file order.

    Raises:
        DataFileError: If the file is missing, unreadable or malformed.
    """
    path = Path(path) if path is not None else config.GOLDEN_TABLES_FILE
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise DataFileError(f"Failed to read golden tables at {path}: {e}") from e
    except ValueError as e:
        raise DataFileError(f"Golden tables at {path} are not valid JSON: {e}") from e

    tables = {}
    try:
        for family, rows in raw.items():
            tables[family] = [
                TableEntry(
                    family=family,
                    t=parse_rational(row["t"]),
                    expected_R=parse_rational(row["R"]),
                    n=row.get("n"),
                )
                for row in rows
            ]
    except (KeyError, TypeError, AttributeError, ValueError) as e:
        raise DataFileError(f"Malformed golden table entry in {path}: {e}") from e
    return tables


def get_entries(family: str, path: Optional[Path] = None) -> List[TableEntry]:
    """Entries of one family.

    Raises:
        DataFileError: If the family has no table.
    """
    tables = load_golden_tables(path)
    if family not in tables:
        raise DataFileError(f"No golden table for family {family!r}")
    return tables[family]


def get_all_entries(path: Optional[Path] = None) -> List[TableEntry]:
    """All entries, families in the order legendre, family2, family3."""
    tables = load_golden_tables(path)
    return [entry for family in config.FAMILIES for entry in tables.get(family, [])]


def find_entry(family: str, t: Fraction, path: Optional[Path] = None) -> Optional[TableEntry]:
    for entry in get_entries(family, path):
        if entry.t == t:
            return entry
    return None


def save_report(report: List[Dict], path: Optional[Path] = None) -> Path:
    """Write a table report as JSON.

    Raises:
        DataFileError: If the file cannot be written.
    """
    path = Path(path) if path is not None else config.TABLE_REPORT_FILE
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
    except OSError as e:
        raise DataFileError(f"Failed to write report to {path}: {e}") from e
    return path
