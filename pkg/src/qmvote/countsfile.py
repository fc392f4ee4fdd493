"""Versioned JSON interchange format for shot-count tables.

Canonical document::

    {
      "schema_version": "1",
      "n": 2,
      "shots": 3,
      "counts": {"01": 2, "11": 1}
    }

Keys are bitstrings with qubit 0 as the leftmost character. The schema is
strict: unknown fields are rejected so golden files stay stable. Documents
produced by stacks that order bits right-to-left can be ingested with
``bit_order="right"``, which reverses every key on the way in.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import CountsTable
from .errors import CountsFormatError

SCHEMA_VERSION = "1"

_REQUIRED_FIELDS = ("schema_version", "n", "shots", "counts")

BIT_ORDERS = ("left", "right")


def _schema_error(message: str) -> CountsFormatError:
    return CountsFormatError(message, code="SCHEMA")


def parse_counts(data: bytes | str, bit_order: str = "left") -> CountsTable:
    """Parse and validate a counts document.

    Raises :class:`CountsFormatError` with code ``SCHEMA``,
    ``LENGTH_MISMATCH``, or ``SUM_MISMATCH`` naming the offending field.
    """
    if bit_order not in BIT_ORDERS:
        raise _schema_error(f"bit_order must be one of {BIT_ORDERS}, got {bit_order!r}")
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise _schema_error(f"counts document is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise _schema_error(f"counts document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise _schema_error("counts document must be a JSON object")
    unknown = set(doc) - set(_REQUIRED_FIELDS)
    if unknown:
        raise _schema_error(f"unknown fields {sorted(unknown)} are not allowed")
    missing = [f for f in _REQUIRED_FIELDS if f not in doc]
    if missing:
        raise _schema_error(f"missing required fields {missing}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise _schema_error(
            f"field 'schema_version' must be {SCHEMA_VERSION!r}, got {doc['schema_version']!r}"
        )
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise _schema_error(f"field 'n' must be a positive integer, got {n!r}")
    shots = doc["shots"]
    if not isinstance(shots, int) or isinstance(shots, bool) or shots < 1:
        raise _schema_error(f"field 'shots' must be a positive integer, got {shots!r}")
    raw = doc["counts"]
    if not isinstance(raw, dict) or not raw:
        raise _schema_error("field 'counts' must be a non-empty object")
    entries: dict[str, int] = {}
    total = 0
    for key, count in raw.items():
        if not isinstance(key, str) or set(key) - {"0", "1"}:
            raise _schema_error(f"counts key {key!r} is not a bitstring")
        if len(key) != n:
            raise CountsFormatError(
                f"counts key {key!r} has {len(key)} bits, field 'n' declares {n}",
                code="LENGTH_MISMATCH",
            )
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise _schema_error(f"count for {key!r} must be a positive integer, got {count!r}")
        entries[key if bit_order == "left" else key[::-1]] = count
        total += count
    if total != shots:
        raise CountsFormatError(
            f"field 'shots' declares {shots} but counts sum to {total}",
            code="SUM_MISMATCH",
        )
    return CountsTable(entries, n=n)


def serialize_counts(table: CountsTable) -> str:
    """Render a counts table as the canonical document (sorted keys)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": table.n,
        "shots": table.shots,
        "counts": {k: table[k] for k in sorted(table.counts)},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_counts(path: str | Path, bit_order: str = "left") -> CountsTable:
    return parse_counts(Path(path).read_bytes(), bit_order=bit_order)


def write_counts(path: str | Path, table: CountsTable) -> None:
    Path(path).write_text(serialize_counts(table), encoding="utf-8")
