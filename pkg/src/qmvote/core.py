"""Bitstrings, shot-count tables, per-qubit vote tallies, Hamming distance.

Bitstrings are plain Python strings over {'0', '1'}. Character position i
(0-based, left to right) holds qubit i; all file formats and reports use
this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from .errors import DimensionError, ValidationError

MAX_QUBITS = 4096

_COMPLEMENT_TABLE = str.maketrans("01", "10")


def validate_bitstring(bits: str, n: int | None = None) -> str:
    """Check that ``bits`` is a well-formed bitstring and return it.

    When ``n`` is given the length must match exactly.
    """
    if not isinstance(bits, str):
        raise ValidationError(f"bitstring must be a str, got {type(bits).__name__}")
    if not bits or set(bits) - {"0", "1"}:
        raise ValidationError(f"bitstring must be a non-empty string over 0/1, got {bits!r}")
    if len(bits) > MAX_QUBITS:
        raise ValidationError(f"bitstring has {len(bits)} qubits, maximum is {MAX_QUBITS}")
    if n is not None and len(bits) != n:
        raise DimensionError(f"bitstring {bits!r} has length {len(bits)}, expected {n}")
    return bits


def complement(bits: str) -> str:
    """Bitwise complement of a bitstring."""
    return bits.translate(_COMPLEMENT_TABLE)


def hamming_distance(a: str, b: str) -> int:
    """Number of positions where two equal-length bitstrings differ."""
    validate_bitstring(a)
    validate_bitstring(b)
    if len(a) != len(b):
        raise DimensionError(f"length mismatch: {len(a)} vs {len(b)}")
    return (int(a, 2) ^ int(b, 2)).bit_count()


class CountsTable:
    """Multiset of measured bitstrings with occurrence counts.

    Immutable after construction. All keys share one length ``n``, all
    counts are positive integers, and ``shots`` is their sum.
    """

    __slots__ = ("n", "shots", "_counts")

    def __init__(self, counts: Mapping[str, int], n: int | None = None):
        if not counts:
            raise ValidationError("counts table must contain at least one entry")
        items = dict(counts)
        first = next(iter(items))
        if n is None:
            if not isinstance(first, str):
                raise ValidationError("counts keys must be bitstrings")
            n = len(first)
        total = 0
        for key, count in items.items():
            validate_bitstring(key)
            if len(key) != n:
                raise ValidationError(
                    f"inconsistent key length: {key!r} has {len(key)} bits, expected {n}"
                )
            if isinstance(count, bool) or not isinstance(count, int) or count < 1:
                raise ValidationError(f"count for {key!r} must be a positive integer, got {count!r}")
            total += count
        self.n = n
        self.shots = total
        self._counts = MappingProxyType(items)

    @property
    def counts(self) -> Mapping[str, int]:
        return self._counts

    def items(self) -> Iterator[tuple[str, int]]:
        return iter(self._counts.items())

    def __getitem__(self, key: str) -> int:
        return self._counts[key]

    def __contains__(self, key: str) -> bool:
        return key in self._counts

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountsTable):
            return NotImplemented
        return self.n == other.n and dict(self._counts) == dict(other._counts)

    def __repr__(self) -> str:
        return f"CountsTable(n={self.n}, shots={self.shots}, distinct={len(self._counts)})"

    def as_arrays(self, canonical: bool = False) -> tuple[list[str], np.ndarray, np.ndarray]:
        """Return (keys, bit matrix, count vector).

        The bit matrix has one uint8 row per distinct key; the count vector
        is int64. With ``canonical=True`` keys are sorted so downstream
        floating-point reductions see a fixed order.
        """
        if canonical:
            keys = sorted(self._counts)
            counts = np.fromiter((self._counts[k] for k in keys), dtype=np.int64, count=len(keys))
        else:
            keys = list(self._counts)
            counts = np.fromiter(self._counts.values(), dtype=np.int64, count=len(keys))
        joined = "".join(keys).encode("ascii")
        bits = (np.frombuffer(joined, dtype=np.uint8) - ord("0")).reshape(len(keys), self.n)
        return keys, bits, counts


@dataclass(frozen=True, eq=False)
class VoteTally:
    """Per-qubit zero/one counts over a shot record.

    For every qubit i, ``zeros[i] + ones[i] == shots``.
    """

    zeros: np.ndarray
    ones: np.ndarray
    shots: int = field(default=0)

    def __post_init__(self):
        zeros = np.array(self.zeros, dtype=np.int64, copy=True)
        ones = np.array(self.ones, dtype=np.int64, copy=True)
        if zeros.ndim != 1 or zeros.shape != ones.shape:
            raise DimensionError("zeros and ones must be 1-d arrays of equal length")
        if zeros.size == 0 or zeros.size > MAX_QUBITS:
            raise ValidationError(f"qubit count must be in 1..{MAX_QUBITS}, got {zeros.size}")
        if np.any(zeros < 0) or np.any(ones < 0):
            raise ValidationError("per-qubit counts must be nonnegative")
        shots = self.shots if self.shots else int(zeros[0] + ones[0])
        if shots < 1:
            raise ValidationError("tally must cover at least one shot")
        if np.any(zeros + ones != shots):
            raise ValidationError("zeros[i] + ones[i] must equal the shot total for every qubit")
        zeros.setflags(write=False)
        ones.setflags(write=False)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "ones", ones)
        object.__setattr__(self, "shots", shots)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoteTally):
            return NotImplemented
        return (
            self.shots == other.shots
            and np.array_equal(self.zeros, other.zeros)
            and np.array_equal(self.ones, other.ones)
        )

    @property
    def n(self) -> int:
        return self.zeros.size

    @property
    def p0(self) -> np.ndarray:
        """Empirical per-qubit frequency of measuring 0."""
        return self.zeros / self.shots

    @property
    def p1(self) -> np.ndarray:
        """Empirical per-qubit frequency of measuring 1."""
        return self.ones / self.shots

    @property
    def margins(self) -> np.ndarray:
        """Per-qubit vote margin |p0 - p1|."""
        return np.abs(self.zeros - self.ones) / self.shots


# Entries are tallied in blocks of roughly this many matrix elements so the
# weighted column sums run in cache-resident chunks.
_TALLY_BLOCK_ELEMS = 1 << 18


def tally(counts: CountsTable) -> VoteTally:
    """Collapse a counts table into per-qubit zero/one vote counts.

    Cost is linear in (distinct entries) x (qubits). Partial sums use
    float64 matrix products, which are exact here because every partial
    sum is an integer bounded by the shot total (far below 2**53), and
    accumulate into 64-bit counters.
    """
    _, bits, weights = counts.as_arrays()
    n = counts.n
    rows = max(256, _TALLY_BLOCK_ELEMS // n)
    ones = np.zeros(n, dtype=np.int64)
    wf = weights.astype(np.float64)
    for lo in range(0, bits.shape[0], rows):
        part = wf[lo : lo + rows] @ bits[lo : lo + rows].astype(np.float64)
        ones += part.astype(np.int64)
    zeros = counts.shots - ones
    return VoteTally(zeros=zeros, ones=ones, shots=counts.shots)


def merge_tallies(a: VoteTally, b: VoteTally) -> VoteTally:
    """Pool two tallies over the same qubits (shot totals add)."""
    if a.n != b.n:
        raise DimensionError(f"tally width mismatch: {a.n} vs {b.n}")
    return VoteTally(zeros=a.zeros + b.zeros, ones=a.ones + b.ones, shots=a.shots + b.shots)
