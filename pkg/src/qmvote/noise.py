"""Seeded bit-flip measurement noise: shot simulation and exact error tails.

The channel flips each measured bit independently: a true 0 reads as 1 with
probability p01 and a true 1 reads as 0 with probability p10, independently
per qubit and per shot. Simulation is driven by a counter-based generator
(Philox) keyed from a 64-bit seed plus the shot-block index, so a run is a
pure function of its arguments and blocks may be produced in any order or
in parallel without changing the result.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import MAX_QUBITS, CountsTable, validate_bitstring
from .errors import DimensionError, ValidationError

MAX_SEED = 2**64

# Shots are generated in fixed-size blocks; block b draws from a stream
# keyed by (seed, b), so blocks can be produced out of order or on separate
# workers and still assemble into the sequential result. The block size is
# part of the output definition and must not be tuned per run.
_BLOCK_SHOTS = 1 << 15


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Per-qubit flip probabilities p01 = Pr(read 1 | true 0) and
    p10 = Pr(read 0 | true 1)."""

    p01: np.ndarray
    p10: np.ndarray

    def __post_init__(self):
        p01 = np.atleast_1d(np.array(self.p01, dtype=np.float64, copy=True))
        p10 = np.atleast_1d(np.array(self.p10, dtype=np.float64, copy=True))
        if p01.shape != p10.shape or p01.ndim != 1:
            raise DimensionError("p01 and p10 must be 1-d arrays of equal length")
        if p01.size == 0 or p01.size > MAX_QUBITS:
            raise ValidationError(f"qubit count must be in 1..{MAX_QUBITS}, got {p01.size}")
        for name, arr in (("p01", p01), ("p10", p10)):
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ValidationError(f"{name} entries must lie in [0, 1]")
        p01.setflags(write=False)
        p10.setflags(write=False)
        object.__setattr__(self, "p01", p01)
        object.__setattr__(self, "p10", p10)

    @classmethod
    def uniform(cls, n: int, p01: float, p10: float | None = None) -> "NoiseModel":
        """All qubits share (p01, p10); symmetric when p10 is omitted."""
        if p10 is None:
            p10 = p01
        return cls(p01=np.full(n, p01), p10=np.full(n, p10))

    @property
    def n(self) -> int:
        return self.p01.size

    def symmetric(self, i: int) -> bool:
        return self.p01[i] == self.p10[i]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.all(self.p01 == self.p10))

    def for_qubit(self, i: int) -> tuple[float, float]:
        return float(self.p01[i]), float(self.p10[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, NoiseModel):
            return NotImplemented
        return np.array_equal(self.p01, other.p01) and np.array_equal(self.p10, other.p10)

    def __repr__(self) -> str:
        if self.is_symmetric and np.all(self.p01 == self.p01[0]):
            return f"NoiseModel.uniform(n={self.n}, p={self.p01[0]})"
        return f"NoiseModel(n={self.n})"


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_seed(seed: int, *tags) -> int:
    """Deterministically derive an independent 64-bit seed from a master
    seed and a tag path (used for per-phase and per-circuit streams)."""
    seed = _check_seed(seed)
    digest = hashlib.sha256(repr((seed,) + tags).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # 128-bit Philox key: seed in the high word, block index in the low one.
    return np.random.Generator(np.random.Philox(key=(seed << 64) | block))


def _block_bounds(shots: int):
    done = 0
    block = 0
    while done < shots:
        take = min(_BLOCK_SHOTS, shots - done)
        yield block, take
        done += take
        block += 1


def _shot_block(x0_bits: np.ndarray, flip_p: np.ndarray, seed: int, block: int, take: int) -> np.ndarray:
    """Measured rows for one shot block; depends only on its arguments."""
    rng = _block_rng(seed, block)
    flips = rng.random((take, x0_bits.size)) < flip_p[None, :]
    return (x0_bits[None, :] ^ flips).astype(np.uint8)


def _simulate_rows(x0_bits: np.ndarray, flip_p: np.ndarray, shots: int, seed: int) -> np.ndarray:
    pieces = [_shot_block(x0_bits, flip_p, seed, b, take) for b, take in _block_bounds(shots)]
    return pieces[0] if len(pieces) == 1 else np.concatenate(pieces)


def _rows_to_counts(rows: np.ndarray) -> CountsTable:
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    chars = (uniq + ord("0")).astype(np.uint8)
    n = rows.shape[1]
    blob = chars.tobytes().decode("ascii")
    table = {blob[i * n : (i + 1) * n]: int(c) for i, c in enumerate(counts)}
    return CountsTable(table, n=n)


def _prepare(x0: str, noise: NoiseModel, shots: int, seed: int):
    validate_bitstring(x0)
    if len(x0) != noise.n:
        raise DimensionError(
            f"ground truth has {len(x0)} qubits but the noise model has {noise.n}"
        )
    if not isinstance(shots, (int, np.integer)) or isinstance(shots, bool) or shots < 1:
        raise ValidationError(f"shots must be a positive integer, got {shots!r}")
    seed = _check_seed(seed)
    x0_bits = np.frombuffer(x0.encode("ascii"), dtype=np.uint8) - ord("0")
    flip_p = np.where(x0_bits == 0, noise.p01, noise.p10)
    return x0_bits, flip_p, int(shots), seed


def simulate_shots(x0: str, noise: NoiseModel, shots: int, seed: int) -> CountsTable:
    """Draw ``shots`` independent noisy measurements of ``x0``.

    Deterministic: identical arguments always yield a bit-identical table.
    """
    x0_bits, flip_p, shots, seed = _prepare(x0, noise, shots, seed)
    rows = _simulate_rows(x0_bits, flip_p, shots, seed)
    return _rows_to_counts(rows)


def simulate_antipodal_shots(x0: str, noise: NoiseModel, shots: int, seed: int) -> CountsTable:
    """Like :func:`simulate_shots`, but each shot's pre-noise truth is drawn
    uniformly from the antipodal pair {x0, complement(x0)}.

    Models algorithms whose two correct outputs are bitwise complements
    (GHZ-style), with equal weight on the two branches.
    """
    x0_bits, _, shots, seed = _prepare(x0, noise, shots, seed)
    p01 = noise.p01
    p10 = noise.p10
    n = x0_bits.size
    pieces = []
    done = 0
    block = 0
    while done < shots:
        take = min(_BLOCK_SHOTS, shots - done)
        rng = _block_rng(seed, block)
        truth_flip = (rng.random(take) < 0.5).astype(np.uint8)
        truths = x0_bits[None, :] ^ truth_flip[:, None]
        flip_p = np.where(truths == 0, p01[None, :], p10[None, :])
        flips = rng.random((take, n)) < flip_p
        pieces.append((truths ^ flips).astype(np.uint8))
        done += take
        block += 1
    rows = pieces[0] if len(pieces) == 1 else np.concatenate(pieces)
    return _rows_to_counts(rows)


def shot_error_probability_exact(shots: int, p: float, ties: str = "error") -> float:
    """Exact probability that a per-qubit majority over ``shots`` i.i.d.
    measurements with symmetric flip probability ``p`` comes out wrong.

    Sums the binomial tail sum_{f} C(shots, f) p^f (1-p)^(shots-f) over all
    flip counts f that defeat the vote. With ``ties="error"`` an exact tie
    (f = shots/2, even shots) counts against the vote, matching the
    tie-to-1 vote rule when the ground truth is 0; ``ties="success"``
    counts ties as correct. Computed in log space, stable up to shots
    around 10**6.
    """
    if not isinstance(shots, (int, np.integer)) or isinstance(shots, bool) or shots < 1:
        raise ValidationError(f"shots must be a positive integer, got {shots!r}")
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    if ties not in ("error", "success"):
        raise ValidationError(f"ties must be 'error' or 'success', got {ties!r}")
    if ties == "error":
        lo = (shots + 1) // 2  # ceil(S/2); includes the tie term for even S
    else:
        lo = shots // 2 + 1
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0 if lo <= shots else 0.0
    f = np.arange(lo, shots + 1, dtype=np.float64)
    log_terms = (
        gammaln(shots + 1)
        - gammaln(f + 1)
        - gammaln(shots - f + 1)
        + f * math.log(p)
        + (shots - f) * math.log1p(-p)
    )
    peak = log_terms.max()
    total = math.exp(peak) * float(np.exp(log_terms - peak).sum())
    return min(total, 1.0)
