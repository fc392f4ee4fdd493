"""Estimators recovering a single correct bitstring from noisy shot counts.

Provided decision rules:

* ``mode_estimate``   -- most frequently measured string.
* ``ml_bruteforce``   -- exhaustive maximum-likelihood search over all 2^n
  candidate strings. Deliberately enumerative so it can serve as an
  independent oracle for the vote-based rules.
* ``map_estimate``    -- maximum a posteriori under a prior (full table or
  independent per-qubit probabilities, including hard 0/1 constraints).
* ``qmv``             -- qubit-wise majority vote, the maximum-likelihood
  rule under symmetric per-qubit flip noise below 0.5.
* ``weighted_vote``   -- per-qubit log-likelihood-ratio vote, generalizing
  the majority vote to asymmetric flip probabilities.
* ``sliding_window_antipodal`` -- reconstructs a complementary output pair
  from two-qubit window agreement votes.

Tie conventions: majority and weighted votes resolve a tied qubit to 1;
mode, ML, and MAP resolve ties to the lexicographically smallest string.
Zero or one flip probabilities are treated as hard evidence through an
explicit -inf log-likelihood, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import CountsTable, VoteTally, complement, tally, validate_bitstring
from .errors import DimensionError, InfeasibleError, ValidationError
from .noise import NoiseModel

# 2^n candidates are scanned in blocks of this size.
_ENUM_BLOCK = 1 << 16
ENUM_MAX_QUBITS = 24
TABLE_PRIOR_MAX_QUBITS = 20

NEG_INF = float("-inf")


@dataclass(frozen=True, eq=False)
class Estimate:
    """Result of one estimator run.

    ``margins`` carries per-qubit vote margins |N0 - N1| / shots for the
    vote-based rules; ``gap`` carries the winner-versus-runner-up score
    difference for the argmax-based rules (log-likelihood units for ml/map,
    frequency units for mode).
    """

    value: str
    method: str
    margins: np.ndarray | None = None
    gap: float | None = None

    def __post_init__(self):
        validate_bitstring(self.value)
        if self.margins is not None:
            m = np.array(self.margins, dtype=np.float64, copy=True)
            if m.shape != (len(self.value),):
                raise DimensionError("margins must have one entry per qubit")
            m.setflags(write=False)
            object.__setattr__(self, "margins", m)

    @property
    def n(self) -> int:
        return len(self.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Estimate):
            return NotImplemented
        return self.value == other.value and self.method == other.method


@dataclass(frozen=True)
class AntipodalPair:
    """A bitstring and its bitwise complement, canonically oriented so the
    first member starts with 0."""

    x: str
    x_complement: str

    def __post_init__(self):
        validate_bitstring(self.x)
        if self.x_complement != complement(self.x):
            raise ValidationError("second member must be the bitwise complement of the first")

    @property
    def canonical(self) -> bool:
        return self.x[0] == "0"

    @classmethod
    def from_bitstring(cls, bits: str) -> "AntipodalPair":
        """Build the canonical pair containing ``bits``."""
        validate_bitstring(bits)
        low = bits if bits[0] == "0" else complement(bits)
        return cls(x=low, x_complement=complement(low))

    @property
    def members(self) -> frozenset[str]:
        return frozenset((self.x, self.x_complement))


class Prior:
    """Prior belief over the correct output.

    Two forms: independent per-qubit probabilities pi_i = Pr(bit i is 1),
    which may be hard 0/1 constraints, or an explicit probability table
    over full bitstrings (normalized to 1 within 1e-9, at most
    ``TABLE_PRIOR_MAX_QUBITS`` qubits).
    """

    __slots__ = ("n", "per_qubit", "table")

    def __init__(self, *, per_qubit: np.ndarray | None = None, table: Mapping[str, float] | None = None):
        if (per_qubit is None) == (table is None):
            raise ValidationError("exactly one of per_qubit or table must be given")
        if per_qubit is not None:
            arr = np.array(per_qubit, dtype=np.float64, copy=True)
            if arr.ndim != 1 or arr.size == 0:
                raise ValidationError("per-qubit prior must be a non-empty 1-d array")
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ValidationError("per-qubit prior entries must lie in [0, 1]")
            arr.setflags(write=False)
            self.n = arr.size
            self.per_qubit = arr
            self.table = None
        else:
            items = dict(table)
            if not items:
                raise ValidationError("table prior must contain at least one entry")
            n = len(next(iter(items)))
            if n > TABLE_PRIOR_MAX_QUBITS:
                raise InfeasibleError(
                    f"table priors support at most {TABLE_PRIOR_MAX_QUBITS} qubits, got {n}"
                )
            total = 0.0
            for key, prob in items.items():
                validate_bitstring(key, n)
                if prob < 0.0:
                    raise ValidationError(f"prior probability for {key!r} is negative")
                total += prob
            if abs(total - 1.0) > 1e-9:
                raise ValidationError(f"table prior sums to {total!r}, expected 1 within 1e-9")
            self.n = n
            self.per_qubit = None
            self.table = items

    @classmethod
    def uniform(cls, n: int) -> "Prior":
        """Uninformative prior: every qubit independently 1 with chance 0.5."""
        return cls(per_qubit=np.full(n, 0.5))

    @property
    def is_uniform(self) -> bool:
        if self.per_qubit is not None:
            return bool(np.all(self.per_qubit == 0.5))
        values = list(self.table.values())
        return len(self.table) == 2**self.n and all(v == values[0] for v in values)


def _check_tally(t: VoteTally) -> VoteTally:
    if not isinstance(t, VoteTally):
        raise ValidationError(f"expected a VoteTally, got {type(t).__name__}")
    return t


def mode_estimate(counts: CountsTable) -> Estimate:
    """Most frequently measured bitstring; ties pick the lexicographically
    smallest."""
    best_key, best_count = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    second_count = max((c for k, c in counts.items() if k != best_key), default=0)
    gap = (best_count - second_count) / counts.shots
    return Estimate(value=best_key, method="mode", gap=gap)


def _log_pow(p: float, k: int) -> float:
    """k * log(p) with the conventions 0 * log(0) = 0 and log(0) = -inf."""
    if k == 0:
        return 0.0
    if p <= 0.0:
        return NEG_INF
    return k * math.log(p)


def _qubit_loglikelihoods(zeros: int, ones: int, p01: float, p10: float) -> tuple[float, float]:
    """Log-likelihood of the observed (zeros, ones) under true bit 0 and 1."""
    ll0 = _log_pow(p01, ones) + _log_pow(1.0 - p01, zeros)
    ll1 = _log_pow(p10, zeros) + _log_pow(1.0 - p10, ones)
    return ll0, ll1


def qmv(vote_tally: VoteTally) -> Estimate:
    """Qubit-wise majority vote: bit i is 0 iff strictly more shots read 0
    than 1 there; ties resolve to 1."""
    t = _check_tally(vote_tally)
    bits = np.where(t.zeros > t.ones, ord("0"), ord("1")).astype(np.uint8)
    value = bits.tobytes().decode("ascii")
    return Estimate(value=value, method="qmv", margins=t.margins)


def weighted_vote(vote_tally: VoteTally, noise: NoiseModel) -> Estimate:
    """Per-qubit likelihood-ratio vote for (possibly asymmetric) flip noise.

    Bit i is declared 1 when the observations are strictly more likely
    under true 1 than under true 0, i.e. when
    p10^zeros (1-p10)^ones > p01^ones (1-p01)^zeros; ties resolve to 1.
    With p01 = p10 = p < 0.5 this reduces bit-for-bit to the majority vote.
    """
    t = _check_tally(vote_tally)
    if noise.n != t.n:
        raise DimensionError(f"noise model covers {noise.n} qubits, tally has {t.n}")
    out = bytearray(t.n)
    for i in range(t.n):
        zeros = int(t.zeros[i])
        ones = int(t.ones[i])
        ll0, ll1 = _qubit_loglikelihoods(zeros, ones, float(noise.p01[i]), float(noise.p10[i]))
        out[i] = ord("0") if ll0 > ll1 else ord("1")
    return Estimate(value=out.decode("ascii"), method="weighted", margins=t.margins)


def _candidate_bits(lo: int, hi: int, n: int) -> np.ndarray:
    """Rows of candidate bit vectors for integer candidates lo..hi-1.

    Candidate k maps to the bitstring with qubit 0 as the most significant
    character, so ascending k is ascending lexicographic order.
    """
    ks = np.arange(lo, hi, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((ks[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _enumerate_scores(counts: CountsTable, noise: NoiseModel, prior_logs: np.ndarray | None):
    """Scan all 2^n candidate strings and return the argmax index, its
    score, and the runner-up score.

    The score of a candidate is its shot log-likelihood plus, when
    ``prior_logs`` is given, its log prior. Per-entry log-likelihoods are
    accumulated qubit-major over a canonically ordered entry list, then
    weighted by the entry counts, so the scan does not depend on dict or
    platform reduction order.
    """
    n = counts.n
    if noise.n != n:
        raise DimensionError(f"noise model covers {noise.n} qubits, counts have {n}")
    if n > ENUM_MAX_QUBITS:
        raise InfeasibleError(
            f"exhaustive likelihood scan supports at most {ENUM_MAX_QUBITS} qubits, got {n}"
        )
    _, ybits, weights = counts.as_arrays(canonical=True)
    wts = weights.astype(np.float64)
    with np.errstate(divide="ignore"):
        # log_table[t, y, i] = log Pr(read y | true t) at qubit i
        log_table = np.stack(
            [
                np.stack([np.log1p(-noise.p01), np.log(noise.p01)]),
                np.stack([np.log(noise.p10), np.log1p(-noise.p10)]),
            ]
        )
    best_k = 0
    best_score = NEG_INF
    second_score = NEG_INF
    total = 1 << n
    for lo in range(0, total, _ENUM_BLOCK):
        hi = min(lo + _ENUM_BLOCK, total)
        xbits = _candidate_bits(lo, hi, n)
        # per-entry log-likelihood, summed over qubits in index order
        entry_ll = np.zeros((hi - lo, ybits.shape[0]))
        for i in range(n):
            entry_ll += log_table[xbits[:, i][:, None], ybits[None, :, i], i]
        scores = entry_ll @ wts
        if prior_logs is not None:
            scores += prior_logs[lo:hi]
        top_score = float(scores.max())
        if top_score == NEG_INF:
            continue
        # earliest index among equal maxima keeps the lexicographic rule
        first_top = int(np.flatnonzero(scores == top_score)[0])
        runner = float(np.partition(scores, -2)[-2]) if scores.size > 1 else NEG_INF
        if top_score > best_score:
            second_score = max(best_score, runner)
            best_score = top_score
            best_k = lo + first_top
        else:
            second_score = max(second_score, top_score)
    if best_score == NEG_INF:
        raise ValidationError(
            "every candidate has zero posterior weight; observations contradict hard evidence"
        )
    return best_k, best_score, second_score


def _bitstring_of(k: int, n: int) -> str:
    return format(k, f"0{n}b")


def ml_bruteforce(counts: CountsTable, noise: NoiseModel) -> Estimate:
    """Exhaustive maximum-likelihood estimate over all 2^n bitstrings.

    Evaluates the full shot likelihood of every candidate and takes the
    argmax, breaking ties toward the lexicographically smallest string.
    Exponential in n (capped at ``ENUM_MAX_QUBITS``); use the vote rules
    for anything large. Kept enumerative on purpose: this is the oracle the
    vote rules are checked against, so it must not share their shortcut.
    """
    best_k, best, second = _enumerate_scores(counts, noise, None)
    return Estimate(value=_bitstring_of(best_k, counts.n), method="ml", gap=best - second)


def map_estimate(counts: CountsTable, noise: NoiseModel, prior: Prior) -> Estimate:
    """Maximum a posteriori estimate under a prior.

    Table priors are folded into the exhaustive scan (strings absent from
    the table have prior zero). Independent per-qubit priors decide each
    qubit by adding the prior log-odds to that qubit's likelihood ratio;
    hard priors pi in {0, 1} force the bit regardless of observations.
    A uniform prior of either form reproduces the plain maximum-likelihood
    output exactly, ties included.
    """
    if not isinstance(prior, Prior):
        raise ValidationError(f"expected a Prior, got {type(prior).__name__}")
    if prior.n != counts.n:
        raise DimensionError(f"prior covers {prior.n} qubits, counts have {counts.n}")
    if prior.table is not None:
        return _map_table(counts, noise, prior)
    return _map_per_qubit(counts, noise, prior)


def _map_table(counts: CountsTable, noise: NoiseModel, prior: Prior) -> Estimate:
    values = set(prior.table.values())
    if len(values) == 1 and len(prior.table) == 2**counts.n:
        # Constant prior cannot move the argmax; reuse the plain scan so the
        # result is bit-identical to ml_bruteforce.
        best_k, best, second = _enumerate_scores(counts, noise, None)
        return Estimate(value=_bitstring_of(best_k, counts.n), method="map", gap=best - second)
    prior_logs = np.full(1 << counts.n, NEG_INF)
    for key, prob in prior.table.items():
        if prob > 0.0:
            prior_logs[int(key, 2)] = math.log(prob)
    best_k, best, second = _enumerate_scores(counts, noise, prior_logs)
    return Estimate(value=_bitstring_of(best_k, counts.n), method="map", gap=best - second)


def _map_per_qubit(counts: CountsTable, noise: NoiseModel, prior: Prior) -> Estimate:
    n = counts.n
    if noise.n != n:
        raise DimensionError(f"noise model covers {noise.n} qubits, counts have {n}")
    t = tally(counts)
    out = bytearray(n)
    for i in range(n):
        pi = float(prior.per_qubit[i])
        if pi == 0.0:
            out[i] = ord("0")
            continue
        if pi == 1.0:
            out[i] = ord("1")
            continue
        ll0, ll1 = _qubit_loglikelihoods(
            int(t.zeros[i]), int(t.ones[i]), float(noise.p01[i]), float(noise.p10[i])
        )
        post1 = ll1 + math.log(pi)
        post0 = ll0 + math.log1p(-pi)
        if post1 == NEG_INF and post0 == NEG_INF:
            # observations impossible under both hypotheses; fall back to the prior
            out[i] = ord("1") if pi > 0.5 else ord("0")
        else:
            # tie resolves to 0, keeping MAP in the lexicographic family
            out[i] = ord("1") if post1 > post0 else ord("0")
    return Estimate(value=out.decode("ascii"), method="map", margins=t.margins)


def sliding_window_antipodal(counts: CountsTable) -> AntipodalPair:
    """Reconstruct an antipodal output pair from adjacent-qubit agreement.

    Every window (i, i+1) votes between agreement patterns {00, 11} and
    disagreement patterns {01, 10}; ties count as agreement. Fixing the
    first bit to 0 and propagating the n-1 window relations yields one
    member of the pair, and its complement is the other. Works even when
    neither correct string was ever measured, since only pairwise
    agreement statistics enter.
    """
    n = counts.n
    if n < 2:
        raise ValidationError(f"antipodal windows need at least 2 qubits, got {n}")
    _, bits, weights = counts.as_arrays()
    agree = weights @ (bits[:, :-1] == bits[:, 1:])
    equal = 2 * agree >= counts.shots
    out = np.zeros(n, dtype=np.uint8)
    out[1:] = np.where(equal, 0, 1)
    out = np.bitwise_xor.accumulate(out)
    value = (out + ord("0")).astype(np.uint8).tobytes().decode("ascii")
    return AntipodalPair(x=value, x_complement=complement(value))
