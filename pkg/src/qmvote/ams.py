"""Adaptive measurement subsetting: respend half the shot budget on the
qubits whose first-phase vote was close.

Phase 1 measures every qubit with half the budget, k = S/2. Qubits whose
empirical vote margin |p0 - p1| falls below a threshold are then measured
one per subset circuit, k/m shots each for m close qubits, under reduced
flip probabilities (a small measured subset maps to better physical qubits
and suffers less crosstalk; the improvement is modeled by an explicit
``subset_noise_factor``). The final estimate fuses both phases per qubit
by adding their log-likelihood contributions, each phase evaluated under
its own noise parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import VoteTally, tally, validate_bitstring
from .errors import DimensionError, ValidationError
from .estimators import Estimate, _qubit_loglikelihoods
from .noise import NoiseModel, derive_seed, simulate_shots

# Below this many shots per subset circuit the second phase is too thin to
# trust; the plan still executes but is flagged.
MIN_SUBSET_SHOTS = 100

MERGE_MODES = ("pool", "replace")


@dataclass(frozen=True)
class AmsPlan:
    """Shot allocation for one two-phase run.

    ``close_qubits`` uses 0-based indices. With no close qubits the plan
    degenerates: the full budget is pooled into one all-qubit measurement
    and the vote runs on that. ``insufficient`` flags plans whose subset
    circuits fall below ``MIN_SUBSET_SHOTS`` shots each.
    """

    n: int
    tau: float
    total_shots: int
    phase1_shots: int
    close_qubits: tuple[int, ...]
    per_subset_shots: int
    subset_layout: tuple[tuple[int, ...], ...]
    insufficient: bool

    @property
    def subset_count(self) -> int:
        return len(self.close_qubits)


@dataclass(frozen=True)
class SubsetResult:
    """Zero/one counts from one single-qubit subset circuit."""

    qubit: int
    zeros: int
    ones: int

    @property
    def shots(self) -> int:
        return self.zeros + self.ones


def ams_plan(vote_tally: VoteTally, tau: float, total_shots: int) -> AmsPlan:
    """Build the phase-2 allocation from a phase-1 tally.

    The tally must come from a half-budget run (total_shots / 2 shots).
    Close qubits are those with |N0 - N1| / k strictly below ``tau``; each
    gets one subset circuit with k // m shots, any remainder staying
    unspent so the total budget is never exceeded.
    """
    if not isinstance(vote_tally, VoteTally):
        raise ValidationError(f"expected a VoteTally, got {type(vote_tally).__name__}")
    if not 0.0 < tau < 1.0:
        raise ValidationError(f"tau must lie strictly inside (0, 1), got {tau}")
    if not isinstance(total_shots, int) or isinstance(total_shots, bool) or total_shots < 2:
        raise ValidationError(f"total_shots must be an integer >= 2, got {total_shots!r}")
    if total_shots % 2:
        raise ValidationError(f"total_shots must be even to split in half, got {total_shots}")
    k = total_shots // 2
    if vote_tally.shots != k:
        raise ValidationError(
            f"phase-1 tally covers {vote_tally.shots} shots, expected half the budget ({k})"
        )
    close = tuple(int(i) for i in np.flatnonzero(vote_tally.margins < tau))
    m = len(close)
    per_subset = k // m if m else 0
    return AmsPlan(
        n=vote_tally.n,
        tau=tau,
        total_shots=total_shots,
        phase1_shots=k,
        close_qubits=close,
        per_subset_shots=per_subset,
        subset_layout=tuple((q,) for q in close),
        insufficient=m > 0 and per_subset < MIN_SUBSET_SHOTS,
    )


def _decide_qubit(
    phase1: tuple[int, int, float, float],
    subset: tuple[int, int, float, float] | None,
    merge: str,
) -> str:
    """Fuse per-phase evidence for one qubit and vote; ties resolve to 1.

    Each evidence tuple is (zeros, ones, p01, p10) evaluated under that
    phase's own noise parameters.
    """
    sources = []
    if merge == "pool" or subset is None:
        sources.append(phase1)
    if subset is not None:
        sources.append(subset)
    ll0 = ll1 = 0.0
    for zeros, ones, p01, p10 in sources:
        c0, c1 = _qubit_loglikelihoods(zeros, ones, p01, p10)
        ll0 += c0
        ll1 += c1
    return "0" if ll0 > ll1 else "1"


def merge_votes(
    phase1_tally: VoteTally,
    noise: NoiseModel,
    subsets: list[SubsetResult],
    subset_noise: NoiseModel,
    merge: str = "pool",
) -> str:
    """Combine phase-1 and subset evidence into a final bitstring.

    Qubits without a subset run are decided by a weighted vote on the
    phase-1 tally alone. ``merge="pool"`` adds both phases' log-likelihood
    contributions for subset qubits; ``merge="replace"`` lets the subset
    evidence alone decide them.
    """
    if merge not in MERGE_MODES:
        raise ValidationError(f"merge must be one of {MERGE_MODES}, got {merge!r}")
    if noise.n != phase1_tally.n or subset_noise.n != phase1_tally.n:
        raise DimensionError("noise models must cover the same qubits as the tally")
    by_qubit = {s.qubit: s for s in subsets}
    out = []
    for i in range(phase1_tally.n):
        phase1 = (
            int(phase1_tally.zeros[i]),
            int(phase1_tally.ones[i]),
            float(noise.p01[i]),
            float(noise.p10[i]),
        )
        sub = by_qubit.get(i)
        subset = None
        if sub is not None:
            subset = (sub.zeros, sub.ones, float(subset_noise.p01[i]), float(subset_noise.p10[i]))
        out.append(_decide_qubit(phase1, subset, merge))
    return "".join(out)


def _scaled_noise(noise: NoiseModel, factor: float) -> NoiseModel:
    return NoiseModel(p01=noise.p01 * factor, p10=noise.p10 * factor)


def ams_execute(
    x0: str,
    noise: NoiseModel,
    plan: AmsPlan,
    subset_noise_factor: float = 0.5,
    seed: int = 0,
    merge: str = "pool",
) -> Estimate:
    """Simulate the two-phase run described by ``plan`` and estimate x0.

    Phase 1 draws ``plan.phase1_shots`` full-width shots under ``noise``;
    each subset circuit draws ``plan.per_subset_shots`` single-qubit shots
    with that qubit's flip probabilities scaled by ``subset_noise_factor``.
    Streams derive deterministically from the seed, the phase, and the
    qubit index, so subset circuits may run in any order or in parallel.
    """
    validate_bitstring(x0, plan.n)
    if noise.n != plan.n:
        raise DimensionError(f"noise model covers {noise.n} qubits, plan has {plan.n}")
    if not 0.0 < subset_noise_factor <= 1.0:
        raise ValidationError(
            f"subset_noise_factor must lie in (0, 1], got {subset_noise_factor}"
        )
    if merge not in MERGE_MODES:
        raise ValidationError(f"merge must be one of {MERGE_MODES}, got {merge!r}")

    if plan.subset_count == 0:
        # Degenerate plan: one all-qubit measurement spending the full budget.
        counts = simulate_shots(x0, noise, plan.total_shots, derive_seed(seed, "phase1"))
        pooled = tally(counts)
        value = merge_votes(pooled, noise, [], _scaled_noise(noise, subset_noise_factor), merge)
        return Estimate(value=value, method="ams", margins=pooled.margins)

    phase1_counts = simulate_shots(x0, noise, plan.phase1_shots, derive_seed(seed, "phase1"))
    phase1 = tally(phase1_counts)
    subset_noise = _scaled_noise(noise, subset_noise_factor)
    subsets = []
    for q in plan.close_qubits:
        circuit_noise = NoiseModel(
            p01=subset_noise.p01[q : q + 1], p10=subset_noise.p10[q : q + 1]
        )
        counts = simulate_shots(
            x0[q], circuit_noise, plan.per_subset_shots, derive_seed(seed, "subset", q)
        )
        ones = sum(c for key, c in counts.items() if key == "1")
        subsets.append(SubsetResult(qubit=q, zeros=counts.shots - ones, ones=ones))

    value = merge_votes(phase1, noise, subsets, subset_noise, merge)

    # Informational margins: pooled counts where a subset ran, phase 1 alone
    # elsewhere.
    zeros = phase1.zeros.astype(np.int64).copy()
    ones = phase1.ones.astype(np.int64).copy()
    shots_per_qubit = np.full(plan.n, phase1.shots, dtype=np.int64)
    for s in subsets:
        zeros[s.qubit] += s.zeros
        ones[s.qubit] += s.ones
        shots_per_qubit[s.qubit] += s.shots
    margins = np.abs(zeros - ones) / shots_per_qubit
    return Estimate(value=value, method="ams", margins=margins)


def adaptive_vote(
    x0: str,
    noise: NoiseModel,
    tau: float,
    total_shots: int,
    subset_noise_factor: float = 0.5,
    seed: int = 0,
    merge: str = "pool",
) -> tuple[AmsPlan, Estimate]:
    """Full adaptive run: simulate phase 1, plan the subsets, execute.

    The plan is built from the same phase-1 stream the execution replays,
    so the whole procedure consumes exactly one budget of ``total_shots``.
    """
    if total_shots < 2 or total_shots % 2:
        raise ValidationError(f"total_shots must be even and >= 2, got {total_shots}")
    k = total_shots // 2
    phase1_counts = simulate_shots(x0, noise, k, derive_seed(seed, "phase1"))
    plan = ams_plan(tally(phase1_counts), tau, total_shots)
    estimate = ams_execute(x0, noise, plan, subset_noise_factor, seed, merge)
    return plan, estimate
