"""Experiment harness: run configured estimators over simulated shot data
and report Hamming distances to the ground truth.

A configuration names a ground truth (explicit bitstring or a generator
pattern), a noise model, shot counts, estimators, and seeds. Every
(shots, seed) cell simulates one shot record and feeds it to each
estimator; rows record the Hamming distance of the estimate from the
truth. Reports come in two forms: canonical JSON (byte-stable across
reruns, so wall times are kept out of it) and CSV (which carries a
runtime_ms column). The numeric content shared by the two forms is
identical.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .ams import adaptive_vote
from .budget import per_qubit_target_bound, m3_shot_requirement, qmv_error_bound, required_shots
from .core import CountsTable, hamming_distance, tally
from .errors import InfeasibleError, ValidationError
from .estimators import (
    AntipodalPair,
    Prior,
    map_estimate,
    ml_bruteforce,
    mode_estimate,
    qmv,
    sliding_window_antipodal,
    weighted_vote,
)
from .noise import NoiseModel, derive_seed, simulate_antipodal_shots, simulate_shots

ESTIMATOR_NAMES = ("mode", "ml", "map", "qmv", "weighted", "window", "ams")

# Exhaustive-scan estimators stay desk-sized inside the harness.
HARNESS_ENUM_MAX_QUBITS = 20

GROUND_TRUTH_PATTERNS = ("alternating", "all-zeros", "ghz-antipodal")


def ground_truth_pattern(name: str, n: int) -> str:
    """Expand a named ground-truth pattern to n qubits."""
    if n < 1:
        raise ValidationError(f"pattern length must be positive, got {n}")
    if name == "alternating":
        return ("10" * ((n + 1) // 2))[:n]
    if name in ("all-zeros", "ghz-antipodal"):
        return "0" * n
    raise ValidationError(
        f"unknown ground-truth pattern {name!r}, expected one of {GROUND_TRUTH_PATTERNS}"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    ground_truth: str
    noise: NoiseModel
    shots: tuple[int, ...]
    estimators: tuple[str, ...]
    seeds: tuple[int, ...]
    antipodal: bool = False
    ams_tau: float | None = None
    ams_factor: float | None = None
    source: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.ground_truth)
        if self.noise.n != n:
            raise ValidationError(
                f"field 'noise' covers {self.noise.n} qubits, ground truth has {n}"
            )
        if not self.estimators:
            raise ValidationError("field 'estimators' must name at least one estimator")
        for est in self.estimators:
            if est not in ESTIMATOR_NAMES:
                raise ValidationError(
                    f"field 'estimators' contains {est!r}, expected one of {ESTIMATOR_NAMES}"
                )
        if not self.shots or any(s < 1 for s in self.shots):
            raise ValidationError("field 'shots' must list positive shot counts")
        if not self.seeds:
            raise ValidationError("field 'seeds' must list at least one seed")
        if "ml" in self.estimators and n > HARNESS_ENUM_MAX_QUBITS:
            raise InfeasibleError(
                f"estimator 'ml' scans 2^n strings and is limited to "
                f"{HARNESS_ENUM_MAX_QUBITS} qubits in experiments, got {n}"
            )
        if "window" in self.estimators and n < 2:
            raise InfeasibleError("estimator 'window' needs at least 2 qubits")
        if "ams" in self.estimators:
            if self.ams_tau is None or self.ams_factor is None:
                raise ValidationError(
                    "field 'ams' with tau and factor is required when the ams estimator is enabled"
                )
            if any(s % 2 for s in self.shots):
                raise InfeasibleError("estimator 'ams' splits the budget in half; shots must be even")

    @property
    def n(self) -> int:
        return len(self.ground_truth)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ValidationError("experiment config must be a JSON object")
        known = {"ground_truth", "noise", "shots", "estimators", "seeds", "ams"}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config fields {sorted(unknown)}")
        missing = [f for f in ("ground_truth", "noise", "shots", "estimators", "seeds") if f not in doc]
        if missing:
            raise ValidationError(f"missing config fields {missing}")

        truth_spec = doc["ground_truth"]
        antipodal = False
        if isinstance(truth_spec, str):
            truth = truth_spec
        elif isinstance(truth_spec, dict):
            pattern = truth_spec.get("pattern")
            n = truth_spec.get("n")
            if pattern is None or not isinstance(n, int) or isinstance(n, bool):
                raise ValidationError(
                    "field 'ground_truth' object form needs 'pattern' and integer 'n'"
                )
            truth = ground_truth_pattern(pattern, n)
            antipodal = pattern == "ghz-antipodal"
        else:
            raise ValidationError("field 'ground_truth' must be a bitstring or a pattern object")

        noise = _noise_from_dict(doc["noise"], len(truth))

        shots = doc["shots"]
        if not isinstance(shots, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in shots
        ):
            raise ValidationError("field 'shots' must be a list of integers")
        seeds = doc["seeds"]
        if not isinstance(seeds, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in seeds
        ):
            raise ValidationError("field 'seeds' must be a list of integers")
        estimators = doc["estimators"]
        if not isinstance(estimators, list):
            raise ValidationError("field 'estimators' must be a list")

        ams_tau = ams_factor = None
        if "ams" in doc:
            ams = doc["ams"]
            if not isinstance(ams, dict) or "tau" not in ams or "factor" not in ams:
                raise ValidationError("field 'ams' must be an object with 'tau' and 'factor'")
            ams_tau = float(ams["tau"])
            ams_factor = float(ams["factor"])

        return cls(
            ground_truth=truth,
            noise=noise,
            shots=tuple(shots),
            estimators=tuple(estimators),
            seeds=tuple(seeds),
            antipodal=antipodal,
            ams_tau=ams_tau,
            ams_factor=ams_factor,
            source=dict(doc),
        )

    @classmethod
    def from_json(cls, data: bytes | str) -> "ExperimentConfig":
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"experiment config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


def _noise_from_dict(spec: Any, n: int) -> NoiseModel:
    if not isinstance(spec, dict):
        raise ValidationError("field 'noise' must be an object")
    if "p" in spec:
        if set(spec) != {"p"}:
            raise ValidationError("field 'noise' with 'p' must not carry other keys")
        return NoiseModel.uniform(n, float(spec["p"]))
    if set(spec) == {"p01", "p10"}:
        p01, p10 = spec["p01"], spec["p10"]
        if isinstance(p01, list) != isinstance(p10, list):
            raise ValidationError("field 'noise' p01/p10 must both be scalars or both lists")
        if isinstance(p01, list):
            if len(p01) != n or len(p10) != n:
                raise ValidationError(f"field 'noise' per-qubit lists must have length {n}")
            return NoiseModel(p01=p01, p10=p10)
        return NoiseModel.uniform(n, float(p01), float(p10))
    raise ValidationError("field 'noise' must carry 'p' or both 'p01' and 'p10'")


@dataclass
class Report:
    """Experiment results: per-cell rows plus per-(estimator, shots)
    aggregates and the analytic budget figures when they apply."""

    config: dict
    rows: list[dict]
    aggregates: list[dict]
    budget: dict | None

    def to_json(self) -> str:
        """Canonical JSON form: sorted keys, no wall times, trailing newline.

        Byte-identical across reruns with the same config and seeds.
        """
        doc = {
            "schema_version": "1",
            "config": self.config,
            "rows": [{k: v for k, v in row.items() if k != "runtime_ms"} for row in self.rows],
            "aggregates": self.aggregates,
            "budget": self.budget,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Tabular form, one row per (estimator, S, seed) cell."""
        lines = ["estimator,S,seed,distance,runtime_ms"]
        for row in self.rows:
            lines.append(
                f"{row['estimator']},{row['shots']},{row['seed']},"
                f"{row['distance']},{row['runtime_ms']:.3f}"
            )
        return "\n".join(lines) + "\n"


def _pair_distance(value: str, truth: str) -> int:
    d = hamming_distance(value, truth)
    return min(d, len(truth) - d)


def _estimate_distance(result, truth: str, antipodal: bool) -> tuple[Any, int]:
    if isinstance(result, AntipodalPair):
        return [result.x, result.x_complement], _pair_distance(result.x, truth)
    if antipodal:
        return result.value, _pair_distance(result.value, truth)
    return result.value, hamming_distance(result.value, truth)


def _run_estimator(name: str, config: ExperimentConfig, counts: CountsTable, cell_seed: int):
    if name == "mode":
        return mode_estimate(counts)
    if name == "ml":
        return ml_bruteforce(counts, config.noise)
    if name == "map":
        return map_estimate(counts, config.noise, Prior.uniform(config.n))
    if name == "qmv":
        return qmv(tally(counts))
    if name == "weighted":
        return weighted_vote(tally(counts), config.noise)
    if name == "window":
        return sliding_window_antipodal(counts)
    if name == "ams":
        _, estimate = adaptive_vote(
            config.ground_truth,
            config.noise,
            config.ams_tau,
            counts.shots,
            config.ams_factor,
            seed=cell_seed,
        )
        return estimate
    raise ValidationError(f"unknown estimator {name!r}")


def _budget_section(config: ExperimentConfig) -> dict | None:
    noise = config.noise
    if config.n < 2 or not noise.is_symmetric:
        return None
    p = float(noise.p01[0])
    if not bool((noise.p01 == p).all()) or not p < 0.5:
        return None
    epsilon = 0.5 - p
    return {
        "p": p,
        "epsilon": epsilon,
        "required_shots": required_shots(config.n, epsilon),
        "per_qubit_target": per_qubit_target_bound(config.n, epsilon),
        "m3_shots_estimate": m3_shot_requirement(config.n, p),
        "qmv_error_bound": {
            str(s): (qmv_error_bound(s, p) if s % 2 == 0 and p > 0.0 else None)
            for s in config.shots
        },
    }


def run_experiment(config: ExperimentConfig) -> Report:
    """Execute every (shots, seed, estimator) cell of a configuration.

    Deterministic given the config: each cell derives its stream from
    (seed, shots), every estimator in the cell sees the same simulated
    counts, and the ams estimator spends the same total budget on its own
    two-phase schedule.
    """
    truth = config.ground_truth
    rows = []
    for shots in config.shots:
        for seed in config.seeds:
            cell_seed = derive_seed(seed, "cell", shots)
            if config.antipodal:
                counts = simulate_antipodal_shots(truth, config.noise, shots, cell_seed)
            else:
                counts = simulate_shots(truth, config.noise, shots, cell_seed)
            for name in config.estimators:
                start = time.perf_counter()
                result = _run_estimator(name, config, counts, cell_seed)
                elapsed_ms = (time.perf_counter() - start) * 1e3
                estimate, distance = _estimate_distance(result, truth, config.antipodal)
                rows.append(
                    {
                        "estimator": name,
                        "shots": shots,
                        "seed": seed,
                        "estimate": estimate,
                        "distance": distance,
                        "runtime_ms": elapsed_ms,
                    }
                )
    rows.sort(key=lambda r: (r["estimator"], r["shots"], r["seed"]))

    aggregates = []
    for name in sorted(set(config.estimators)):
        for shots in config.shots:
            dists = [r["distance"] for r in rows if r["estimator"] == name and r["shots"] == shots]
            aggregates.append(
                {
                    "estimator": name,
                    "shots": shots,
                    "mean_distance": sum(dists) / len(dists),
                    "min_distance": min(dists),
                    "max_distance": max(dists),
                }
            )

    config_echo = {
        "ground_truth": truth,
        "antipodal": config.antipodal,
        "noise": {"p01": config.noise.p01.tolist(), "p10": config.noise.p10.tolist()},
        "shots": list(config.shots),
        "estimators": list(config.estimators),
        "seeds": list(config.seeds),
        "ams": (
            {"tau": config.ams_tau, "factor": config.ams_factor}
            if config.ams_tau is not None
            else None
        ),
    }
    return Report(
        config=config_echo,
        rows=rows,
        aggregates=aggregates,
        budget=_budget_section(config),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    return ExperimentConfig.from_json(Path(path).read_bytes())
