"""Synthetic benchmark harness.

Three instance scenarios mirror the accuracy study this package
reproduces: ``fixed5c3`` (5 shots, pick 3, fully labeled), ``random5c3``
(labels independently dropped), and ``extended-random`` (5-10 shots, pick
3-7, labels dropped). Accuracy of an algorithm is the fraction of
instances whose best energy matches the exhaustive oracle within 1e-9.

Instances are generated from per-instance generators derived from
``(master seed, scenario, instance index)`` and every algorithm run gets
its own derived seed, so results are byte-identical no matter how many
worker processes evaluate them or which algorithm subset runs.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catalog import LabelSequence, MotionType, Shot, ShotCatalog, ShotSize
from .continuous import ContinuousConfig, continuous_langevin
from .discrete import (
    OptimizerConfig,
    beam_search,
    genetic,
    langevin_bs,
    langevin_ga,
    oracle_best_energy,
)
from .energy import EnergySpec, Sequence, sequence_labels
from .errors import NoTransitionsError
from .syntax import (
    builtin_motion_matrix,
    builtin_shot_size_matrix,
    learn_transition_matrix,
    matrix_mse,
    sequence_style_matrix,
)

SCENARIO_KINDS = ("fixed5c3", "random5c3", "extended-random")
DEFAULT_SAMPLES = {"fixed5c3": 60, "random5c3": 200, "extended-random": 240}
DEFAULT_P_DROP = 0.2

ALGORITHMS = ("oracle", "continuous", "bs", "ga", "langevin-bs", "langevin-ga")
_ALGO_ORDINAL = {name: i for i, name in enumerate(ALGORITHMS)}
_SCENARIO_ORDINAL = {kind: i for i, kind in enumerate(SCENARIO_KINDS)}

_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    kind: str
    samples: int = 0
    p_drop: float = DEFAULT_P_DROP

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario {self.kind!r}; choose from {SCENARIO_KINDS}")
        if self.samples == 0:
            object.__setattr__(self, "samples", DEFAULT_SAMPLES[self.kind])
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not 0.0 <= self.p_drop <= 1.0:
            raise ValueError("p_drop must lie in [0, 1]")


def _syntax_spec() -> EnergySpec:
    return EnergySpec(
        alpha=0.5,
        beta=0.5,
        gamma=0.0,
        size_matrix=builtin_shot_size_matrix(),
        motion_matrix=builtin_motion_matrix(),
    )


_EXTENDED_PAIRS = tuple((n, k) for n in range(5, 11) for k in range(3, 8) if k <= n)


def generate_instance(scenario: Scenario, rng) -> tuple[ShotCatalog, int, EnergySpec]:
    """One synthetic instance with uniform random labels.

    ``random5c3`` additionally drops each label independently with
    ``p_drop``; the other scenarios keep every label (the extended scenario
    is defined by its larger sizes, not by missing labels).

    Draw order: (extended only) the (N, K) pair index, then sizes, motions,
    and (random5c3 only) the two per-shot drop vectors.
    """
    if scenario.kind == "extended-random":
        n, k = _EXTENDED_PAIRS[int(rng.integers(0, len(_EXTENDED_PAIRS)))]
    else:
        n, k = 5, 3
    sizes = rng.integers(0, len(ShotSize), size=n)
    motions = rng.integers(0, len(MotionType), size=n)
    if scenario.kind == "random5c3":
        size_drop = rng.random(n) < scenario.p_drop
        motion_drop = rng.random(n) < scenario.p_drop
    else:
        size_drop = motion_drop = np.zeros(n, dtype=bool)
    shots = tuple(
        Shot(
            id=f"s{i:02d}",
            shot_size=None if size_drop[i] else ShotSize(int(sizes[i])),
            motion=None if motion_drop[i] else MotionType(int(motions[i])),
        )
        for i in range(n)
    )
    return ShotCatalog(shots=shots), k, _syntax_spec()


def generate_planted_instance(n: int, k: int, rng) -> tuple[ShotCatalog, int, EnergySpec, Sequence, float]:
    """Instance with a known strict optimum of energy ``-(k-1)``.

    The planted shots are labeled (MS, UP): MS->MS and UP->UP both score
    1.0, so any ordering of them scores ``k-1`` at half/half weights.
    Decoys are labeled (CU, DOWN); every transition touching a decoy
    scores strictly below 1.0, so no sequence using one can tie.
    """
    if k > n:
        raise ValueError("planted instance needs k <= n")
    perm = rng.permutation(n)
    planted_idx = set(int(i) for i in perm[:k])
    shots = tuple(
        Shot(
            id=f"s{i:02d}",
            shot_size=ShotSize.MS if i in planted_idx else ShotSize.CU,
            motion=MotionType.UP if i in planted_idx else MotionType.DOWN,
        )
        for i in range(n)
    )
    catalog = ShotCatalog(shots=shots)
    planted = Sequence(shot_ids=tuple(f"s{int(i):02d}" for i in perm[:k]))
    return catalog, k, _syntax_spec(), planted, float(-(k - 1))


def _derived_seed(master: int, scenario_kind: str, index: int, algorithm: str) -> int:
    ss = np.random.SeedSequence(
        [master, _SCENARIO_ORDINAL[scenario_kind], index, 1000 + _ALGO_ORDINAL[algorithm]]
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _instance_rng(master: int, scenario_kind: str, index: int):
    return np.random.default_rng(
        np.random.SeedSequence([master, _SCENARIO_ORDINAL[scenario_kind], index])
    )


_RUNNERS = {
    "bs": beam_search,
    "ga": genetic,
    "langevin-bs": langevin_bs,
    "langevin-ga": langevin_ga,
}


def _run_one(algorithm: str, catalog, k, spec, seed: int,
             cfg: OptimizerConfig, ccfg: ContinuousConfig) -> float:
    if algorithm == "oracle":
        return oracle_best_energy(catalog, k, spec)
    if algorithm == "continuous":
        return continuous_langevin(catalog, k, spec, dataclasses.replace(ccfg, seed=seed)).best_energy
    runner = _RUNNERS[algorithm]
    return runner(catalog, k, spec, dataclasses.replace(cfg, seed=seed)).best_energy


def _instance_record(task) -> dict:
    master, scenario, index, algorithms, cfg, ccfg = task
    rng = _instance_rng(master, scenario.kind, index)
    catalog, k, spec = generate_instance(scenario, rng)
    oracle = oracle_best_energy(catalog, k, spec)
    results = {}
    for name in algorithms:
        if name == "oracle":
            energy = oracle
        else:
            seed = _derived_seed(master, scenario.kind, index, name)
            energy = _run_one(name, catalog, k, spec, seed, cfg, ccfg)
        results[name] = {
            "energy": None if math.isinf(energy) else energy,
            "match": bool(abs(energy - oracle) <= _MATCH_TOL),
        }
    return {
        "scenario": scenario.kind,
        "index": index,
        "n": len(catalog),
        "k": k,
        "oracle_energy": oracle,
        "results": results,
    }


@dataclass(frozen=True)
class AblationRow:
    algorithm: str
    scenario: str
    samples: int
    accuracy: float


@dataclass(frozen=True)
class AblationTable:
    rows: tuple[AblationRow, ...]
    records: tuple[dict, ...]
    metadata: dict

    def accuracy(self, algorithm: str, scenario: str) -> float:
        for row in self.rows:
            if row.algorithm == algorithm and row.scenario == scenario:
                return row.accuracy
        raise KeyError(f"no row for {algorithm!r} on {scenario!r}")

    def to_csv(self) -> str:
        lines = ["algorithm,scenario,samples,accuracy"]
        for row in self.rows:
            lines.append(f"{row.algorithm},{row.scenario},{row.samples},{row.accuracy:.6f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "metadata": self.metadata,
            "rows": [dataclasses.asdict(row) for row in self.rows],
            "records": list(self.records),
        }
        return json.dumps(doc, indent=2) + "\n"


def run_ablation(algorithms, scenarios, cfg: OptimizerConfig | None = None, seed: int = 0,
                 continuous_cfg: ContinuousConfig | None = None,
                 workers: int | None = None) -> AblationTable:
    """Accuracy of each algorithm against the oracle, per scenario.

    Instances run across a process pool (``workers=None`` uses the CPU
    count); aggregation is index-ordered so the output never depends on
    parallelism.
    """
    algorithms = list(algorithms)
    for name in algorithms:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
    scenarios = [s if isinstance(s, Scenario) else Scenario(kind=s) for s in scenarios]
    cfg = cfg or OptimizerConfig()
    ccfg = continuous_cfg or ContinuousConfig(iters=cfg.max_iters)

    tasks = [
        (seed, scenario, index, algorithms, cfg, ccfg)
        for scenario in scenarios
        for index in range(scenario.samples)
    ]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_instance_record, tasks, chunksize=8))
    else:
        records = [_instance_record(t) for t in tasks]

    rows = []
    for scenario in scenarios:
        scoped = [r for r in records if r["scenario"] == scenario.kind]
        for name in algorithms:
            matches = sum(1 for r in scoped if r["results"][name]["match"])
            rows.append(
                AblationRow(
                    algorithm=name,
                    scenario=scenario.kind,
                    samples=scenario.samples,
                    accuracy=matches / scenario.samples,
                )
            )
    metadata = {
        "seed": seed,
        "max_iters": cfg.max_iters,
        "optimizer": dataclasses.asdict(cfg),
        "continuous": dataclasses.asdict(ccfg),
        "scenarios": [dataclasses.asdict(s) for s in scenarios],
    }
    return AblationTable(rows=tuple(rows), records=tuple(records), metadata=metadata)


@dataclass(frozen=True)
class StyleMse:
    size_mse: float | None
    motion_mse: float | None


def evaluate_style(output_labels: LabelSequence, reference_labels: LabelSequence) -> StyleMse:
    """MSE between the style matrices of an output and a reference.

    Alphabets without at least one transition on both sides are reported
    as ``None``; if neither alphabet is evaluable the error propagates.
    """
    values: dict[str, float | None] = {}
    for alphabet in ("size", "motion"):
        try:
            out = sequence_style_matrix(output_labels, alphabet)
            ref = sequence_style_matrix(reference_labels, alphabet)
            values[alphabet] = matrix_mse(out, ref)
        except NoTransitionsError:
            values[alphabet] = None
    if values["size"] is None and values["motion"] is None:
        raise NoTransitionsError("neither alphabet yields transitions in both sequences")
    return StyleMse(size_mse=values["size"], motion_mse=values["motion"])


def _style_walk(rng, alphabet_size: int, length: int, follow: float = 0.85) -> list[int]:
    """Random label walk with a planted cyclic pattern over a small subset."""
    m = int(rng.integers(2, 4))
    cycle = [int(v) for v in rng.choice(alphabet_size, size=m, replace=False)]
    walk = [cycle[0]]
    pos = 0
    for _ in range(length - 1):
        if rng.random() < follow:
            pos = (pos + 1) % m
            walk.append(cycle[pos])
        else:
            walk.append(int(rng.integers(0, alphabet_size)))
    return walk


@dataclass(frozen=True)
class StyleTrendRecord:
    index: int
    opt_size_mse: float
    opt_motion_mse: float
    random_size_mse_mean: float
    random_motion_mse_mean: float
    opt_below_random: bool


def style_trend_experiment(n_instances: int = 50, n_random: int = 100, n_shots: int = 20,
                           k: int = 8, ref_len: int = 40, max_iters: int = 300,
                           seed: int = 0) -> list[StyleTrendRecord]:
    """Style-emulation trend: optimize against matrices learned from a
    patterned reference and compare the output's style MSE with the mean
    over uniformly random valid assemblies."""
    records = []
    for index in range(n_instances):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 7, index]))
        sizes = _style_walk(rng, len(ShotSize), ref_len)
        motions = _style_walk(rng, len(MotionType), ref_len)
        reference = LabelSequence(
            entries=tuple((ShotSize(s), MotionType(m)) for s, m in zip(sizes, motions))
        )
        spec = EnergySpec(
            alpha=0.5,
            beta=0.5,
            gamma=0.0,
            size_matrix=learn_transition_matrix(reference, "size"),
            motion_matrix=learn_transition_matrix(reference, "motion"),
        )
        shot_sizes = rng.integers(0, len(ShotSize), size=n_shots)
        shot_motions = rng.integers(0, len(MotionType), size=n_shots)
        catalog = ShotCatalog(
            shots=tuple(
                Shot(id=f"s{i:02d}", shot_size=ShotSize(int(shot_sizes[i])),
                     motion=MotionType(int(shot_motions[i])))
                for i in range(n_shots)
            )
        )
        cfg = OptimizerConfig(max_iters=max_iters, seed=_derived_seed(seed, "fixed5c3", index, "langevin-ga"))
        result = langevin_ga(catalog, k, spec, cfg)
        opt = evaluate_style(sequence_labels(result.best_sequences[0], catalog), reference)

        size_samples = []
        motion_samples = []
        for _ in range(n_random):
            row = rng.choice(n_shots, size=k, replace=False)
            labels = sequence_labels(
                Sequence(shot_ids=tuple(f"s{int(i):02d}" for i in row)), catalog
            )
            sample = evaluate_style(labels, reference)
            size_samples.append(sample.size_mse)
            motion_samples.append(sample.motion_mse)
        rand_size = float(np.mean(size_samples))
        rand_motion = float(np.mean(motion_samples))
        records.append(
            StyleTrendRecord(
                index=index,
                opt_size_mse=opt.size_mse,
                opt_motion_mse=opt.motion_mse,
                random_size_mse_mean=rand_size,
                random_motion_mse_mean=rand_motion,
                opt_below_random=bool(opt.size_mse < rand_size and opt.motion_mse < rand_motion),
            )
        )
    return records
