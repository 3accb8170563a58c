"""Labelled scene graphs for training: random states labelled by the oracle, stored as JSON lines."""

from __future__ import annotations

import json
import random
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from anticipatory_tamp.domain import rules
from anticipatory_tamp.errors import RefinementFailure, SchemaMismatchError, ScenarioError
from anticipatory_tamp.harness.seeds import derive_seed
from anticipatory_tamp.learning import oracle
from anticipatory_tamp.learning.scene_graph import SceneGraph, encode_state, schema_hash
from anticipatory_tamp.models.types import Domain, Scenario, SolverConfig, WorldState
from anticipatory_tamp.planning import solver

DATASET_FORMAT = "anticipatory-tamp-dataset"
DATASET_VERSION = 1


@dataclass(frozen=True)
class Sample:
    graph: SceneGraph
    label: float
    state_seed: int
    oracle_seed: int


@dataclass
class Dataset:
    domain: Domain
    scenario: str
    samples_per_task: int
    schema: str = field(default_factory=schema_hash)
    samples: list[Sample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def labels(self) -> list[float]:
        return [s.label for s in self.samples]

    def split(self, fraction: float, seed: int = 0) -> tuple[Dataset, Dataset]:
        """Shuffled (train, held-out) split; the held-out part gets ``fraction`` of the samples."""
        order = list(range(len(self.samples)))
        random.Random(seed).shuffle(order)
        n_held = int(round(fraction * len(order)))
        if len(order) > 1:
            n_held = min(max(n_held, 1 if fraction > 0 else 0), len(order) - 1)
        else:
            n_held = 0
        held = [self.samples[i] for i in order[:n_held]]
        train = [self.samples[i] for i in order[n_held:]]
        return self._with(train), self._with(held)

    def _with(self, samples: list[Sample]) -> Dataset:
        return Dataset(self.domain, self.scenario, self.samples_per_task, self.schema, samples)


def sample_state(scenario: Scenario, base_seed: int, index: int) -> tuple[WorldState, int]:
    """Random valid state number ``index``; a failed draw is retried under a fresh derived seed."""
    for attempt in range(rules.STATE_RETRY_BUDGET):
        seed = derive_seed(base_seed, "state", index, attempt)
        try:
            return solver.random_state(scenario, random.Random(seed)), seed
        except RefinementFailure:
            continue
    raise ScenarioError(f"could not sample state {index} in '{scenario.name}'")


def generate_dataset(
    scenario: Scenario,
    n: int,
    base_seed: int,
    samples_per_task: int = rules.ORACLE_SAMPLES_PER_TASK,
    config: SolverConfig | None = None,
    workers: int = 1,
    on_sample: Callable[[int], None] | None = None,
) -> Dataset:
    """``n`` oracle-labelled random states, reproducible from ``base_seed`` regardless of ``workers``."""
    if n < 1:
        raise ValueError(f"dataset size must be at least 1, got {n}")
    distribution = solver.task_distribution(scenario)

    def _one(i: int) -> Sample:
        state, state_seed = sample_state(scenario, base_seed, i)
        oracle_seed = derive_seed(base_seed, "oracle", i)
        label = oracle.oracle_vap(scenario, state, distribution, config, samples_per_task, oracle_seed)
        if on_sample is not None:
            on_sample(i)
        return Sample(encode_state(scenario, state), label, state_seed, oracle_seed)

    if workers <= 1:
        samples = [_one(i) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_one, range(n)))
    return Dataset(scenario.domain, scenario.name, samples_per_task, samples=samples)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def save_dataset(dataset: Dataset, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "domain": str(dataset.domain),
        "scenario": dataset.scenario,
        "schema": dataset.schema,
        "samples_per_task": dataset.samples_per_task,
        "count": len(dataset),
    }
    with path.open("w") as f:
        f.write(json.dumps(header) + "\n")
        for s in dataset.samples:
            record = {"label": s.label, "state_seed": s.state_seed, "oracle_seed": s.oracle_seed, **s.graph.to_record()}
            f.write(json.dumps(record) + "\n")


def load_dataset(path: Path) -> Dataset:
    if not path.exists():
        raise ScenarioError(f"dataset file not found: {path}")
    with path.open() as f:
        lines = [line for line in f if line.strip()]
    if not lines:
        raise ScenarioError(f"empty dataset file: {path}")
    header = json.loads(lines[0])
    if header.get("format") != DATASET_FORMAT or header.get("version") != DATASET_VERSION:
        raise ScenarioError(f"{path} is not a version {DATASET_VERSION} dataset")
    if header["schema"] != schema_hash():
        raise SchemaMismatchError(f"{path} uses feature schema {header['schema']}, expected {schema_hash()}")
    samples = []
    for line in lines[1:]:
        record = json.loads(line)
        samples.append(
            Sample(
                graph=SceneGraph.from_record(record),
                label=float(record["label"]),
                state_seed=int(record["state_seed"]),
                oracle_seed=int(record["oracle_seed"]),
            )
        )
    if len(samples) != header["count"]:
        raise ScenarioError(f"{path} declares {header['count']} samples but holds {len(samples)}")
    return Dataset(
        domain=Domain(header["domain"]),
        scenario=header["scenario"],
        samples_per_task=int(header["samples_per_task"]),
        schema=header["schema"],
        samples=samples,
    )
