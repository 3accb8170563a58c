"""Fit, evaluate, persist and serve the scene-graph cost regressor."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field
from rich.console import Console
from scipy.stats import spearmanr

from anticipatory_tamp.domain import rules
from anticipatory_tamp.errors import SchemaMismatchError, ScenarioError, TrainingDivergenceError
from anticipatory_tamp.learning.dataset import Dataset
from anticipatory_tamp.learning.gnn import GraphRegressor
from anticipatory_tamp.learning.scene_graph import EDGE_DIM, NODE_DIM, SceneGraph, encode_state, schema_hash
from anticipatory_tamp.models.types import Domain, Scenario, WorldState

console = Console(stderr=True)

CHECKPOINT_FORMAT = "anticipatory-tamp-model"
CHECKPOINT_VERSION = 1


class TrainingConfig(BaseModel):
    batch_size: int = Field(rules.BATCH_SIZE, ge=1)
    epochs: int = Field(rules.EPOCHS, ge=1)
    learning_rate: float = Field(rules.LEARNING_RATE, gt=0.0)
    hidden: int = Field(rules.HIDDEN_WIDTH, ge=1)
    layers: int = Field(rules.N_LAYERS, ge=1)
    validation_fraction: float = Field(rules.VALIDATION_FRACTION, ge=0.0, lt=1.0)
    seed: int = 0


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Normalizer:
    node_mean: np.ndarray
    node_std: np.ndarray
    edge_mean: np.ndarray
    edge_std: np.ndarray
    label_mean: float
    label_std: float

    @classmethod
    def fit(cls, graphs: list[SceneGraph], labels: list[float]) -> Normalizer:
        nodes = np.concatenate([g.nodes for g in graphs])
        edges = np.concatenate([g.edge_features for g in graphs] + [np.zeros((0, EDGE_DIM))])
        edge_mean = edges.mean(axis=0) if len(edges) else np.zeros(EDGE_DIM)
        edge_std = edges.std(axis=0) if len(edges) else np.ones(EDGE_DIM)
        y = np.asarray(labels, dtype=float)
        return cls(
            node_mean=nodes.mean(axis=0),
            node_std=_safe_std(nodes.std(axis=0)),
            edge_mean=edge_mean,
            edge_std=_safe_std(edge_std),
            label_mean=float(y.mean()),
            label_std=float(_safe_std(np.asarray(y.std()))),
        )

    def inputs(self, graph: SceneGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if graph.nodes.shape[1] != NODE_DIM or graph.edge_features.shape[1] != EDGE_DIM:
            raise SchemaMismatchError(
                f"graph features {graph.nodes.shape[1]}/{graph.edge_features.shape[1]}, "
                f"model expects {NODE_DIM}/{EDGE_DIM}"
            )
        x = (graph.nodes - self.node_mean) / self.node_std
        normalized = SceneGraph(graph.node_ids, x, graph.edges, (graph.edge_features - self.edge_mean) / self.edge_std)
        e, mask = normalized.dense()
        return x, e, mask

    def target(self, label: float) -> float:
        return (label - self.label_mean) / self.label_std

    def label(self, output: float) -> float:
        return output * self.label_std + self.label_mean


def _safe_std(std: np.ndarray) -> np.ndarray:
    return np.where(std > 1e-12, std, 1.0)


@dataclass(frozen=True)
class EstimatorModel:
    regressor: GraphRegressor
    normalizer: Normalizer
    domain: Domain
    schema: str = field(default_factory=schema_hash)

    def predict(self, graph: SceneGraph) -> float:
        return self.normalizer.label(self.regressor.predict(*self.normalizer.inputs(graph)))


def estimate(model: EstimatorModel, scenario: Scenario, state: WorldState) -> float:
    if model.schema != schema_hash():
        raise SchemaMismatchError(f"model schema {model.schema} does not match {schema_hash()}")
    if model.domain != scenario.domain:
        raise SchemaMismatchError(f"model trained on {model.domain}, scenario is {scenario.domain}")
    return model.predict(encode_state(scenario, state))


class LearnedEstimator:
    """CostEstimator backed by a trained model. Negative outputs are clipped to zero."""

    def __init__(self, model: EstimatorModel, scenario: Scenario):
        self.model = model
        self.scenario = scenario
        estimate(model, scenario, scenario.initial_state())

    def estimate(self, state: WorldState) -> float:
        return max(0.0, estimate(self.model, self.scenario, state))


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    train_mae: float
    validation_mae: float | None


@dataclass
class TrainingResult:
    model: EstimatorModel
    history: list[EpochLog]
    train_size: int
    validation_size: int


def _adagrad_step(params: dict, grads: dict, accum: dict, lr: float) -> None:
    for name, g in grads.items():
        accum[name] += g * g
        params[name] -= lr * g / (np.sqrt(accum[name]) + rules.ADAGRAD_EPS)


def _mae(model: EstimatorModel, samples: list[tuple]) -> float:
    errors = [abs(model.regressor.predict(x, e, m) - t) for x, e, m, t in samples]
    return float(np.mean(errors)) * model.normalizer.label_std


def train(dataset: Dataset, config: TrainingConfig | None = None, verbose: bool = False) -> TrainingResult:
    """Mean-absolute-error regression with AdaGrad over shuffled minibatches."""
    config = config or TrainingConfig()
    if not len(dataset):
        raise ScenarioError("cannot train on an empty dataset")
    if dataset.schema != schema_hash():
        raise SchemaMismatchError(f"dataset schema {dataset.schema} does not match {schema_hash()}")
    train_set, held_out = dataset.split(config.validation_fraction, config.seed)
    normalizer = Normalizer.fit([s.graph for s in train_set.samples], train_set.labels)
    regressor = GraphRegressor.initialize(NODE_DIM, EDGE_DIM, config.hidden, config.layers, config.seed)
    model = EstimatorModel(regressor, normalizer, dataset.domain)

    def prepared(ds: Dataset) -> list[tuple]:
        return [(*normalizer.inputs(s.graph), normalizer.target(s.label)) for s in ds.samples]

    train_data, val_data = prepared(train_set), prepared(held_out)
    params = regressor.params
    accum = {name: np.zeros_like(p) for name, p in params.items()}
    rng = np.random.default_rng(config.seed)
    history: list[EpochLog] = []

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_data))
        abs_error = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = {name: np.zeros_like(p) for name, p in params.items()}
            for idx in batch:
                x, e, mask, t = train_data[idx]
                y, cache = regressor.forward(x, e, mask)
                err = y - t
                abs_error += abs(err)
                for name, g in regressor.backward(cache, float(np.sign(err)) / len(batch)).items():
                    grads[name] += g
            _adagrad_step(params, grads, accum, config.learning_rate)
        train_mae = abs_error / len(train_data) * normalizer.label_std
        if not math.isfinite(train_mae):
            raise TrainingDivergenceError(epoch, train_mae)
        val_mae = _mae(model, val_data) if val_data else None
        history.append(EpochLog(epoch, train_mae, val_mae))
        if verbose:
            val = f"{val_mae:.3f}" if val_mae is not None else "n/a"
            console.print(f"[dim]epoch {epoch:>3}/{config.epochs}  train MAE {train_mae:.3f}  val MAE {val}[/dim]")

    return TrainingResult(model, history, len(train_data), len(val_data))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    count: int
    mae: float
    spearman: float


def evaluate_model(model: EstimatorModel, dataset: Dataset) -> Evaluation:
    """Prediction error and rank agreement against the dataset's oracle labels."""
    if not len(dataset):
        raise ScenarioError("cannot evaluate on an empty dataset")
    if model.domain != dataset.domain:
        raise SchemaMismatchError(f"model trained on {model.domain}, dataset is {dataset.domain}")
    predictions = np.array([model.predict(s.graph) for s in dataset.samples])
    labels = np.array(dataset.labels)
    mae = float(np.mean(np.abs(predictions - labels)))
    if len(labels) < 2 or np.all(labels == labels[0]) or np.all(predictions == predictions[0]):
        rho = float("nan")
    else:
        rho, _ = spearmanr(predictions, labels)
        rho = float(rho)
    return Evaluation(len(labels), mae, rho)


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def save_model(model: EstimatorModel, path: Path) -> None:
    """Weights and normalisation statistics in one ``.npz``; a JSON header describes shapes and schema."""
    path.parent.mkdir(parents=True, exist_ok=True)
    n = model.normalizer
    header = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "domain": str(model.domain),
        "schema": model.schema,
        "slope": model.regressor.slope,
        "shapes": {k: list(v.shape) for k, v in model.regressor.params.items()},
        "label_mean": n.label_mean,
        "label_std": n.label_std,
    }
    arrays = {f"param.{k}": v for k, v in model.regressor.params.items()}
    arrays.update(
        {
            "norm.node_mean": n.node_mean,
            "norm.node_std": n.node_std,
            "norm.edge_mean": n.edge_mean,
            "norm.edge_std": n.edge_std,
        }
    )
    with path.open("wb") as f:
        np.savez(f, header=np.array(json.dumps(header)), **arrays)


def load_model(path: Path) -> EstimatorModel:
    if not path.exists():
        raise ScenarioError(f"model checkpoint not found: {path}")
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("format") != CHECKPOINT_FORMAT or header.get("version") != CHECKPOINT_VERSION:
            raise ScenarioError(f"{path} is not a version {CHECKPOINT_VERSION} model checkpoint")
        if header["schema"] != schema_hash():
            raise SchemaMismatchError(f"{path} uses feature schema {header['schema']}, expected {schema_hash()}")
        params = {}
        for name, shape in header["shapes"].items():
            array = np.array(data[f"param.{name}"], dtype=float)
            if list(array.shape) != shape:
                raise SchemaMismatchError(f"{path}: parameter {name} has shape {array.shape}, header says {shape}")
            params[name] = array
        normalizer = Normalizer(
            node_mean=np.array(data["norm.node_mean"]),
            node_std=np.array(data["norm.node_std"]),
            edge_mean=np.array(data["norm.edge_mean"]),
            edge_std=np.array(data["norm.edge_std"]),
            label_mean=float(header["label_mean"]),
            label_std=float(header["label_std"]),
        )
    if not all(np.all(np.isfinite(p)) for p in params.values()):
        raise ScenarioError(f"{path} holds non-finite weights")
    regressor = GraphRegressor(params, header["slope"])
    return EstimatorModel(regressor, normalizer, Domain(header["domain"]), header["schema"])
