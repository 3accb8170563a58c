"""Aggregate trial records: mean cost per task, cost-over-time curves, improvement over myopic."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from anticipatory_tamp.harness.deployment import TrialRecord
from anticipatory_tamp.models.types import Variant


def improvement(baseline: float, value: float) -> float:
    """Percent reduction of ``value`` relative to ``baseline``."""
    if baseline == 0.0:
        return 0.0
    return (baseline - value) / baseline * 100.0


def trend(curve: list[float]) -> float:
    """Least-squares slope of a per-task-index curve; 0 for fewer than two points."""
    if len(curve) < 2:
        return 0.0
    return float(np.polyfit(np.arange(len(curve)), np.asarray(curve), 1)[0])


@dataclass
class VariantSummary:
    variant: Variant
    n_trials: int
    n_failed: int
    mean_cost: float
    curve: list[float]
    slope: float
    preparation_cost: float

    def to_dict(self) -> dict:
        return {
            "variant": str(self.variant),
            "trials": self.n_trials,
            "failed": self.n_failed,
            "mean_cost_per_task": self.mean_cost,
            "cost_curve": self.curve,
            "slope": self.slope,
            "mean_preparation_cost": self.preparation_cost,
        }


@dataclass
class Summary:
    variants: dict[Variant, VariantSummary] = field(default_factory=dict)

    @property
    def improvements(self) -> dict[Variant, float]:
        """Improvement of each variant over myopic, when myopic was run."""
        base = self.variants.get(Variant.MYOPIC)
        if base is None:
            return {}
        return {v: improvement(base.mean_cost, s.mean_cost) for v, s in self.variants.items() if v != Variant.MYOPIC}

    def to_dict(self) -> dict:
        return {
            "variants": [s.to_dict() for s in self.variants.values()],
            "improvement_percent": {str(v): pct for v, pct in self.improvements.items()},
        }


def summarize(records: Iterable[TrialRecord]) -> Summary:
    by_variant: dict[Variant, list[TrialRecord]] = defaultdict(list)
    for record in records:
        by_variant[record.variant].append(record)
    if not by_variant:
        raise ValueError("no trial records to summarize")

    summary = Summary()
    for variant in Variant:
        trials = by_variant.get(variant)
        if not trials:
            continue
        completed = [t for t in trials if t.error is None]
        costs = [c for t in completed for c in t.costs]
        per_index: dict[int, list[float]] = defaultdict(list)
        for t in completed:
            for task in t.tasks:
                per_index[task.task_index].append(task.cost)
        curve = [float(np.mean(per_index[i])) for i in sorted(per_index)]
        summary.variants[variant] = VariantSummary(
            variant=variant,
            n_trials=len(trials),
            n_failed=len(trials) - len(completed),
            mean_cost=float(np.mean(costs)) if costs else 0.0,
            curve=curve,
            slope=trend(curve),
            preparation_cost=float(np.mean([t.preparation_cost for t in completed])) if completed else 0.0,
        )
    return summary
