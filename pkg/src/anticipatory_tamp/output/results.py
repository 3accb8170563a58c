"""Result files: one CSV row per executed task plus a JSON summary."""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable
from pathlib import Path

from anticipatory_tamp.harness.deployment import DeploymentConfig, TrialRecord
from anticipatory_tamp.harness.summary import Summary

RESULT_FIELDS = ["trial", "task_index", "variant", "cost", "wallclock", "task", "actions"]


def result_rows(records: Iterable[TrialRecord]) -> list[dict]:
    rows = []
    for record in records:
        for task in record.tasks:
            rows.append(
                {
                    "trial": record.trial,
                    "task_index": task.task_index,
                    "variant": str(record.variant),
                    "cost": repr(task.cost),
                    "wallclock": "" if task.wallclock is None else f"{task.wallclock:.6f}",
                    "task": task.label,
                    "actions": len(task.actions),
                }
            )
    return rows


def write_results(records: Iterable[TrialRecord], path: Path) -> Path:
    """Append-free write of results.csv, rows ordered by variant run order, then trial and task."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=RESULT_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(result_rows(records))
    return path


def write_summary(
    summary: Summary,
    configs: Iterable[DeploymentConfig],
    records: Iterable[TrialRecord],
    path: Path,
) -> Path:
    payload = {
        **summary.to_dict(),
        "configs": [c.model_dump(mode="json", exclude={"workers", "timing"}) for c in configs],
        "failures": [
            {"variant": str(r.variant), "trial": r.trial, "error": r.error} for r in records if r.error is not None
        ],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
