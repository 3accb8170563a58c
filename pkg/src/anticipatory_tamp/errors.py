"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AntTampError(Exception):
    """Base class for all planner errors surfaced to the CLI."""


class ScenarioError(AntTampError):
    """Scenario file or in-memory scenario is inconsistent (unknown ids, bad schema, empty goals)."""


class InvalidPlanError(AntTampError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"action {index}: {reason}")
        self.index = index
        self.reason = reason


class RefinementFailure(AntTampError):
    """Continuous-parameter sampling ran out of tries."""


class UnsolvableInstanceError(AntTampError):
    def __init__(self, task_label: str, reason: str = ""):
        msg = f"no plan found for '{task_label}'"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.task_label = task_label


class CandidateError(AntTampError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"candidate {index} failed: {cause}")
        self.index = index
        self.cause = cause


class TrainingDivergenceError(AntTampError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"non-finite training loss {loss} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


class SchemaMismatchError(AntTampError):
    """Feature schema of a model, dataset or checkpoint does not match the active scenario."""
