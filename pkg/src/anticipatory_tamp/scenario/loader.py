"""Scenario files and user settings on disk (YAML)."""

from __future__ import annotations

import os
from pathlib import Path

import yaml
from pydantic import ValidationError

from anticipatory_tamp.domain import geometry
from anticipatory_tamp.errors import ScenarioError
from anticipatory_tamp.models.types import Scenario, Settings

CONFIG_DIR = Path.home() / ".anticipatory-tamp"
CONFIG_FILE = CONFIG_DIR / "config.yaml"


def load_scenario(path: Path) -> Scenario:
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as e:
        raise ScenarioError(f"{path}: not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: expected a mapping at the top level")
    try:
        scenario = Scenario.model_validate(raw)
    except ValidationError as e:
        raise ScenarioError(f"{path}: {e}") from e
    if problems := geometry.state_violations(scenario, scenario.initial_state()):
        raise ScenarioError(f"{path}: invalid initial state: " + "; ".join(problems))
    return scenario


def save_scenario(scenario: Scenario, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    data = scenario.model_dump(mode="json", by_alias=True, exclude_none=True)
    path.write_text(yaml.dump(data, default_flow_style=False, sort_keys=False))


def load_settings() -> Settings:
    """Settings from ~/.anticipatory-tamp/config.yaml, with env-var overrides."""
    data: dict = {}
    if CONFIG_FILE.exists():
        try:
            data = yaml.safe_load(CONFIG_FILE.read_text()) or {}
        except yaml.YAMLError as e:
            raise ScenarioError(f"{CONFIG_FILE}: not valid YAML: {e}") from e

    if workers := os.environ.get("ANTTAMP_WORKERS"):
        data["workers"] = workers
    if out := os.environ.get("ANTTAMP_OUT"):
        data["output_dir"] = out
    if samples := os.environ.get("ANTTAMP_ORACLE_SAMPLES"):
        data["oracle_samples"] = samples
    try:
        return Settings.model_validate(data)
    except ValidationError as e:
        raise ScenarioError(f"invalid settings: {e}") from e


def save_settings(settings: Settings) -> None:
    CONFIG_DIR.mkdir(parents=True, exist_ok=True)
    CONFIG_FILE.write_text(yaml.dump(settings.model_dump(mode="json"), default_flow_style=False))
