"""Default configuration and configuration loading utilities."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from recourse_lab.config.schema import ExperimentConfig

ORACLE_CAP_ENV_VAR = "RECOURSE_LAB_ORACLE_CAP"
USER_CONFIG_PATH = "~/.recourse_lab/config.yaml"


def load_env_config() -> Dict[str, Any]:
    """Load configuration from environment variables."""
    load_dotenv()

    config: Dict[str, Any] = {}
    cap = os.getenv(ORACLE_CAP_ENV_VAR)
    if cap:
        try:
            config["oracle"] = {"cap": int(cap)}
        except ValueError:
            raise ValueError(f"{ORACLE_CAP_ENV_VAR} must be an integer, got {cap!r}")
    return config


def load_yaml_config(config_path: str) -> Dict[str, Any]:
    """Load configuration from a YAML file."""
    path = Path(config_path).expanduser()

    if not path.exists():
        return {}

    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def load_json_config(config_path: str) -> Dict[str, Any]:
    """Load configuration from a JSON file."""
    path = Path(config_path).expanduser()

    if not path.exists():
        return {}

    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def merge_config(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge nested dictionaries; values in ``override`` win."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config_data(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Collect raw configuration data from every source.

    Priority (highest to lowest):
    1. Provided config file
    2. User config file (~/.recourse_lab/config.yaml)
    3. Environment variables
    4. Default values from schema

    Args:
        config_path: Optional path to a YAML or JSON config file

    Returns:
        Dict[str, Any]: Merged configuration data, not yet validated
    """
    config_data = load_env_config()

    user_config_path = Path(USER_CONFIG_PATH).expanduser()
    if user_config_path.exists():
        config_data = merge_config(config_data, load_yaml_config(str(user_config_path)))

    if config_path:
        path = Path(config_path).expanduser()
        if path.suffix.lower() in (".yaml", ".yml"):
            file_config = load_yaml_config(str(path))
        elif path.suffix.lower() == ".json":
            file_config = load_json_config(str(path))
        else:
            raise ValueError(f"Unsupported config file format: {path.suffix}")
        config_data = merge_config(config_data, file_config)

    return config_data


def load_config(
    config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """
    Load and validate the experiment configuration.

    Args:
        config_path: Optional path to a config file
        overrides: Values from command-line flags, highest priority

    Returns:
        ExperimentConfig: Validated configuration
    """
    config_data = load_config_data(config_path)
    if overrides:
        config_data = merge_config(config_data, overrides)
    return ExperimentConfig(**config_data)

