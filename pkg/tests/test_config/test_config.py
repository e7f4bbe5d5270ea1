"""Tests for configuration schema and loading."""

import json

import pytest
import yaml
from pydantic import ValidationError

from recourse_lab.config import defaults
from recourse_lab.config.defaults import (
    load_config,
    load_env_config,
    merge_config,
)
from recourse_lab.config.schema import (
    AlgorithmConfig,
    ExperimentConfig,
    InstanceConfig,
)


@pytest.fixture(autouse=True)
def no_user_config(monkeypatch, temp_dir):
    """Point the user config file somewhere empty."""
    monkeypatch.setattr(defaults, "USER_CONFIG_PATH", str(temp_dir / "absent.yaml"))
    monkeypatch.delenv("RECOURSE_LAB_ORACLE_CAP", raising=False)


def test_default_config():
    """Test the default configuration."""
    config = ExperimentConfig()
    assert config.oracle.cap == 40
    assert config.algorithm.algo == "tas"
    assert config.algorithm.t == "2"
    assert config.instance is None
    assert config.monitors.potential


@pytest.mark.parametrize(
    "t, expected", [("3/2", "3/2"), (2.598, "2.598"), (3, "3"), (" 1.25", "1.25")]
)
def test_t_is_kept_exact(t, expected):
    """Test that t is normalised to exact text."""
    assert AlgorithmConfig(t=t).t == expected


@pytest.mark.parametrize(
    "fields",
    [
        {"t": "1"},
        {"t": "0.5"},
        {"algo": "tas", "t": None},
        {"algo": "lgreedy", "problem": "matching", "t": "2"},
        {"algo": "lgreedy", "problem": "matching"},
        {"algo": "lgreedy", "problem": "is", "L": 1},
        {"algo": "dh", "problem": "is"},
        {"algo": "tas", "problem": "is", "t": "2", "yardstick": "greedy"},
        {"algo": "greedy", "problem": "is", "L": -1},
    ],
)
def test_invalid_algorithm_configs(fields):
    """Test that unsupported parameter combinations are rejected."""
    with pytest.raises(ValidationError):
        AlgorithmConfig(**fields)


def test_valid_algorithm_configs():
    """Test combinations the algorithms accept."""
    assert AlgorithmConfig(algo="lgreedy", problem="matching", t="1.5").L is None
    assert AlgorithmConfig(algo="lgreedy", problem="matching", L=0).L == 0
    assert AlgorithmConfig(algo="dh", problem="vc").order == "me1-first"
    assert AlgorithmConfig(algo="greedy", problem="is").t is None


def test_instance_config(temp_dir):
    """Test that an instance names exactly one existing source."""
    with pytest.raises(ValidationError):
        InstanceConfig()
    with pytest.raises(ValidationError):
        InstanceConfig(path=str(temp_dir / "missing.jsonl"))

    path = temp_dir / "s.jsonl"
    path.write_text("", encoding="utf-8")
    assert InstanceConfig(path=str(path)).family is None
    with pytest.raises(ValidationError):
        InstanceConfig(path=str(path), family="path")
    with pytest.raises(ValidationError):
        InstanceConfig(family="path", p=1.5)


def test_env_config(monkeypatch):
    """Test the oracle cap environment override."""
    monkeypatch.setenv("RECOURSE_LAB_ORACLE_CAP", "25")
    assert load_env_config() == {"oracle": {"cap": 25}}
    assert load_config().oracle.cap == 25

    monkeypatch.setenv("RECOURSE_LAB_ORACLE_CAP", "many")
    with pytest.raises(ValueError):
        load_env_config()


def test_load_yaml_and_json(temp_dir, monkeypatch):
    """Test file loading and priority over the environment."""
    monkeypatch.setenv("RECOURSE_LAB_ORACLE_CAP", "25")
    data = {
        "oracle": {"cap": 12},
        "algorithm": {"algo": "dh", "problem": "vc"},
        "instance": {"family": "vc-gadget", "rounds": 3},
    }
    yaml_path = temp_dir / "exp.yaml"
    yaml_path.write_text(yaml.safe_dump(data), encoding="utf-8")
    json_path = temp_dir / "exp.json"
    json_path.write_text(json.dumps(data), encoding="utf-8")

    for path in (yaml_path, json_path):
        config = load_config(str(path))
        assert config.oracle.cap == 12
        assert config.algorithm.algo == "dh"
        assert config.instance.rounds == 3


def test_user_config_sits_below_explicit_file(temp_dir, monkeypatch):
    """Test the user file is read and an explicit file wins over it."""
    user = temp_dir / "user.yaml"
    user.write_text(yaml.safe_dump({"oracle": {"cap": 20}, "label": "user"}), encoding="utf-8")
    monkeypatch.setattr(defaults, "USER_CONFIG_PATH", str(user))
    assert load_config().label == "user"

    explicit = temp_dir / "exp.yaml"
    explicit.write_text(yaml.safe_dump({"label": "explicit"}), encoding="utf-8")
    config = load_config(str(explicit), overrides={"oracle": {"cap": 9}})
    assert config.label == "explicit"
    assert config.oracle.cap == 9


def test_unsupported_config_format(temp_dir):
    """Test that unknown config suffixes are rejected."""
    path = temp_dir / "exp.toml"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="Unsupported config file format"):
        load_config(str(path))


def test_merge_config_is_nested():
    """Test that nested sections merge key by key."""
    merged = merge_config({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}, "c": 4})
    assert merged == {"a": {"x": 1, "y": 3}, "b": 1, "c": 4}


def test_packaged_experiment_is_valid():
    """Test that the shipped example experiment validates."""
    from pathlib import Path

    import recourse_lab

    path = Path(recourse_lab.__file__).parent / "data" / "experiment.yaml"
    config = load_config(str(path))
    assert config.instance.family == "bipartite-is"
    assert config.algorithm.t == "2"
    assert isinstance(config, ExperimentConfig)
