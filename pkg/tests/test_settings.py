import json
from pathlib import Path

import pytest

from hdrelay.errors import ConfigError
from hdrelay.presets import PRESETS, apply_preset
from hdrelay.settings import RunConfig, load_run_config


def test_defaults_are_valid():
    config = RunConfig().validate()
    assert config.m_list == (2, 3, 4, 5, 11, 21, 41, 101)
    assert config.output_format == "csv"


@pytest.mark.parametrize(
    "overrides",
    [
        {"command": "draw"},
        {"code": "table9"},
        {"tol": 0.0},
        {"step": 0.5},
        {"blocks": 0},
        {"q_list": [0]},
        {"m_list": [0]},
        {"q_max": 0},
        {"q": 0},
        {"sequence_cap": 0},
        {"output_format": "xml"},
    ],
)
def test_validation_errors(overrides):
    with pytest.raises(ConfigError):
        RunConfig().updated(overrides).validate()


def test_updated_coerces_values():
    config = RunConfig().updated({"m_list": [3, 4], "messages": ["1", "2"], "out": "x/y.csv"})
    assert config.m_list == (3, 4)
    assert config.messages == (1, 2)
    assert config.out == Path("x/y.csv")
    with pytest.raises(ConfigError):
        RunConfig().updated({"colour": "red"})
    with pytest.raises(ConfigError):
        RunConfig().updated({"m_list": "abc"})


def test_load_run_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "counting", "n": 16, "q_list": [2]}), encoding="utf-8")
    config = load_run_config(path)
    assert (config.command, config.n, config.q_list) == ("counting", 16, (2,))

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(listing)
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.json")


@pytest.mark.parametrize("name", PRESETS)
def test_presets_are_valid(name):
    config = apply_preset(name, RunConfig()).validate()
    assert config.command in ("capacity", "region", "simulate")


def test_preset_contents():
    assert apply_preset("TABLE1", RunConfig()).messages == (1, 2, 4, 7)
    table2 = apply_preset("table2", RunConfig(out=Path("out.csv")))
    assert table2.exhaustive and table2.blocks == 3
    assert table2.out == Path("out.csv")
    with pytest.raises(ValueError):
        apply_preset("fig9", RunConfig())
