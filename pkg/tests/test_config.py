"""Configuration loading and overrides."""

import json

from config.settings import get_default_config, load_config, update_config


def test_missing_file_gives_defaults(tmp_path):
    assert load_config(tmp_path / "absent.json") == get_default_config()
    assert not (tmp_path / "absent.json").exists()


def test_user_file_is_merged(tmp_path):
    path = tmp_path / "user.json"
    path.write_text(json.dumps({"oracle": {"budget": 50}, "sweep": {"max_n": 2}}))
    config = load_config(path)
    assert config["oracle"]["budget"] == 50
    assert config["sweep"]["max_n"] == 2
    assert config["sweep"]["max_N"] == 5


def test_malformed_file_gives_defaults(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert load_config(path) == get_default_config()


def test_environment_variable(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps({"output": {"format": "csv"}}))
    monkeypatch.setenv("GKMQUIVER_CONFIG", str(path))
    assert load_config()["output"]["format"] == "csv"


def test_update_config_copies():
    base = get_default_config()
    updated = update_config(base, {"oracle": {"budget": 7}})
    assert updated["oracle"]["budget"] == 7
    assert base["oracle"]["budget"] == 1000000
