import json
import logging

import pytest

from src.config import Config


@pytest.fixture
def restore_tunables(monkeypatch):
    for key in Config.TUNABLE_KEYS:
        monkeypatch.setattr(Config, key, getattr(Config, key))


def test_load_settings_missing_file():
    assert Config.load_settings() == {}


def test_load_settings_applies_overrides(tmp_path, restore_tunables):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"pade_match_tol": 1e-6, "transform_nodes": 32}))
    settings = Config.load_settings(str(path))
    assert settings["transform_nodes"] == 32
    assert Config.PADE_MATCH_TOL == 1e-6
    assert Config.TRANSFORM_NODES == 32


def test_load_settings_ignores_unknown_keys(tmp_path, restore_tunables, caplog):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"available_families": {}, "agm_tol": 1e-14}))
    with caplog.at_level(logging.WARNING, logger="src.config.config"):
        Config.load_settings(str(path))
    assert "available_families" in caplog.text
    assert Config.AVAILABLE_FAMILIES
    assert Config.AGM_TOL == 1e-15


def test_load_settings_survives_bad_json(tmp_path, caplog):
    path = tmp_path / "settings.json"
    path.write_text("{not json")
    with caplog.at_level(logging.ERROR, logger="src.config.config"):
        assert Config.load_settings(str(path)) == {}
    assert "Error loading settings" in caplog.text


def test_save_settings_merges(restore_tunables):
    Config.save_settings(hankel_pivot_tol=1e-9)
    settings = Config.save_settings(equilibrium_max_iter=50)
    assert settings == {"hankel_pivot_tol": 1e-9, "equilibrium_max_iter": 50}
    with open(Config.SETTINGS_FILE, encoding="utf-8") as f:
        assert json.load(f) == settings
    assert Config.EQUILIBRIUM_MAX_ITER == 50


def test_save_settings_rejects_unknown_key(restore_tunables):
    with pytest.raises(KeyError):
        Config.save_settings(log_format="%(message)s")


def test_seed(monkeypatch):
    assert Config.get_seed() is None
    monkeypatch.setenv(Config.SEED_VARIABLE, "42")
    assert Config.get_seed() == 42
    monkeypatch.setenv(Config.SEED_VARIABLE, "many")
    assert Config.get_seed() is None


def test_family_defaults_are_copies():
    defaults = Config.get_family_defaults("jacobi")
    defaults["alpha"] = 3.0
    assert Config.get_family_defaults("jacobi") == {"alpha": 0.0, "beta": 0.0}
    with pytest.raises(KeyError):
        Config.get_family_defaults("bessel")
