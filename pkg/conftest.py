import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.config import Config  # noqa: E402
from src.special.orthopoly import Family, FamilyTag, family_coeffs  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Point the settings file at a temporary path"""
    monkeypatch.setattr(Config, "SETTINGS_FILE", str(tmp_path / "settings.json"))
    monkeypatch.delenv(Config.SEED_VARIABLE, raising=False)


@pytest.fixture
def legendre():
    return Family(FamilyTag.LEGENDRE)


@pytest.fixture
def legendre_rc(legendre):
    return family_coeffs(legendre, 40)


@pytest.fixture
def run_cli(capsys):
    """Run the CLI and return (exit code, parsed stdout or raw text, stderr)"""
    from src.core.app import StieltjesApp

    def run(*argv, raw=False):
        code = StieltjesApp().run(list(argv))
        captured = capsys.readouterr()
        if raw or not captured.out.strip():
            return code, captured.out, captured.err
        return code, json.loads(captured.out), captured.err

    return run
