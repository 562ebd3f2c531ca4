"""Tests for the YAML configuration layer and logging setup."""
import json
import logging

import pytest

from engine.config import ConfigManager
from engine.errors import UsageError
from engine.logs import get_handler, install_logging


@pytest.mark.unit
def test_defaults():
    config = ConfigManager(use_env=False)
    assert config.environment == "default"
    assert config.get("smoothing.rho") == 0.9
    assert config.get("smoothing.n_prime") == 5000
    assert config.get("masking.sentinel") == "[MASK]"
    assert config.get("missing.key", "fallback") == "fallback"


@pytest.mark.unit
@pytest.mark.parametrize("environment", ["default", "development", "production"])
def test_config_files_hold_only_run_sections(environment):
    config = ConfigManager(environment=environment, use_env=False)
    assert config.get("system") is None
    assert config.get("paths.assets_dir") is None
    assert config.get("paths.output_dir") == "./results"


@pytest.mark.unit
def test_environment_file():
    config = ConfigManager(environment="development", use_env=False)
    assert config.get("smoothing.n") == 200
    assert config.get("smoothing.alpha") == 0.05


@pytest.mark.unit
def test_extra_file_and_env_overrides(tmp_path, monkeypatch):
    extra = tmp_path / "run.yaml"
    extra.write_text("smoothing:\n  rho: 0.3\nsampling:\n  seed: 5\n", encoding="utf-8")
    monkeypatch.setenv("MASKCERT_SEED", "11")
    monkeypatch.setenv("MASKCERT_ALPHA", "0.01")
    config = ConfigManager(extra_file=str(extra))
    assert config.get("smoothing.rho") == 0.3
    assert config.get("sampling.seed") == 11
    assert config.get("smoothing.alpha") == 0.01


@pytest.mark.unit
def test_unreadable_extra_file(tmp_path):
    with pytest.raises(UsageError):
        ConfigManager(extra_file=str(tmp_path / "missing.yaml"), use_env=False)
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("3\n", encoding="utf-8")
    with pytest.raises(UsageError):
        ConfigManager(extra_file=str(scalar), use_env=False)


@pytest.mark.unit
def test_update_skips_none():
    config = ConfigManager(use_env=False)
    config.update({"smoothing.rho": None, "smoothing.n": 7, "new.section.key": "x"})
    assert config.get("smoothing.rho") == 0.9
    assert config.get("smoothing.n") == 7
    assert config.get("new.section.key") == "x"


@pytest.mark.unit
def test_json_log_lines(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    handler = install_logging(level="INFO", json_output=True, file=str(log_file))
    assert install_logging() is handler
    assert get_handler() is handler
    logging.getLogger("engine.test").info("certified", extra={"sample_index": 3})
    handler.flush()
    record = json.loads(log_file.read_text(encoding="utf-8").strip().splitlines()[-1])
    assert record["message"] == "certified"
    assert record["levelname"] == "INFO"
    assert record["sample_index"] == 3
