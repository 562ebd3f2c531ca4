"""
Shared fixtures for the maskcert test-suite.
"""
import json
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from engine.classifiers import ConstantClassifier, KeywordClassifier  # noqa: E402
from engine.config import ConfigManager  # noqa: E402
from engine.core import Text  # noqa: E402
from engine.logs import uninstall_logging  # noqa: E402
from engine.smoothing import SmoothingConfig  # noqa: E402

STUB = Path(__file__).parent / "fixtures" / "stub_classifier.py"


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("MASKCERT_ENV", "MASKCERT_SEED", "MASKCERT_RHO", "MASKCERT_N", "MASKCERT_NPRIME",
                 "MASKCERT_ALPHA", "MASKCERT_WORKERS", "MASKCERT_ENUM_CAP", "MASKCERT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    yield
    uninstall_logging()


@pytest.fixture
def keyword_f():
    return KeywordClassifier({"great": 1, "awful": 0}, default=0, class_count=2)


@pytest.fixture
def constant_f():
    return ConstantClassifier(1, 2)


@pytest.fixture
def small_cfg():
    return SmoothingConfig(rho=0.5, n=200, n_prime=1000)


@pytest.fixture
def stub_command():
    """argv of the line-protocol stub classifier in the given mode."""
    def build(mode: str = "fixed"):
        return [sys.executable, str(STUB), mode]
    return build


@pytest.fixture
def config(tmp_path):
    cfg = ConfigManager(use_env=False)
    cfg.set("paths.output_dir", str(tmp_path / "out"))
    cfg.set("runtime.progress", False)
    return cfg


def write_dataset(path: Path, rows) -> Path:
    """rows: (id, sentence, label) triples."""
    with open(path, "w", encoding="utf-8") as f:
        for example_id, sentence, label in rows:
            f.write(json.dumps({"id": example_id, "tokens": sentence.split(), "label": label}) + "\n")
    return path


@pytest.fixture
def toy_rows():
    return [
        ("ex-0", "a great film with great acting", 1),
        ("ex-1", "an awful plot and awful jokes", 0),
        ("ex-2", "great fun for the whole family", 1),
        ("ex-3", "the ending felt awful to me", 0),
        ("ex-4", "simply great music in every scene", 1),
    ]


@pytest.fixture
def toy_data(tmp_path, toy_rows):
    return write_dataset(tmp_path / "toy.jsonl", toy_rows)
