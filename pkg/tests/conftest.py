from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from colexforge.pipeline import PipelineConfig, run_all

ROOT = Path(__file__).resolve().parent.parent
TOY_DIR = ROOT / "data" / "toy"
TOY_CONFIG = ROOT / "data" / "toy-config.json"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def toy_dir() -> Path:
    return TOY_DIR


@pytest.fixture
def toy_copy(tmp_path) -> Path:
    dest = tmp_path / "toy"
    shutil.copytree(TOY_DIR, dest)
    return dest


def toy_config(output_dir: Path, **overrides) -> PipelineConfig:
    config = PipelineConfig.from_json(TOY_CONFIG)
    config.output_dir = output_dir
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


@pytest.fixture(scope="session")
def toy_run(tmp_path_factory):
    """One full pipeline run over the toy corpus, shared by read-only tests."""
    out = tmp_path_factory.mktemp("toy-run")
    manifest = run_all(toy_config(out))
    return out, manifest


# one summary line per acceptance criterion --------------------------------

_acceptance: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    _acceptance.setdefault(marker, []).append(report.outcome)


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        number, title = mark.args
        item.user_properties.append(("criterion", f"{number:>2}. {title}"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda s: int(s.split(".")[0])):
        outcomes = _acceptance[name]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"[{status}] {name} ({len(outcomes)} checks)")
