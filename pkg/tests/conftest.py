"""Shared fixtures: bundled demo paths and a session-wide pipeline run."""

from __future__ import annotations

from pathlib import Path

import pytest

from culturestream.pipeline import build_run_config, parse_config_file, run_pipeline

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def demo_run(tmp_path_factory):
    """Full pipeline run over the bundled 13-week fixture: (out_dir, manifest)."""
    out = tmp_path_factory.mktemp("demo_run")
    values = parse_config_file(FIXTURES / "demo.cfg")
    values["out"] = str(out)
    config = build_run_config(values)
    manifest = run_pipeline(config)
    return out, manifest


@pytest.fixture
def small_roster() -> dict[str, str]:
    return {"alice": "A", "bob": "A", "carol": "B", "dave": "B"}
