from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def theta_model_path() -> Path:
    return REPO_ROOT / "theta_term.eft"


@pytest.fixture(scope="session")
def bf_model_path() -> Path:
    return REPO_ROOT / "bf_theory.eft"
