import json
from pathlib import Path

import pytest

from afta.model import parse_model

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return MODELS


@pytest.fixture(scope="session")
def observed_scenario():
    """Two redundant components, failures observable before attacking."""
    return parse_model((MODELS / "two_component_observed.json").read_text())


@pytest.fixture(scope="session")
def attack_first_scenario():
    """Same tree, but attacks must commit before any failure is revealed."""
    return parse_model((MODELS / "two_component_attack_first.json").read_text())


@pytest.fixture(scope="session")
def oil_scenario():
    return parse_model((MODELS / "oil_pipeline.json").read_text())


@pytest.fixture(scope="session")
def bank_scenario():
    return parse_model((MODELS / "bank.json").read_text())


@pytest.fixture()
def observed_doc():
    """The observed two-component model as a mutable dict for negative tests."""
    return json.loads((MODELS / "two_component_observed.json").read_text())
