from __future__ import annotations

from pathlib import Path

import pytest

from carmc import pipeline

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def hospital_model():
    return pipeline.load_requirements([DATA_DIR / "hospital.carm"],
                                      DATA_DIR / "hospital.ann")


@pytest.fixture(scope="session")
def hospital_result(hospital_model):
    return pipeline.derive(hospital_model)
