import os
import sys

import numpy as np
import pytest
from loguru import logger

from qharness.qcore import ProcessParams


@pytest.fixture
def rng():
    """Seeded generator so parameter draws are reproducible."""
    return np.random.default_rng(20240601)


@pytest.fixture
def param_sets():
    """A spread of admissible parameters covering every regime of q."""
    return [
        ProcessParams(theta=0.0, tau=0.0, q=0.0),
        ProcessParams(theta=0.7, tau=0.3, q=0.5),
        ProcessParams(theta=-1.2, tau=1.0, q=-0.6),
        ProcessParams(theta=1.5, tau=0.0, q=1.0),
        ProcessParams(theta=0.4, tau=1.4, q=0.99),
        ProcessParams(theta=-0.3, tau=0.8, q=-0.99),
    ]


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Run in an empty directory with no QHARNESS_* variables set."""
    for key in list(os.environ):
        if key.startswith("QHARNESS_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    logger.remove()
    logger.add(sys.__stderr__, level="WARNING")
    logger.disable("qharness")
