from pathlib import Path

import numpy as np
import pytest

from sdc_engine.shared.config import ToleranceConfig

DATA_DIR = Path(__file__).parent / "data"

SQRT3 = np.sqrt(3.0)
D_PLUS = (1 + 1j * SQRT3) / 2
D_MINUS = (1 - 1j * SQRT3) / 2


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("SDC_DEFAULT_TOL", "SDC_RANK_TOL", "SDC_SEED", "SDC_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def cfg():
    return ToleranceConfig()


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def complex_needed():
    """Real symmetric pair that is SDC only with a complex transform."""
    return [
        np.array([[0, 1], [1, 1]], dtype=complex),
        np.array([[1, 1], [1, 0]], dtype=complex),
    ]


@pytest.fixture
def kernel_deficit():
    """Pencil of rank 2 on C^3 whose members share no kernel vector."""
    return [
        np.array([[1, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex),
        np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex),
    ]


@pytest.fixture
def defective_pair():
    return [
        np.array([[1, 0], [0, 0]], dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
    ]


def off_diagonal_max(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - np.diag(np.diag(m)))))
