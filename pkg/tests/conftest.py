import os
from pathlib import Path

import pytest

from glcvis.dataset import load_csv, normalize

DATA_DIR = Path(__file__).parent / "data"


def wbc_path() -> Path:
    """Real 9-attribute breast-cancer CSV when present, else the committed
    surrogate of identical schema."""
    env = os.environ.get("GLCVIS_WBC_CSV")
    if env and Path(env).exists():
        return Path(env)
    real = DATA_DIR / "wbc.csv"
    if real.exists():
        return real
    return DATA_DIR / "wbc_surrogate.csv"


@pytest.fixture(scope="session")
def wbc():
    return load_csv(wbc_path(), label_column="class")


@pytest.fixture(scope="session")
def wbc_normalized(wbc):
    norm, _ = normalize(wbc)
    return norm
