import json
from pathlib import Path

import numpy as np
import pytest

from mcdnn.arch_dsl import parse_arch
from mcdnn.models.dataset import Dataset, Sample
from mcdnn.models.image import GrayImage

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"

TINY_ARCH = "8x8-2C3-MP2-4N-3N"
WIDE_ARCH = "8x8-2C3-MP2-4N-12N"
DESK_ARCH = "48x48-10C3-MP2-20C2-MP2-40C2-MP2-80C2-MP2-100N-20N"


def random_image(rng: np.random.Generator, width: int, height: int) -> GrayImage:
    return GrayImage.from_array(rng.integers(0, 256, size=(height, width), dtype=np.uint8))


def random_dataset(class_count: int, n: int, size: int = 8, seed: int = 0, writers: int = 1) -> Dataset:
    rng = np.random.default_rng(seed)
    samples = [
        Sample(random_image(rng, size, size), int(rng.integers(class_count)), i % writers)
        for i in range(n)
    ]
    return Dataset(samples, class_count)


@pytest.fixture
def tiny_spec():
    return parse_arch(TINY_ARCH)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def config_dir(tmp_path):
    """Cópia da configuração com todo o armazenamento dentro de tmp_path."""
    cfg = tmp_path / "config"
    cfg.mkdir()
    settings = json.loads((REPO_ROOT / "config" / "settings.json").read_text(encoding="utf-8"))
    settings["storage"] = {
        "models_dir": str(tmp_path / "models"),
        "reports_dir": str(tmp_path / "reports"),
        "logs_dir": str(tmp_path / "logs"),
        "max_checkpoints_per_column": 3,
    }
    (cfg / "settings.json").write_text(json.dumps(settings), encoding="utf-8")
    (cfg / "networks.json").write_text(
        (REPO_ROOT / "config" / "networks.json").read_text(encoding="utf-8"), encoding="utf-8"
    )
    return cfg


@pytest.fixture
def published_networks():
    data = json.loads((REPO_ROOT / "config" / "networks.json").read_text(encoding="utf-8"))
    return data["networks"]
