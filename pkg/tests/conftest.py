import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hncg.demo import write_demo_scene
from hncg.scene import load_scene


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    write_demo_scene(out)
    return out


@pytest.fixture(scope="session")
def demo_scene(demo_dir):
    return load_scene(demo_dir / "scene.json")


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
