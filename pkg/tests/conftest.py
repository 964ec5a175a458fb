import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

try:
    import kcmfold as kf
except ImportError:  # uninstalled checkout: run from src with the numpy backend
    sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
    import kcmfold as kf


@pytest.fixture(scope="session")
def topo1():
    return kf.build_backbone(1)


@pytest.fixture(scope="session")
def topo2():
    return kf.build_backbone(2)


@pytest.fixture(scope="session")
def topo4():
    return kf.build_backbone(4)


@pytest.fixture(scope="session")
def ff():
    return kf.ForceFieldConfig()
