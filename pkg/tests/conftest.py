import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from emokb.fixtures import harvest_demo_registry, reference_count_registry
from emokb.gateway import mock_gateway, CompletionParams

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def reference_registry():
    return reference_count_registry()


@pytest.fixture(scope="session")
def demo_registry():
    return harvest_demo_registry()


@pytest.fixture()
def gw():
    return mock_gateway(seed=0)


@pytest.fixture()
def params():
    return CompletionParams()
