import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def schema_dir():
    return ROOT / "schemas"


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("LASSOGGM_CLI")
    if not path:
        pytest.skip("LASSOGGM_CLI not set")
    return path
