"""
Shared fixtures.
"""

import pytest

from src.config import Settings, reset_settings


def pytest_addoption(parser):
    parser.addoption("--run-full", action="store_true", default=False,
                     help="run the hours-long 10^8 empirical tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-full"):
        return
    skip_full = pytest.mark.skip(reason="needs --run-full")
    for item in items:
        if "full" in item.keywords:
            item.add_marker(skip_full)


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    """Every test starts from the built-in defaults, never the user's coprime.yaml."""
    monkeypatch.delenv("COPRIME_THREADS", raising=False)
    reset_settings(Settings())
    yield
    reset_settings(None)


@pytest.fixture(scope="session")
def catalog():
    from src.catalog import load_catalog
    return load_catalog()
