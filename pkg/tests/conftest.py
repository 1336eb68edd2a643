import os

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def rankbreak_home(tmp_path, monkeypatch):
    """Keeps the result store and the log file out of the user's home."""
    monkeypatch.setenv('RANKBREAK_HOME', str(tmp_path / 'home'))
    monkeypatch.setenv('RANKBREAK_LOG_FILE', str(tmp_path / 'rankbreak.log'))
    return tmp_path / 'home'


def pytest_collection_modifyitems(config, items):
    if os.getenv('RANKBREAK_SLOW') == '1':
        return
    skip_slow = pytest.mark.skip(reason="set RANKBREAK_SLOW=1 to run Monte Carlo acceptance checks")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)
