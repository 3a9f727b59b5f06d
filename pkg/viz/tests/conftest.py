import os

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "..", "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    path = os.path.abspath(FIXTURES)
    assert os.path.isdir(path), "shared fixtures directory missing"
    return path


@pytest.fixture(scope="session")
def diag_csv(fixtures_dir):
    return os.path.join(fixtures_dir, "linear_demo", "timeseries.csv")


@pytest.fixture(scope="session")
def modes_csv(fixtures_dir):
    return os.path.join(fixtures_dir, "linear_demo", "modes.csv")


@pytest.fixture(scope="session")
def m1_gpsn(fixtures_dir):
    return os.path.join(fixtures_dir, "m1_mode.gpsn")
