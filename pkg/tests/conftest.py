import pytest

from loopsim.config import load_config
from loopsim.synapse import BehavioralTransducer


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def table(config):
    return config.calibration


@pytest.fixture
def transducer(table):
    return BehavioralTransducer(table)


@pytest.fixture
def synapse(config):
    return config.synapse
