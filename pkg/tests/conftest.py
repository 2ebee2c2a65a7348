import pytest

from oobarray.config import ScenarioConfig
from oobarray.scenarios import run_beampattern

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def default_config():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def reference_beampattern(default_config):
    """M=60, users at -15/12 deg, cubic PA, sigma=0, OFDM, 1e5 samples, 0.1 deg grid."""
    return run_beampattern(default_config)


@pytest.fixture
def small_config():
    return ScenarioConfig().with_updates(
        array={"n_antennas": 8},
        waveform={"n_samples": 20_000},
        grid={"step": 1.0},
        gain_curve={"sigmas": [0.0, 0.5, 3.141592653589793], "trials": 200},
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
