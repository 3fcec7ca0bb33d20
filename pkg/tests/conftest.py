import pytest
from hypothesis import settings

from morsehom.geometry import GeometryConfig, MorseData, run_surface

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sphere_run():
    return run_surface(MorseData.from_config(GeometryConfig(surface="sphere")))


@pytest.fixture(scope="session")
def torus_run():
    return run_surface(MorseData.from_config(GeometryConfig(surface="torus")))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
