import functools

import pytest
from hypothesis import HealthCheck, settings

from fundmod.fundament import build_fundamental
from fundmod.scheme import CycleScheme

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BOTH = ("even", "odd")


@functools.lru_cache(maxsize=None)
def scheme_for(D, parity, backend="exact"):
    return CycleScheme(D, parity, backend)


@functools.lru_cache(maxsize=None)
def module_for(D, parity, backend="exact"):
    return build_fundamental(scheme_for(D, parity, backend))


@pytest.fixture(scope="session")
def get_scheme():
    return scheme_for


@pytest.fixture(scope="session")
def get_module():
    return module_for


# acceptance results, printed once at the end of the run
ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")
