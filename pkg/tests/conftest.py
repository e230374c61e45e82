import functools

import pytest

from identforge.model import load_bundled, load_model, bundled_model_path
from identforge.prolongation import SpecializationConfig, generate_Et

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def bundled_system(name: str, seed: int = 0):
    return generate_Et(load_bundled(name), SpecializationConfig(seed=seed))


@functools.lru_cache(maxsize=None)
def example1_system(seed: int = 0):
    return generate_Et(load_model(bundled_model_path("example1")), SpecializationConfig(seed=seed))


@pytest.fixture
def goodwin():
    return bundled_system("goodwin")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
