from importlib.resources import files

import pytest

from lazymdp.model import with_target_command
from lazymdp.parser import load_model

BUNDLED = ["running_example_bounded", "coin", "irrelevant_variable"]


def bundled_path(name):
    return str(files("lazymdp") / "models" / f"{name}.gmc")


def load_bundled(name):
    """The bundled model with its target command appended, plus the query."""
    model, query = load_model(bundled_path(name))
    return with_target_command(model, query)[0], query


@pytest.fixture
def running():
    return load_bundled("running_example_bounded")[0]


@pytest.fixture
def coin():
    return load_bundled("coin")[0]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
