import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

TASKS = pathlib.Path(__file__).resolve().parent.parent / "tasks"


@pytest.fixture(scope="session")
def tasks_dir() -> pathlib.Path:
    return TASKS
