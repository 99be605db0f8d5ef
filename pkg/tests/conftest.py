import os
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
FIXTURES = HERE / "fixtures"
WORKERS = HERE / "workers"


def worker_command(name, *args):
    parts = [sys.executable, str(WORKERS / f"{name}.py"), *map(str, args)]
    return " ".join(f'"{p}"' if " " in p else p for p in parts)


@pytest.fixture
def corpus_root():
    return FIXTURES / "qmsum"


@pytest.fixture
def news_root():
    return FIXTURES / "news"


@pytest.fixture
def golden_dir():
    return FIXTURES / "golden"


def ami_root():
    """Location of the public QMSum AMI release (train/ and test/ of data/Product)."""
    return Path(os.environ.get("MEETSUM_AMI_ROOT", HERE.parent / "data" / "qmsum" / "Product"))


ACCEPTANCE = []


def verdict(number, ok, detail):
    """Record and print one acceptance line, then fail the test if it did not pass."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
