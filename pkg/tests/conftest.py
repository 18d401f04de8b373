import importlib
from pathlib import Path

import pytest

from guessbench.corpus import PreprocessConfig, Vocabulary, split_corpus

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list = []


def _backends():
    out = [importlib.import_module("guessbench._pykernels")]
    try:
        out.append(importlib.import_module("guessbench._ckernels"))
    except ImportError:
        pass
    return out


@pytest.fixture(params=_backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


@pytest.fixture
def vocab():
    return Vocabulary.default()


@pytest.fixture
def small_split():
    lines = ["password", "123456", "password", "abc123", "qwerty", "123456", "dragon",
             "letmein", "monkey", "abc123", "Passw0rd!", "iloveyou", "sunshine", "123456"]
    return split_corpus(lines, PreprocessConfig(seed=3), name="small")


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(line)
