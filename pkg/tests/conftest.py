import os
import sys

import numpy as np
import pytest

from cubicf2.census import run_census
from cubicf2.forms import s6_form
from cubicf2.gf2k import field
from cubicf2.groups import pgl, stabilizer


def pytest_addoption(parser):
    parser.addoption("--run-f8", action="store_true", default=False,
                     help="materialize PGL3(F8) (minutes, a few GB of memory)")


def pytest_configure(config):
    if config.getoption("--run-f8"):
        os.environ["CUBICF2_RUN_F8"] = "1"


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def f2():
    return field(1)


@pytest.fixture(scope="session")
def pgl4(f2):
    return pgl(4, f2)


@pytest.fixture(scope="session")
def aut1(pgl4):
    return stabilizer(pgl4, s6_form())


@pytest.fixture(scope="session")
def census_cache(tmp_path_factory):
    return tmp_path_factory.mktemp("census") / "census.bin"


@pytest.fixture(scope="session")
def census(census_cache):
    # first use builds and writes the cache; later readers load it
    return run_census(census_cache)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
