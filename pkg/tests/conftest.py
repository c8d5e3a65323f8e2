from __future__ import annotations

from importlib import resources

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from icotomo import formats as fmt
from icotomo.geometry import ModulePoint
from icotomo.modelset import central_slice, example_spec, generate
from icotomo.qtau import QTau

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

FIXTURES = resources.files("icotomo") / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


small_fracs = st.fractions(min_value=-50, max_value=50, max_denominator=12)
qtaus = st.builds(QTau, small_fracs, small_fracs)
nonzero_qtaus = qtaus.filter(lambda x: not x.is_zero)
module_points = st.builds(ModulePoint, *[st.integers(-20, 20)] * 6)


@pytest.fixture(scope="session")
def patch3():
    return generate(example_spec(3))


@pytest.fixture(scope="session")
def central3(patch3):
    return central_slice(patch3)


@pytest.fixture(scope="session")
def dirs3():
    return fmt.parse_directions(fixture_text("dirs3.txt"))


@pytest.fixture(scope="session")
def dirs4():
    return fmt.parse_directions(fixture_text("dirs4_empirical.txt"))


# -- acceptance summary: one line per criterion ------------------------------------

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")
