import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from betaexp.numerics.beta import BetaValue  # noqa: E402

STAR = "poly:x^3-x^2-1:[1.4,1.5]"


@pytest.fixture(scope="session")
def beta_star():
    return BetaValue.parse(STAR)


@pytest.fixture(scope="session")
def beta_15():
    return BetaValue.parse("1.5")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s[7:9]):
            terminalreporter.write_line(line)
