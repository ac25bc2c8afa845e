import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dmp_volatility.calibration import MonthlyTargets, build_economies  # noqa: E402
from dmp_volatility.data_io import SNAPSHOT_DIR, SERIES  # noqa: E402


@pytest.fixture(scope="session")
def targets():
    return MonthlyTargets()


@pytest.fixture(scope="session")
def economies(targets):
    return build_economies(targets)


@pytest.fixture(scope="session")
def baseline(economies):
    return economies["Baseline"]


def snapshot_available():
    return all((SNAPSHOT_DIR / f"{fid}.csv").exists() for fid in SERIES)


needs_snapshot = pytest.mark.skipif(not snapshot_available(),
                                    reason="vendored FRED snapshot not present")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
