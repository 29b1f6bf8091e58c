import collections

import pytest

from ecfnorm.nullsim import NullSimConfig, simulate_null
from ecfnorm.statistic import QuadratureConfig

# acceptance outcomes, keyed by criterion number: [(label, ok, detail), ...]
ACCEPTANCE = collections.OrderedDict()


def record(criterion, label, ok, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(ok), detail))
    print(f"criterion {criterion} [{label}]: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[criterion]
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{label}: {'ok' if good else 'FAIL'} {detail}".rstrip()
                          for label, good, detail in checks)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {criterion:>2}  {parts}")


@pytest.fixture(scope="session")
def small_uni_table():
    """m=1, n=20 table from 2000 null replicates."""
    cfg = NullSimConfig(1, 20, 2000, (0.01, 0.05, 0.1), QuadratureConfig.default(1), 11)
    return simulate_null(cfg, built="")


@pytest.fixture(scope="session")
def small_biv_table():
    """m=2, n=20 table from 1000 null replicates with Q=1024 nodes."""
    quad = QuadratureConfig.default(2, node_seed=5, Q=1024)
    return simulate_null(NullSimConfig(2, 20, 1000, (0.05,), quad, 5), built="")
