import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import qetsim as q

settings.register_profile(
    "default",
    derandomize=True,
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def critical8():
    """Calibrated near-critical chain, 8 sites, dense ground state."""
    return q.solve_and_calibrate(q.build_ising(8, 1.0, 1.0), method="dense")


@pytest.fixture(scope="session")
def critical10():
    return q.solve_and_calibrate(q.build_ising(10, 1.0, 1.0), method="dense")


@pytest.fixture(scope="session")
def separable8():
    """Uncoupled chain (h = 0): product ground state, nothing to teleport."""
    return q.solve_and_calibrate(q.build_ising(8, 1.0, 0.0), method="dense")


@pytest.fixture(scope="session")
def open8():
    return q.solve_and_calibrate(
        q.build_ising(8, 1.0, 1.0, boundary="open"), method="dense"
    )


def random_state(site_count: int, seed: int) -> q.StateVector:
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << site_count) + 1j * rng.standard_normal(
        1 << site_count
    )
    return q.StateVector(amps / np.linalg.norm(amps), site_count)


def random_direction(rng) -> tuple[float, float, float]:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return tuple(float(c) for c in v)


_ACCEPTANCE_LABELS = {
    "passed": "PASS",
    "failed": "FAIL",
    "xfailed": "FAIL (expected: documented obstruction)",
    "xpassed": "UNEXPECTED PASS",
    "error": "ERROR",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for status in ("passed", "failed", "xfailed", "xpassed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            if getattr(rep, "when", "call") != "call" and status == "passed":
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, _ACCEPTANCE_LABELS[status]))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"{label:40s} {name}")
