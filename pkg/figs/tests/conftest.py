import shutil
import subprocess
import sys

import pytest

PROFILE_CONFIG = """
[model]
kind = ising
sites = 10
b = 1.0
h = 1.0
boundary = periodic

[protocol]
site_a = 2
direction_a = 1 0 0
site_b = 7
direction_b = 0 1 0

[solver]
method = dense
"""

SWEEP_CONFIG = """
[model]
kind = ising
sites = 16
b = 1.0
h = 1.0
boundary = periodic

[protocol]
site_a = 0
direction_a = 1 0 0
site_b = 5
direction_b = 0 1 0

[solver]
method = krylov
tol = 1e-10
max_iter = 400

[sweep]
axis = distance
values = 3 4 5 6 7
"""


def _run_primary(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "qetsim", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def golden_run(tmp_path_factory):
    """Real simulator outputs for the pinned near-critical run.

    The figure package talks to the simulator only through its files, so
    the fixture shells out to the installed CLI; tests that need it are
    skipped when the simulator is not on this interpreter's path.
    """
    if shutil.which(sys.executable) is None:
        pytest.skip("no python interpreter found")
    root = tmp_path_factory.mktemp("golden")
    profile_cfg = root / "profile.ini"
    profile_cfg.write_text(PROFILE_CONFIG)
    proto = _run_primary(
        ["protocol", "--config", str(profile_cfg), "--out", str(root)], root
    )
    if proto.returncode != 0:
        pytest.skip(f"simulator unavailable or failed: {proto.stderr.strip()}")
    sweep_cfg = root / "sweep.ini"
    sweep_cfg.write_text(SWEEP_CONFIG)
    sweep = _run_primary(
        ["sweep", "--config", str(sweep_cfg), "--out", str(root)], root
    )
    if sweep.returncode != 0:
        pytest.skip(f"simulator sweep failed: {sweep.stderr.strip()}")
    return root


@pytest.fixture()
def synthetic_profile(tmp_path):
    path = tmp_path / "profile.csv"
    rows = ["site,t_expect_step1,t_expect_step3"]
    values = [
        (0.0, 0.0),
        (0.125, 0.125),
        (0.5, 0.5),
        (0.0625, 0.0625),
        (0.0, 0.0),
        (0.0, -0.03125),
        (0.0, -0.25),
        (0.0, -0.015625),
    ]
    for site, (a, b) in enumerate(values):
        rows.append(f"{site},{a!r},{b!r}")
    path.write_text("\n".join(rows) + "\n")
    return path
