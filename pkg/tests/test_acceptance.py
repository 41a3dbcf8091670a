"""Acceptance suite: one test per contract-level criterion.

Each criterion runs at its stated tolerance; a one-line verdict per
criterion is printed in the terminal summary (see conftest).  Everything
is oracle-checked at desk scale: dense diagonalization backs every ground
state, and every closed form is compared against the direct two-branch
state computation.

One criterion is marked as a strict expected failure:
``test_teleportation_positivity_along_coupling_axis`` pins both the
measurement and the feedback spin to the chain's coupling axis.  The
Hamiltonian is real in the z basis, so its nondegenerate ground state is a
real vector, while the correlator that feeds the feedback angle is a
purely imaginary Hermitian observable for that direction pair; its
expectation is exactly zero and no energy can move.  The companion test
with the feedback spin turned onto the transverse axis shows the same
geometry teleporting energy as intended.
"""

import json
import math
import time
from dataclasses import dataclass

import numpy as np
import pytest

import qetsim as q
from qetsim import analysis, cli, protocol
from qetsim.pauli import apply, expectation, partial_trace
from qetsim.protocol import MeasurementSetup, feedback_objective

from conftest import random_direction, random_state

X_AXIS = (1.0, 0.0, 0.0)
Y_AXIS = (0.0, 1.0, 0.0)

# frozen by the first dense-oracle run of the pinned instance
GOLDEN_E_B = 3.818049900283782e-05
GOLDEN_RESIDUAL = 0.29672237578241856


@dataclass(frozen=True)
class SuiteInstance:
    sites: int
    b: float
    h: float
    sender: int
    receiver: int
    report: q.ProtocolReport


@pytest.fixture(scope="module")
def randomized_suite():
    """Fifty randomized protocol instances at 8 to 10 sites."""
    rng = np.random.default_rng(20260811)
    instances = []
    solved = {}
    while len(instances) < 50:
        sites = int(rng.integers(8, 11))
        b = float(rng.uniform(0.6, 1.4))
        h = float(rng.uniform(0.1, 1.3))
        key = (sites, round(b, 3), round(h, 3))
        if key not in solved:
            solved[key] = q.solve_and_calibrate(
                q.build_ising(sites, b, h), method="dense"
            )
        cal, spec = solved[key]
        sender = int(rng.integers(sites))
        distance = int(rng.integers(3, sites // 2 + 1))
        receiver = (sender + distance) % sites
        report = q.run_protocol(
            cal,
            spec.ground,
            MeasurementSetup(sender, random_direction(rng)),
            receiver,
            random_direction(rng),
        )
        instances.append(SuiteInstance(sites, b, h, sender, receiver, report))
    return instances


def test_calibration_identities_across_coupling_grid():
    began = time.perf_counter()
    for sites in (6, 8, 10):
        for b in (0.0, 0.5, 1.0, 1.5):
            for h in (0.0, 0.5, 1.0, 1.5):
                model = q.build_ising(sites, b, h)
                spectrum = q.dense_spectrum(model)
                cal = q.calibrate(model, spectrum.ground)
                worst = max(
                    abs(expectation(spectrum.ground, t).real)
                    for t in cal.local_terms
                )
                assert worst < 1e-9, (sites, b, h, worst)
                residual = apply(cal.total, spectrum.ground).norm
                assert residual < 1e-7, (sites, b, h, residual)
                lowest = spectrum.eigenvalues[0] - sum(cal.shifts)
                assert lowest > -1e-8, (sites, b, h, lowest)
    assert time.perf_counter() - began < 60.0


def test_closed_forms_match_direct_bookkeeping(randomized_suite):
    for inst in randomized_suite:
        rep = inst.report
        assert abs(rep.teleported_energy - rep.teleported_energy_direct) < 1e-9, inst
        closed = 0.5 * (rep.xi - math.sqrt(rep.xi**2 + rep.eta**2))
        assert abs(rep.receiver_local_energy_after - closed) < 1e-9, inst


@pytest.mark.xfail(
    strict=True,
    reason=(
        "with both spins pinned to the coupling axis the teleportation "
        "correlator is a purely imaginary Hermitian observable evaluated on "
        "a real ground state, so it vanishes identically and no energy "
        "moves; see the transverse-feedback companion test for the working "
        "geometry"
    ),
)
def test_teleportation_positivity_along_coupling_axis(critical10):
    cal, spec = critical10
    report = q.run_protocol(cal, spec.ground, MeasurementSetup(2, X_AXIS), 7, X_AXIS)
    assert abs(report.receiver_local_energy_after + report.teleported_energy) < 1e-9
    assert report.teleported_energy > 1e-6


def test_teleportation_positivity_transverse_feedback(critical10):
    cal, spec = critical10
    report = q.run_protocol(cal, spec.ground, MeasurementSetup(2, X_AXIS), 7, Y_AXIS)
    assert report.teleported_energy > 1e-6
    assert abs(report.receiver_local_energy_after + report.teleported_energy) < 1e-9
    assert report.teleported_energy == pytest.approx(GOLDEN_E_B, abs=1e-9)


def test_separable_chain_yields_no_teleportation(separable8):
    cal, spec = separable8
    rng = np.random.default_rng(99)
    for _ in range(10):
        sender_dir = random_direction(rng)
        receiver_dir = random_direction(rng)
        constants = protocol.protocol_constants(
            spec.ground, cal, MeasurementSetup(1, sender_dir), 5, receiver_dir
        )
        assert abs(constants.eta) < 1e-10, (sender_dir, receiver_dir)
        e_b = protocol.teleported_energy(constants.xi, constants.eta)
        assert abs(e_b) < 1e-12, (sender_dir, receiver_dir)


def test_measurement_localization(critical10):
    cal, spec = critical10
    sender = 2
    measured = q.measure(spec.ground, MeasurementSetup(sender, X_AXIS))
    for n in range(10):
        if q.site_distance(cal, n, sender) > cal.interaction_range:
            leak = expectation(measured.ensemble, cal.local_terms[n]).real
            assert abs(leak) < 1e-9, (n, leak)
    keeps = [(n,) for n in range(10) if n != sender]
    keeps += [(5, 6, 7), tuple(n for n in range(10) if n != sender)]
    for keep in keeps:
        before = partial_trace(spec.ground, keep).matrix
        after = partial_trace(measured.ensemble, keep).matrix
        assert np.max(np.abs(after - before)) < 1e-9, keep


def test_analytic_angle_beats_dense_grid(critical10):
    cal, spec = critical10
    constants = protocol.protocol_constants(
        spec.ground, cal, MeasurementSetup(2, X_AXIS), 7, Y_AXIS
    )
    analytic = feedback_objective(constants.xi, constants.eta, constants.theta)
    step = math.pi / 721
    for k in range(721):
        theta = -math.pi / 2 + (k + 1) * step
        assert analytic <= feedback_objective(constants.xi, constants.eta, theta) + 1e-12


def test_negative_energy_theorem(critical8, separable8):
    cal, spec = critical8
    for site in range(8):
        witness = max(
            analysis.correlation_witness(cal, spec.ground, site, m, axis=axis)
            for m in range(8)
            for axis in "xz"
            if q.site_distance(cal, site, m) >= 2
        )
        if witness > 1e-6:
            cert = q.negativity_certificate(cal, site)
            assert cert.lowest_eigenvalue < -1e-9, (site, witness)
    sep_cal, _ = separable8
    for site in range(8):
        cert = q.negativity_certificate(sep_cal, site)
        assert cert.lowest_eigenvalue >= -1e-9, site


def test_flux_identities(open8):
    cal, spec = open8
    for cut in range(7):
        assert abs(q.flux(spec.ground, cal, cut)) < 1e-9, cut
    region = q.RegionSpec(2, 5)
    for seed in range(20):
        psi = random_state(8, 4000 + seed)
        rate = analysis.region_energy_rate(psi, cal, region)
        boundary = q.flux(psi, cal, 1) - q.flux(psi, cal, 5)
        assert abs(rate - boundary) < 1e-9, seed


def test_residual_obstruction(critical8, separable8):
    cal, spec = critical8
    measured = q.measure(spec.ground, MeasurementSetup(3, X_AXIS))
    bound = analysis.residual_bound(measured.ensemble, cal, 3)
    assert bound.value > 1e-3
    assert bound.value == pytest.approx(GOLDEN_RESIDUAL, abs=1e-6)
    sep_cal, sep_spec = separable8
    control = q.measure(sep_spec.ground, MeasurementSetup(3, X_AXIS))
    control_bound = analysis.residual_bound(control.ensemble, sep_cal, 3)
    assert abs(control_bound.value) < 1e-9


def test_global_bookkeeping(randomized_suite):
    for inst in randomized_suite:
        rep = inst.report
        drift = rep.total_energy_after - (rep.energy_input - rep.teleported_energy)
        assert abs(drift) < 1e-9, inst
        assert rep.total_energy_after >= -1e-9, inst


def test_protocol_report_determinism(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[model]\nkind = ising\nsites = 10\nb = 1.0\nh = 1.0\n\n"
        "[protocol]\nsite_a = 2\ndirection_a = 1 0 0\n"
        "site_b = 7\ndirection_b = 0 1 0\n\n"
        "[solver]\nmethod = dense\n"
    )
    blobs = []
    for label in ("first", "second"):
        out = tmp_path / label
        code = cli.main(["protocol", "--config", str(config), "--out", str(out)])
        assert code == 0
        blobs.append((out / "report.json").read_bytes())
    assert blobs[0] == blobs[1]
    payload = json.loads(blobs[0])
    assert payload["schema_version"] == 1
