"""Built-in invariant suite, runnable from the command line.

Every structural identity the library relies on is registered here with a
stable identifier and checked at pinned small sizes (10 sites or fewer),
so a fresh checkout can certify itself in well under a minute.  The pytest
suite parametrizes over this registry and adds larger, slower variants.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import analysis, chain, protocol, solve
from .pauli import (
    OperatorSum,
    PauliTerm,
    StateVector,
    apply,
    expectation,
    expectation_real,
    matrix_element,
    partial_trace,
    to_matrix,
)

MODULES = (
    "spin-ops",
    "chain-model",
    "ground-solver",
    "qet-protocol",
    "energy-analysis",
)

_REGISTRY: list[tuple[str, Callable[[], None]]] = []


def _register(check_id: str):
    module = check_id.split("/")[0]
    if module not in MODULES:
        raise ValueError(f"unknown module prefix in {check_id}")

    def wrap(fn):
        _REGISTRY.append((check_id, fn))
        return fn

    return wrap


@dataclass(frozen=True)
class CheckOutcome:
    check_id: str
    passed: bool
    detail: str
    seconds: float

    @property
    def module(self) -> str:
        return self.check_id.split("/")[0]


def available_checks() -> list[str]:
    return [check_id for check_id, _ in _REGISTRY]


def run_checks(scope: str = "all") -> list[CheckOutcome]:
    if scope != "all" and scope not in MODULES:
        raise ValueError(f"scope must be 'all' or one of {MODULES}, got {scope!r}")
    outcomes = []
    for check_id, fn in _REGISTRY:
        if scope != "all" and not check_id.startswith(scope + "/"):
            continue
        begin = time.perf_counter()
        try:
            fn()
            outcomes.append(
                CheckOutcome(check_id, True, "ok", time.perf_counter() - begin)
            )
        except AssertionError as err:
            outcomes.append(
                CheckOutcome(check_id, False, str(err), time.perf_counter() - begin)
            )
        except Exception as err:  # a crash is a failure, not an abort
            outcomes.append(
                CheckOutcome(
                    check_id, False, f"{type(err).__name__}: {err}",
                    time.perf_counter() - begin,
                )
            )
    return outcomes


@lru_cache(maxsize=16)
def _prepared(site_count: int, b: float, h: float, boundary: str = "periodic"):
    model = chain.build_ising(site_count, b, h, boundary)
    return solve.solve_and_calibrate(model, method="dense")


def _random_state(site_count: int, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << site_count) + 1j * rng.standard_normal(
        1 << site_count
    )
    return StateVector(amps / np.linalg.norm(amps), site_count)


def _random_operator(site_count: int, seed: int, terms: int = 4) -> OperatorSum:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(terms):
        picked = rng.choice(site_count, size=rng.integers(1, 4), replace=False)
        factors = {int(s): "xyz"[rng.integers(3)] for s in picked}
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        out.append(PauliTerm(coeff, factors))
    return OperatorSum(tuple(out))


def _random_direction(rng) -> tuple[float, float, float]:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return tuple(float(c) for c in v)


# ---------------------------------------------------------------- spin-ops


@_register("spin-ops/pauli-product-closure")
def _check_product_closure():
    axes = (None, "x", "y", "z")
    for a in axes:
        for b in axes:
            left = PauliTerm(1.0, {} if a is None else {0: a})
            right = PauliTerm(1.0, {} if b is None else {1: b})
            for pair in ((left, right), (right, left)):
                prod = pair[0] * pair[1]
                assert abs(abs(prod.coefficient) - 1.0) < 1e-15, (
                    f"product of {pair} has |coefficient| {abs(prod.coefficient)}"
                )
                dense = to_matrix(OperatorSum((pair[0],)), 2) @ to_matrix(
                    OperatorSum((pair[1],)), 2
                )
                err = np.max(np.abs(dense - to_matrix(OperatorSum((prod,)), 2)))
                assert err < 1e-14, f"symbolic product disagrees with dense by {err}"
    # same-site closure over all nine axis pairs
    for a in ("x", "y", "z"):
        for b in ("x", "y", "z"):
            prod = PauliTerm(1.0, {0: a}) * PauliTerm(1.0, {0: b})
            dense = PauliTerm(1.0, {0: a}), PauliTerm(1.0, {0: b})
            lhs = to_matrix(OperatorSum((dense[0],)), 1) @ to_matrix(
                OperatorSum((dense[1],)), 1
            )
            err = np.max(np.abs(lhs - to_matrix(OperatorSum((prod,)), 1)))
            assert err < 1e-14, f"sigma^{a} sigma^{b} product wrong by {err}"


@_register("spin-ops/apply-composition")
def _check_apply_composition():
    for seed in range(6):
        a = _random_operator(4, 100 + seed)
        b = _random_operator(4, 200 + seed)
        psi = _random_state(4, 300 + seed)
        chained = apply(a, apply(b, psi))
        merged = apply(a * b, psi)
        err = np.linalg.norm(chained.amplitudes - merged.amplitudes)
        assert err < 1e-11, f"apply(A, apply(B, psi)) deviates by {err}"


@_register("spin-ops/expectation-conjugate-symmetry")
def _check_conjugate_symmetry():
    for seed in range(6):
        op = _random_operator(5, 400 + seed)
        psi = _random_state(5, 500 + seed)
        phi = _random_state(5, 600 + seed)
        lhs = matrix_element(psi, op, phi)
        rhs = matrix_element(phi, op.dagger(), psi).conjugate()
        assert abs(lhs - rhs) < 1e-11, f"<psi|A|phi> asymmetry {abs(lhs - rhs)}"


@_register("spin-ops/partial-trace-normalization")
def _check_partial_trace_trace():
    psi = _random_state(6, 42)
    for keep in ((0,), (2, 3), tuple(range(6))):
        block = partial_trace(psi, keep)
        tr = float(np.trace(block.matrix).real)
        assert abs(tr - 1.0) < 1e-12, f"trace on {keep} is {tr}"


# ------------------------------------------------------------- chain-model


@_register("chain-model/zero-point-expectation")
def _check_zero_point():
    cal, spec = _prepared(8, 1.0, 1.0)
    worst = max(
        abs(expectation_real(spec.ground, t)) for t in cal.local_terms
    )
    assert worst < chain.CALIBRATION_TOL, (
        f"calibrated term expectation {worst} exceeds {chain.CALIBRATION_TOL}"
    )


@_register("chain-model/term-additivity")
def _check_term_additivity():
    cal, _ = _prepared(7, 1.0, 0.8)
    psi = _random_state(7, 11)
    total = sum(expectation(psi, t) for t in cal.local_terms)
    whole = expectation(psi, cal.total)
    assert abs(total - whole) < 1e-10, f"sum of terms deviates by {abs(total - whole)}"


@_register("chain-model/nonnegative-spectrum")
def _check_nonnegative():
    cal, spec = _prepared(8, 1.0, 1.0)
    assert spec.eigenvalues[0] > -1e-8, f"lowest eigenvalue {spec.eigenvalues[0]}"
    for seed in range(4):
        psi = _random_state(8, 700 + seed)
        value = expectation_real(psi, cal.total)
        assert value >= -1e-8, f"random-state energy {value} below zero"


@_register("chain-model/ground-annihilation")
def _check_ground_annihilation():
    cal, spec = _prepared(8, 1.0, 1.0)
    residual = apply(cal.total, spec.ground).norm
    assert residual < 1e-7, f"||H g|| = {residual}"


@_register("chain-model/ground-correlation-witness")
def _check_correlation_witness():
    cal, spec = _prepared(8, 1.0, 1.0)
    best = max(
        analysis.correlation_witness(cal, spec.ground, n, m, axis="z")
        for n in range(8)
        for m in range(8)
        if chain.site_distance(cal, n, m) >= 2
    )
    assert best > 1e-3, f"largest z-probe witness {best} is too small"
    # the x probe vanishes identically: the Hamiltonian's spin-flip parity
    # makes every term odd against a single distant sigma^x
    null = max(
        analysis.correlation_witness(cal, spec.ground, n, m, axis="x")
        for n in range(8)
        for m in range(8)
        if chain.site_distance(cal, n, m) >= 2
    )
    assert null < 1e-10, f"x-probe witness should vanish by parity, got {null}"


@_register("chain-model/term-eigenstate-obstruction")
def _check_eigenstate_obstruction():
    cal, spec = _prepared(8, 1.0, 1.0)
    for site in range(2, 6):
        term = cal.local_terms[site]
        mean = expectation_real(spec.ground, term)
        moved = apply(term, spec.ground)
        deviation = float(
            np.linalg.norm(moved.amplitudes - mean * spec.ground.amplitudes)
        )
        assert deviation > 1e-3, f"term {site} nearly has the ground state as eigenvector"


@_register("chain-model/translation-invariant-shifts")
def _check_uniform_shifts():
    cal, _ = _prepared(8, 1.0, 0.7)
    spread = max(cal.shifts) - min(cal.shifts)
    assert spread < 1e-9, f"periodic shifts spread {spread}"


# ------------------------------------------------------------ ground-solver


@_register("ground-solver/variational-bound")
def _check_variational():
    cal, spec = _prepared(8, 1.0, 1.0)
    for seed in range(5):
        psi = _random_state(8, 800 + seed)
        value = expectation_real(psi, cal.total)
        assert value >= spec.eigenvalues[0] - 1e-9, (
            f"random state beats the ground energy: {value} < {spec.eigenvalues[0]}"
        )


@_register("ground-solver/solver-agreement")
def _check_solver_agreement():
    for n, b, h in ((6, 1.0, 0.5), (8, 1.0, 1.0), (10, 1.0, 1.2)):
        model = chain.build_ising(n, b, h)
        dense = solve.dense_spectrum(model)
        krylov = solve.krylov_ground(model, tol=1e-11, max_iter=400)
        gap = abs(dense.eigenvalues[0] - krylov.eigenvalues[0])
        assert gap < 1e-8, f"solvers disagree by {gap} at N={n}, b={b}, h={h}"


@_register("ground-solver/deterministic-ground-phase")
def _check_deterministic_phase():
    model = chain.build_ising(8, 1.0, 1.0)
    first = solve.dense_spectrum(model).ground.amplitudes
    second = solve.dense_spectrum(model).ground.amplitudes
    assert float(np.linalg.norm(first - second)) < 1e-7
    k1 = solve.krylov_ground(model).ground.amplitudes
    k2 = solve.krylov_ground(model).ground.amplitudes
    assert float(np.linalg.norm(k1 - k2)) < 1e-7
    cross = float(np.linalg.norm(first - k1))
    assert cross < 1e-6, f"dense and krylov ground vectors differ by {cross}"


# ------------------------------------------------------------- qet-protocol


@_register("qet-protocol/measurement-completeness")
def _check_completeness():
    _, spec = _prepared(8, 1.0, 1.0)
    rng = np.random.default_rng(9)
    for _ in range(6):
        setup = protocol.MeasurementSetup(int(rng.integers(8)), _random_direction(rng))
        measured = protocol.measure(spec.ground, setup)
        total = sum(r.probability for r in measured.records)
        assert abs(total - 1.0) < 1e-12, f"probabilities sum to {total}"


@_register("qet-protocol/reduced-state-preservation")
def _check_reduced_states():
    cal, spec = _prepared(8, 1.0, 1.0)
    setup = protocol.MeasurementSetup(2, (1.0, 0.0, 0.0))
    measured = protocol.measure(spec.ground, setup)
    for keep in ((5,), (0, 5), (4, 5, 6), (0, 1, 3, 4, 5, 6, 7)):
        after = partial_trace(measured.ensemble, keep).matrix
        before = partial_trace(spec.ground, keep).matrix
        err = float(np.max(np.abs(after - before)))
        assert err < 1e-9, f"reduced state on {keep} moved by {err}"


@_register("qet-protocol/energy-localization")
def _check_localization():
    cal, spec = _prepared(8, 1.0, 1.0)
    setup = protocol.MeasurementSetup(2, (1.0, 0.0, 0.0))
    measured = protocol.measure(spec.ground, setup)
    for n in range(8):
        if chain.site_distance(cal, n, 2) <= cal.interaction_range:
            continue
        value = abs(expectation_real(measured.ensemble, cal.local_terms[n]))
        assert value < 1e-9, f"term {n} holds energy {value} outside the window"


@_register("qet-protocol/closed-form-bookkeeping")
def _check_closed_forms():
    cal, spec = _prepared(8, 1.0, 1.0)
    rng = np.random.default_rng(13)
    for _ in range(4):
        sender = int(rng.integers(8))
        receiver = (sender + 3 + int(rng.integers(2))) % 8
        report = protocol.run_protocol(
            cal,
            spec.ground,
            protocol.MeasurementSetup(sender, _random_direction(rng)),
            receiver,
            _random_direction(rng),
        )
        failed = [k for k, c in report.checks.items() if not c.passed]
        assert not failed, f"bookkeeping checks failed: {failed}"


@_register("qet-protocol/negative-receiver-energy")
def _check_negative_energy():
    cal, spec = _prepared(8, 1.0, 1.0)
    report = protocol.run_protocol(
        cal, spec.ground, protocol.MeasurementSetup(1, (1.0, 0.0, 0.0)), 5,
        (0.0, 1.0, 0.0),
    )
    assert abs(report.eta) > 1e-4, f"eta unexpectedly small: {report.eta}"
    assert report.teleported_energy > 0.0, "no energy extracted"
    assert report.receiver_local_energy_after < -1e-9, (
        f"receiver window energy {report.receiver_local_energy_after} not negative"
    )


@_register("qet-protocol/theta-optimality")
def _check_theta_optimality():
    cal, spec = _prepared(8, 1.0, 1.0)
    constants = protocol.protocol_constants(
        spec.ground, cal, protocol.MeasurementSetup(1, (1.0, 0.0, 0.0)), 5,
        (0.0, 1.0, 0.0),
    )
    analytic = protocol.feedback_objective(constants.xi, constants.eta, constants.theta)
    grid = [
        -math.pi / 2 + (k + 1) * math.pi / 721 for k in range(721)
    ]
    best = min(
        protocol.feedback_objective(constants.xi, constants.eta, t) for t in grid
    )
    assert analytic <= best + 1e-12, (
        f"analytic angle loses to the grid by {analytic - best}"
    )


@_register("qet-protocol/eta-distance-decay")
def _check_eta_decay():
    cal, spec = _prepared(10, 1.0, 1.0)
    setup = protocol.MeasurementSetup(0, (1.0, 0.0, 0.0))
    magnitudes = []
    for d in (3, 4, 5):
        constants = protocol.protocol_constants(
            spec.ground, cal, setup, d, (0.0, 1.0, 0.0)
        )
        magnitudes.append(abs(constants.eta))
    assert all(m > 0 for m in magnitudes), f"eta vanished somewhere: {magnitudes}"
    assert magnitudes[-1] < magnitudes[0], f"no decay across the scan: {magnitudes}"


@_register("qet-protocol/global-bookkeeping")
def _check_global_bookkeeping():
    cal, spec = _prepared(8, 1.0, 1.0)
    rng = np.random.default_rng(23)
    for _ in range(3):
        sender = int(rng.integers(8))
        receiver = (sender + 3) % 8
        report = protocol.run_protocol(
            cal,
            spec.ground,
            protocol.MeasurementSetup(sender, _random_direction(rng)),
            receiver,
            _random_direction(rng),
        )
        drift = abs(
            report.total_energy_after
            - (report.energy_input - report.teleported_energy)
        )
        assert drift < 1e-9, f"global bookkeeping off by {drift}"
        assert report.total_energy_after >= -1e-9


# ----------------------------------------------------------- energy-analysis


@_register("energy-analysis/negativity-implication")
def _check_negativity_implication():
    cal, spec = _prepared(8, 1.0, 1.0)
    for site in range(8):
        witness = max(
            analysis.correlation_witness(cal, spec.ground, site, m, axis="z")
            for m in range(8)
            if chain.site_distance(cal, site, m) >= 2
        )
        cert = analysis.negativity_certificate(cal, site)
        if witness > 1e-6:
            assert cert.lowest_eigenvalue < -1e-9, (
                f"site {site}: witness {witness} but lowest eigenvalue "
                f"{cert.lowest_eigenvalue}"
            )
        quotient = cert.rayleigh_quotient(cal.local_terms[site])
        assert abs(quotient - cert.lowest_eigenvalue) < 1e-9
    separable, sep_spec = _prepared(8, 1.0, 0.0)
    for site in range(8):
        cert = analysis.negativity_certificate(separable, site)
        assert cert.lowest_eigenvalue >= -1e-9, (
            f"separable chain shows negativity at {site}: {cert.lowest_eigenvalue}"
        )


@_register("energy-analysis/profile-additivity")
def _check_profile_additivity():
    cal, _ = _prepared(8, 1.0, 1.0)
    psi = _random_state(8, 77)
    prof = analysis.profile(psi, cal)
    whole = expectation_real(psi, cal.total)
    assert abs(prof.total - whole) < 1e-10, f"profile total off by {prof.total - whole}"


@_register("energy-analysis/flux-derivative-identity")
def _check_flux_identity():
    model = chain.build_ising(8, 1.0, 1.0, boundary="open")
    cal, spec = solve.solve_and_calibrate(model)
    for cut in range(7):
        value = analysis.flux(spec.ground, cal, cut)
        assert abs(value) < 1e-9, f"ground-state flux {value} at cut {cut}"
    region = chain.RegionSpec(2, 5)
    for seed in range(5):
        psi = _random_state(8, 900 + seed)
        rate = analysis.region_energy_rate(psi, cal, region)
        boundary_flow = analysis.flux(psi, cal, 1) - analysis.flux(psi, cal, 5)
        assert abs(rate - boundary_flow) < 1e-9, (
            f"rate {rate} vs boundary flux {boundary_flow}"
        )


@_register("energy-analysis/residual-bound-range")
def _check_residual_range():
    cal, spec = _prepared(8, 1.0, 1.0)
    measured = protocol.measure(
        spec.ground, protocol.MeasurementSetup(3, (1.0, 0.0, 0.0))
    )
    dependent = analysis.residual_bound(measured.ensemble, cal, 3)
    shared = analysis.residual_bound(
        measured.ensemble, cal, 3, outcome_dependent=False
    )
    assert dependent.value >= -1e-9, f"bound dipped negative: {dependent.value}"
    assert dependent.value <= dependent.do_nothing_value + 1e-10
    assert dependent.value <= shared.value + 1e-9, (
        "outcome-dependent rotations should never do worse"
    )
