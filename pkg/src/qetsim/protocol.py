"""Measurement-plus-feedback energy transfer protocol on a calibrated chain.

The protocol runs in three steps: a projective spin measurement at the
sender site, classical transfer of the outcome, and an outcome-conditioned
rotation at the receiver site.  Everything is evaluated in the
instantaneous idealization: no Hamiltonian evolution happens between
steps, so states are propagated by the measurement and feedback operators
alone.  Both measurement branches are kept with their exact weights; a
seeded sampling helper exists for single-shot demonstrations only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analysis
from .chain import ChainModel, localized_energy, site_distance
from .pauli import (
    OperatorSum,
    PauliTerm,
    StateEnsemble,
    StateVector,
    apply,
    commutator,
    expectation_real,
    matrix_element,
)

#: branch probabilities below this are treated as exactly excluded
BRANCH_FLOOR = 1e-14
#: xi^2 + eta^2 below this means the feedback angle is undetermined
DEGENERATE_CONSTANTS_TOL = 1e-20

_AX = ("x", "y", "z")


def _unit_vector(direction) -> tuple[float, float, float]:
    vec = tuple(float(c) for c in direction)
    if len(vec) != 3:
        raise ValueError("direction must be a real 3-vector")
    norm = math.sqrt(sum(c * c for c in vec))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"direction must be unit length, got norm {norm}")
    return vec


def spin_along(site: int, direction) -> OperatorSum:
    """``u . sigma`` at one site, for a unit 3-vector ``u``."""
    vec = _unit_vector(direction)
    return OperatorSum(
        tuple(PauliTerm(c, {site: ax}) for c, ax in zip(vec, _AX) if c != 0.0)
    )


@dataclass(frozen=True)
class MeasurementSetup:
    """Projective measurement of ``u . sigma`` at one site."""

    site: int
    direction: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit_vector(self.direction))

    def observable(self) -> OperatorSum:
        return spin_along(self.site, self.direction)


@dataclass(frozen=True)
class FeedbackSetup:
    """Outcome-conditioned rotation ``cos(angle) I + i (-1)^mu sin(angle) u.sigma``."""

    site: int
    direction: tuple[float, float, float]
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit_vector(self.direction))
        if not -math.pi / 2 < self.angle <= math.pi / 2:
            raise ValueError(f"angle {self.angle} outside (-pi/2, pi/2]")

    def observable(self) -> OperatorSum:
        return spin_along(self.site, self.direction)


@dataclass(frozen=True)
class MeasurementRecord:
    """One measurement branch: outcome, weight and normalized post state."""

    outcome: int
    probability: float
    post_state: Optional[StateVector]
    excluded: bool = False


def projector(setup: MeasurementSetup, outcome: int) -> OperatorSum:
    """Projector onto the ``(-1)^outcome`` eigenspace of the measured spin."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    sign = 0.5 if outcome == 0 else -0.5
    return OperatorSum.identity(0.5) + sign * setup.observable()


@dataclass(frozen=True)
class Measurement:
    records: tuple[MeasurementRecord, MeasurementRecord]
    ensemble: StateEnsemble


def measure(ground: StateVector, setup: MeasurementSetup) -> Measurement:
    """Both measurement branches plus the averaged post-measurement ensemble."""
    ground.require_normalized(1e-10)
    if setup.site >= ground.site_count:
        raise ValueError(
            f"measurement site {setup.site} outside chain of {ground.site_count} sites"
        )
    records = []
    weights, states = [], []
    for outcome in (0, 1):
        branch = apply(projector(setup, outcome), ground)
        prob = float(branch.norm**2)
        if prob < BRANCH_FLOOR:
            records.append(MeasurementRecord(outcome, prob, None, excluded=True))
            continue
        post = StateVector(branch.amplitudes / math.sqrt(prob), ground.site_count)
        records.append(MeasurementRecord(outcome, prob, post))
        weights.append(prob)
        states.append(post)
    total = sum(weights)
    ensemble = StateEnsemble(
        tuple(w / total for w in weights), tuple(states)
    )
    return Measurement(tuple(records), ensemble)


def energy_input(
    ground: StateVector, setup: MeasurementSetup, model: ChainModel
) -> float:
    """Mean energy deposited by the projective measurement."""
    model.require_calibrated()
    measured = measure(ground, setup)
    return sum(
        w * expectation_real(s, model.total) for w, s in measured.ensemble.branches()
    )


def sigma_dot(model: ChainModel, site: int, direction) -> OperatorSum:
    """Time-derivative operator of the receiver spin at t = 0.

    Built from the localized energy window around ``site``; all farther
    terms commute with the spin, so this equals the commutator with the
    full Hamiltonian.
    """
    spin = spin_along(site, direction)
    return 1j * commutator(localized_energy(model, site), spin)


@dataclass(frozen=True)
class ProtocolConstants:
    xi: float
    eta: float
    theta: float
    degenerate: bool = False


def protocol_constants(
    ground: StateVector,
    model: ChainModel,
    measurement: MeasurementSetup,
    receiver_site: int,
    receiver_direction,
) -> ProtocolConstants:
    """The two ground-state correlators that fix the optimal feedback angle.

    ``xi`` is the energy of the spin-flipped ground state, ``eta`` the
    correlator between the measured spin and the receiver spin's time
    derivative.  The angle satisfies ``cos 2t = xi / r`` and
    ``sin 2t = -eta / r`` with ``r = sqrt(xi^2 + eta^2)``, resolved into
    (-pi/2, pi/2] by the two-argument arctangent.
    """
    model.require_calibrated()
    spin_b = spin_along(receiver_site, receiver_direction)
    flipped = apply(spin_b, ground)
    xi = matrix_element(flipped, model.total, flipped)
    if abs(xi.imag) > 1e-10:
        raise ValueError(f"xi has a non-real value {xi}")
    xi = xi.real
    if xi < -1e-10:
        raise ValueError(f"xi = {xi} violates Hamiltonian non-negativity")

    derivative = sigma_dot(model, receiver_site, receiver_direction)
    measured_side = apply(measurement.observable(), ground)
    eta = complex(
        np.vdot(measured_side.amplitudes, apply(derivative, ground).amplitudes)
    )
    if abs(eta.imag) > 1e-10:
        raise ValueError(f"eta has a non-real value {eta}")
    eta = eta.real

    if xi * xi + eta * eta < DEGENERATE_CONSTANTS_TOL:
        return ProtocolConstants(xi, eta, 0.0, degenerate=True)
    theta = 0.5 * math.atan2(-eta, xi)
    return ProtocolConstants(xi, eta, theta)


def feedback_unitary(setup: FeedbackSetup, outcome: int) -> OperatorSum:
    sign = 1.0 if outcome == 0 else -1.0
    return OperatorSum.identity(math.cos(setup.angle)) + (
        1j * sign * math.sin(setup.angle)
    ) * setup.observable()


def feedback(
    state: StateVector, setup: FeedbackSetup, outcome: int
) -> StateVector:
    """Apply the outcome-conditioned feedback rotation to one branch."""
    out = apply(feedback_unitary(setup, outcome), state)
    if abs(out.norm - 1.0) > 1e-12:
        raise ValueError(f"feedback rotation changed the norm to {out.norm}")
    return out


def feedback_objective(xi: float, eta: float, theta: float) -> float:
    """Receiver-window energy after feedback with an arbitrary angle."""
    return 0.5 * xi * (1.0 - math.cos(2 * theta)) + 0.5 * eta * math.sin(2 * theta)


def teleported_energy(xi: float, eta: float) -> float:
    """Closed-form mean energy gained by the receiver at the optimal angle."""
    return 0.5 * (math.sqrt(xi * xi + eta * eta) - xi)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    value: float
    tolerance: float

    def to_dict(self) -> dict:
        return {"passed": bool(self.passed), "value": self.value, "tolerance": self.tolerance}


@dataclass(frozen=True)
class ProtocolReport:
    """Full bookkeeping of one protocol run with both branches kept exactly."""

    xi: float
    eta: float
    theta: float
    degenerate: bool
    energy_input: float
    teleported_energy: float
    teleported_energy_direct: float
    receiver_local_energy_after: float
    sender_local_energy_before: float
    sender_local_energy_after: float
    total_energy_after: float
    probabilities: tuple[float, float]
    records: tuple[MeasurementRecord, ...] = field(repr=False)
    profiles: dict = field(repr=False)
    checks: dict = field(repr=False)
    measurement: MeasurementSetup = field(repr=False, default=None)
    feedback: FeedbackSetup = field(repr=False, default=None)

    @property
    def all_checks_passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "eta": self.eta,
            "theta": self.theta,
            "degenerate": self.degenerate,
            "e_a": self.energy_input,
            "e_b": self.teleported_energy,
            "e_b_direct": self.teleported_energy_direct,
            "receiver_local_energy_after": self.receiver_local_energy_after,
            "sender_local_energy_before": self.sender_local_energy_before,
            "sender_local_energy_after": self.sender_local_energy_after,
            "total_energy_after": self.total_energy_after,
            "p": list(self.probabilities),
            "checks": {name: c.to_dict() for name, c in self.checks.items()},
        }


def run_protocol(
    model: ChainModel,
    ground: StateVector,
    measurement: MeasurementSetup,
    receiver_site: int,
    receiver_direction,
) -> ProtocolReport:
    """Execute measurement, classical transfer and feedback; verify bookkeeping.

    The sender and receiver windows must not overlap
    (``distance > 2 * interaction_range``), which is what makes the
    receiver window carry exactly zero energy before feedback and the
    closed-form accounting exact.
    """
    model.require_calibrated()
    reach = model.interaction_range
    distance = site_distance(model, measurement.site, receiver_site)
    if distance <= 2 * reach:
        raise ValueError(
            f"sites {measurement.site} and {receiver_site} are {distance} apart; "
            f"the protocol requires separation greater than {2 * reach}"
        )

    measured = measure(ground, measurement)
    probabilities = tuple(r.probability for r in measured.records)
    after_measurement = measured.ensemble

    e_a = sum(
        w * expectation_real(s, model.total) for w, s in after_measurement.branches()
    )

    constants = protocol_constants(
        ground, model, measurement, receiver_site, receiver_direction
    )
    fb = FeedbackSetup(receiver_site, receiver_direction, constants.theta)

    final_weights, final_states = [], []
    for record in measured.records:
        if record.excluded:
            continue
        final_weights.append(record.probability)
        final_states.append(feedback(record.post_state, fb, record.outcome))
    total_w = sum(final_weights)
    after_feedback = StateEnsemble(
        tuple(w / total_w for w in final_weights), tuple(final_states)
    )

    sender_window = localized_energy(model, measurement.site)
    receiver_window = localized_energy(model, receiver_site)

    receiver_before = sum(
        w * expectation_real(s, receiver_window)
        for w, s in after_measurement.branches()
    )
    receiver_after = sum(
        w * expectation_real(s, receiver_window) for w, s in after_feedback.branches()
    )
    sender_before = sum(
        w * expectation_real(s, sender_window) for w, s in after_measurement.branches()
    )
    sender_after = sum(
        w * expectation_real(s, sender_window) for w, s in after_feedback.branches()
    )
    total_after = sum(
        w * expectation_real(s, model.total) for w, s in after_feedback.branches()
    )

    e_b = teleported_energy(constants.xi, constants.eta)
    e_b_direct = receiver_before - receiver_after

    profile_step1 = analysis.profile(after_measurement, model, label="step1")
    profiles = {
        "ground": analysis.profile(ground, model, label="ground"),
        "step1": profile_step1,
        "step2": profile_step1,  # classical transfer moves no energy
        "step3": analysis.profile(after_feedback, model, label="step3"),
    }

    closed_form_after = 0.5 * (
        constants.xi - math.sqrt(constants.xi**2 + constants.eta**2)
    )
    outside_sender = [
        n
        for n in range(model.site_count)
        if site_distance(model, n, measurement.site) > reach
    ]
    localization = max(
        abs(profiles["step1"].values[n]) for n in outside_sender
    )
    sender_sites = [
        n
        for n in range(model.site_count)
        if site_distance(model, n, measurement.site) <= reach
    ]
    receiver_sites = [
        n
        for n in range(model.site_count)
        if site_distance(model, n, receiver_site) <= reach
    ]
    bump_weight = sum(profiles["step1"].values[n] for n in sender_sites)
    well_depth = sum(
        profiles["step3"].values[n] for n in receiver_sites
    )

    checks = {
        "probability-completeness": CheckResult(
            abs(sum(probabilities) - 1.0) < 1e-12, sum(probabilities), 1e-12
        ),
        "receiver-zero-before-feedback": CheckResult(
            abs(receiver_before) < 1e-9, receiver_before, 1e-9
        ),
        "teleported-energy-closed-form": CheckResult(
            abs(e_b - e_b_direct) < 1e-9, e_b - e_b_direct, 1e-9
        ),
        "receiver-local-energy-closed-form": CheckResult(
            abs(receiver_after - closed_form_after) < 1e-9,
            receiver_after - closed_form_after,
            1e-9,
        ),
        "receiver-energy-negation": CheckResult(
            abs(receiver_after + e_b) < 1e-9, receiver_after + e_b, 1e-9
        ),
        "sender-local-energy-unchanged": CheckResult(
            abs(sender_after - sender_before) < 1e-9,
            sender_after - sender_before,
            1e-9,
        ),
        "sender-window-carries-input": CheckResult(
            abs(sender_before - e_a) < 1e-9, sender_before - e_a, 1e-9
        ),
        "measurement-energy-localization": CheckResult(
            localization < 1e-9, localization, 1e-9
        ),
        "step1-bump-weight": CheckResult(
            abs(bump_weight - e_a) < 1e-9, bump_weight - e_a, 1e-9
        ),
        "step3-well-depth": CheckResult(
            abs(well_depth + e_b) < 1e-9, well_depth + e_b, 1e-9
        ),
        "global-energy-bookkeeping": CheckResult(
            abs(total_after - (e_a - e_b)) < 1e-9, total_after - (e_a - e_b), 1e-9
        ),
        "total-energy-nonnegative": CheckResult(
            total_after >= -1e-9, total_after, 1e-9
        ),
    }

    return ProtocolReport(
        xi=constants.xi,
        eta=constants.eta,
        theta=constants.theta,
        degenerate=constants.degenerate,
        energy_input=e_a,
        teleported_energy=e_b,
        teleported_energy_direct=e_b_direct,
        receiver_local_energy_after=receiver_after,
        sender_local_energy_before=sender_before,
        sender_local_energy_after=sender_after,
        total_energy_after=total_after,
        probabilities=probabilities,
        records=measured.records,
        profiles=profiles,
        checks=checks,
        measurement=measurement,
        feedback=fb,
    )


def direction_grid(count: int) -> tuple[tuple[float, float, float], ...]:
    """Deterministic quasi-uniform grid of unit vectors (golden-spiral)."""
    if count < 1:
        raise ValueError("need at least one grid point")
    golden = math.pi * (3.0 - math.sqrt(5.0))
    out = []
    for k in range(count):
        z = 1.0 - 2.0 * (k + 0.5) / count
        r = math.sqrt(max(0.0, 1.0 - z * z))
        phi = golden * k
        v = (r * math.cos(phi), r * math.sin(phi), z)
        norm = math.sqrt(sum(c * c for c in v))
        out.append(tuple(c / norm for c in v))
    return tuple(out)


def search_feedback_direction(
    ground: StateVector,
    model: ChainModel,
    measurement: MeasurementSetup,
    receiver_site: int,
    grid_points: int = 64,
) -> tuple[tuple[float, float, float], float]:
    """Best receiver direction on a fixed grid, by teleported energy.

    Plain grid search; the direction maximizing the gain has no known
    closed form, so this makes no optimality claim beyond the grid.
    """
    best_direction, best_gain = None, -math.inf
    for direction in direction_grid(grid_points):
        constants = protocol_constants(
            ground, model, measurement, receiver_site, direction
        )
        gain = teleported_energy(constants.xi, constants.eta)
        if gain > best_gain:
            best_direction, best_gain = direction, gain
    return best_direction, best_gain


def sample_outcomes(
    ground: StateVector, setup: MeasurementSetup, shots: int, seed: int
) -> dict[int, int]:
    """Seeded single-shot outcome counts; demonstration only.

    The deterministic two-branch evaluation above is what every numeric
    claim is checked against.
    """
    measured = measure(ground, setup)
    p0 = measured.records[0].probability
    rng = np.random.default_rng(seed)
    ones = int(rng.binomial(shots, 1.0 - p0))
    return {0: shots - ones, 1: ones}
