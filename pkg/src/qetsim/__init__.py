"""Spin-chain simulator for measurement-driven local energy extraction.

Builds finite chains from calibrated local energy terms, solves for ground
states densely or iteratively, runs the measure/communicate/feedback
protocol with exact two-branch bookkeeping, and certifies the energy
accounting against independent computations.
"""

from .analysis import (
    EnergyProfile,
    NegativityCertificate,
    ResidualBound,
    correlation_witness,
    flux,
    negativity_certificate,
    profile,
    residual_bound,
)
from .chain import (
    ChainModel,
    RegionSpec,
    build_custom,
    build_ising,
    calibrate,
    localized_energy,
    region_energy,
    separable_control,
    site_distance,
)
from .pauli import (
    DensityBlock,
    OperatorSum,
    PauliTerm,
    StateEnsemble,
    StateVector,
    apply,
    commutator,
    expectation,
    partial_trace,
    sigma,
)
from .protocol import (
    FeedbackSetup,
    MeasurementRecord,
    MeasurementSetup,
    ProtocolReport,
    energy_input,
    feedback,
    measure,
    projector,
    protocol_constants,
    run_protocol,
    sigma_dot,
)
from .solve import (
    ConvergenceError,
    CorrelationScan,
    DegenerateGroundStateError,
    SpectrumSlice,
    correlation_scan,
    dense_spectrum,
    krylov_ground,
    solve_and_calibrate,
)

__version__ = "0.1.0"

__all__ = [
    "ChainModel",
    "ConvergenceError",
    "CorrelationScan",
    "DegenerateGroundStateError",
    "DensityBlock",
    "EnergyProfile",
    "FeedbackSetup",
    "MeasurementRecord",
    "MeasurementSetup",
    "NegativityCertificate",
    "OperatorSum",
    "PauliTerm",
    "ProtocolReport",
    "RegionSpec",
    "ResidualBound",
    "SpectrumSlice",
    "StateEnsemble",
    "StateVector",
    "apply",
    "build_custom",
    "build_ising",
    "calibrate",
    "commutator",
    "correlation_scan",
    "correlation_witness",
    "dense_spectrum",
    "energy_input",
    "expectation",
    "feedback",
    "flux",
    "krylov_ground",
    "localized_energy",
    "measure",
    "negativity_certificate",
    "partial_trace",
    "profile",
    "projector",
    "protocol_constants",
    "region_energy",
    "residual_bound",
    "run_protocol",
    "sigma",
    "separable_control",
    "sigma_dot",
    "site_distance",
    "solve_and_calibrate",
]
