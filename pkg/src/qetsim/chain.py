"""Finite-range spin-chain Hamiltonians with zero-point calibrated terms.

A chain model is a list of local Hermitian terms, one per site, each
supported on a window of half-width ``interaction_range`` around its site.
Calibration subtracts per-term constants so that every term has zero
ground-state expectation, which pins the ground energy to zero and makes
the total Hamiltonian positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .pauli import (
    OperatorSum,
    PauliTerm,
    StateVector,
    apply,
    expectation,
    sigma,
    to_matrix,
)

BOUNDARIES = ("open", "periodic")

#: |<g|T_n|g>| after calibration must stay below this
CALIBRATION_TOL = 1e-9
#: ||H g - E0 g|| accepted when calibrating against a supplied ground state
EIGENSTATE_RESIDUAL_TOL = 1e-7
#: gap below which the protocol pipeline refuses to pick a ground vector
DEGENERACY_GAP_TOL = 1e-8


@dataclass(frozen=True)
class ChainModel:
    """Chain Hamiltonian assembled from per-site local terms."""

    site_count: int
    interaction_range: int
    boundary: str
    local_terms: tuple[OperatorSum, ...]
    shifts: tuple[float, ...]
    total: OperatorSum
    calibrated: bool = False

    def __post_init__(self):
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if len(self.local_terms) != self.site_count:
            raise ValueError("need exactly one local term per site")

    def require_calibrated(self) -> "ChainModel":
        if not self.calibrated:
            raise ValueError("model must be calibrated first")
        return self


@dataclass(frozen=True)
class RegionSpec:
    """Connected site region ``[first, last]`` (inclusive bounds)."""

    first: int
    last: int

    def __post_init__(self):
        if self.first > self.last:
            raise ValueError(f"region [{self.first}, {self.last}] is empty")


def site_distance(model: ChainModel, a: int, b: int) -> int:
    """Distance between two sites, around the ring for periodic chains."""
    d = abs(a - b)
    if model.boundary == "periodic":
        d = min(d, model.site_count - d)
    return d


def window_sites_for(
    site_count: int, interaction_range: int, boundary: str, center: int
) -> tuple[int, ...]:
    raw = range(center - interaction_range, center + interaction_range + 1)
    if boundary == "periodic":
        return tuple(sorted({m % site_count for m in raw}))
    return tuple(m for m in raw if 0 <= m < site_count)


def window_sites(model: ChainModel, center: int) -> tuple[int, ...]:
    """Sites within ``interaction_range`` of ``center``, clipped or wrapped."""
    return window_sites_for(
        model.site_count, model.interaction_range, model.boundary, center
    )


def _sum_terms(terms: Iterable[OperatorSum]) -> OperatorSum:
    total = OperatorSum.zero()
    for t in terms:
        total = total + t
    return total


def build_ising(
    site_count: int, b: float, h: float, boundary: str = "periodic"
) -> ChainModel:
    """Transverse-field Ising chain, uncalibrated.

    Per-site term: ``-b sigma^z_n - (h/2) sigma^x_n (sigma^x_{n+1} + sigma^x_{n-1})``,
    so each x-x bond is shared between its two sites.  ``b`` is the field
    along z, ``h`` the coupling along x.  At open boundaries the missing
    neighbour factor is dropped.
    """
    if site_count < 3:
        raise ValueError(f"need at least 3 sites, got {site_count}")
    terms = []
    for n in range(site_count):
        parts = [PauliTerm(-b, {n: "z"})]
        for nb in (n + 1, n - 1):
            if boundary == "periodic":
                nb %= site_count
            elif not 0 <= nb < site_count:
                continue
            parts.append(PauliTerm(-h / 2.0, {n: "x", nb: "x"}))
        terms.append(OperatorSum(tuple(parts)))
    terms = tuple(terms)
    return ChainModel(
        site_count=site_count,
        interaction_range=1,
        boundary=boundary,
        local_terms=terms,
        shifts=(0.0,) * site_count,
        total=_sum_terms(terms),
    )


def build_custom(
    site_count: int,
    interaction_range: int,
    term_factory: Callable[[int], OperatorSum | Sequence[PauliTerm]],
    boundary: str = "periodic",
) -> ChainModel:
    """Chain model from user-supplied local terms.

    ``term_factory(n)`` must return a Hermitian operator supported within
    ``interaction_range`` of site ``n``.  Hermiticity is checked densely for
    small chains and symbolically otherwise.
    """
    if site_count < 3:
        raise ValueError(f"need at least 3 sites, got {site_count}")
    if interaction_range < 1:
        raise ValueError("interaction range must be at least 1")
    terms = []
    for n in range(site_count):
        made = term_factory(n)
        term = made if isinstance(made, OperatorSum) else OperatorSum(tuple(made))
        allowed = set(window_sites_for(site_count, interaction_range, boundary, n))
        if not term.support <= allowed:
            raise ValueError(
                f"term at site {n} touches {sorted(term.support - allowed)}, "
                f"outside its window of half-width {interaction_range}"
            )
        if site_count <= 10:
            dense = to_matrix(term, site_count)
            if np.max(np.abs(dense - dense.conj().T)) > 1e-10:
                raise ValueError(f"term at site {n} is not Hermitian")
        elif not term.is_hermitian(tol=1e-10):
            raise ValueError(f"term at site {n} is not Hermitian")
        terms.append(term)
    terms = tuple(terms)
    return ChainModel(
        site_count=site_count,
        interaction_range=interaction_range,
        boundary=boundary,
        local_terms=terms,
        shifts=(0.0,) * site_count,
        total=_sum_terms(terms),
    )


def calibrate(model: ChainModel, ground: StateVector) -> ChainModel:
    """Shift each local term so its expectation on ``ground`` vanishes.

    ``ground`` must be an eigenvector of the total Hamiltonian; constant
    shifts do not change eigenvectors, so the uncalibrated ground state is
    the calibrated one as well.
    """
    if ground.site_count != model.site_count:
        raise ValueError("ground state size does not match the model")
    ground.require_normalized(1e-10)
    hg = apply(model.total, ground)
    e0 = complex(np.vdot(ground.amplitudes, hg.amplitudes))
    residual = float(np.linalg.norm(hg.amplitudes - e0 * ground.amplitudes))
    if residual > EIGENSTATE_RESIDUAL_TOL:
        raise ValueError(
            f"supplied state is not an eigenstate: residual {residual:.3e} "
            f"exceeds {EIGENSTATE_RESIDUAL_TOL:.0e}"
        )
    shifts = []
    new_terms = []
    for n, term in enumerate(model.local_terms):
        value = expectation(ground, term)
        if abs(value.imag) > 1e-10:
            raise ValueError(f"term {n} has complex expectation {value}; not Hermitian?")
        eps = value.real
        shifts.append(eps)
        new_terms.append(term.shifted(-eps))
    new_terms = tuple(new_terms)
    return replace(
        model,
        local_terms=new_terms,
        shifts=tuple(shifts),
        total=_sum_terms(new_terms),
        calibrated=True,
    )


def localized_energy(model: ChainModel, site: int) -> OperatorSum:
    """Sum of all local terms whose window reaches ``site``."""
    model.require_calibrated()
    if not 0 <= site < model.site_count:
        raise ValueError(f"site {site} outside chain of {model.site_count} sites")
    return _sum_terms(model.local_terms[m] for m in window_sites(model, site))


def region_energy(model: ChainModel, region: RegionSpec) -> OperatorSum:
    """Energy operator of a connected region."""
    model.require_calibrated()
    n, reach = model.site_count, model.interaction_range
    if region.first < 0 or region.last >= n:
        raise ValueError(f"region [{region.first}, {region.last}] outside the chain")
    width = region.last - region.first
    if width < 2 * reach - 1:
        raise ValueError(
            f"region width {width} violates the minimum 2*range - 1 = {2 * reach - 1}"
        )
    return _sum_terms(model.local_terms[m] for m in range(region.first, region.last + 1))


def separable_control(site_count: int, boundary: str = "periodic") -> ChainModel:
    """Exactly-local reference model whose terms all commute: ``T_n = -sigma^z_n``."""
    return build_custom(
        site_count,
        1,
        lambda n: sigma("z", n, -1.0),
        boundary=boundary,
    )
