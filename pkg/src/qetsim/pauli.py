"""Exact Pauli-string operator algebra on a chain of qubits.

Operators are kept symbolically as sums of weighted Pauli strings and are
applied to state vectors without ever materialising a ``2^N x 2^N`` matrix,
so chains of up to ~20 sites stay cheap.  Dense matrices are available
through :func:`to_matrix` for oracle-grade cross checks at small sizes.

Basis convention, fixed project wide: basis state index ``b`` stores the
spin of site ``m`` in bit ``m``, i.e. ``(b >> m) & 1``, and bit value 0 is
the +1 eigenstate of ``sigma^z``.  Site 0 is the least significant bit and
the all-up product state is index 0.  Every dense oracle in the test suite
shares this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

AXES = ("x", "y", "z")

#: coefficients below this are dropped after symbolic simplification
PRUNE_TOL = 1e-14

# single-site product table: (left, right) -> (scalar, resulting axis)
# sigma^a sigma^b = delta_ab I + i eps_abc sigma^c
_PRODUCT = {
    ("x", "y"): (1j, "z"),
    ("y", "z"): (1j, "x"),
    ("z", "x"): (1j, "y"),
    ("y", "x"): (-1j, "z"),
    ("z", "y"): (-1j, "x"),
    ("x", "z"): (-1j, "y"),
}

PAULI_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_ID2 = np.eye(2, dtype=complex)


def _freeze_factors(factors) -> tuple[tuple[int, str], ...]:
    if isinstance(factors, Mapping):
        items = factors.items()
    else:
        items = tuple(factors)
    seen: dict[int, str] = {}
    for site, axis in items:
        site = int(site)
        if site < 0:
            raise ValueError(f"site index must be non-negative, got {site}")
        if axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
        if site in seen:
            raise ValueError(f"site {site} appears more than once in factors")
        seen[site] = axis
    return tuple(sorted(seen.items()))


@dataclass(frozen=True)
class PauliTerm:
    """A scalar multiple of a product of single-site Pauli operators.

    ``factors`` maps site index to an axis in ``{"x", "y", "z"}``; absent
    sites act as identity.  An empty factor map represents ``coefficient * I``.
    """

    coefficient: complex
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "factors", _freeze_factors(self.factors))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(site for site, _ in self.factors)

    @property
    def is_identity(self) -> bool:
        return not self.factors

    def dagger(self) -> "PauliTerm":
        # Pauli strings are Hermitian, only the coefficient conjugates.
        return PauliTerm(self.coefficient.conjugate(), self.factors)

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            phase = 1 + 0j
            merged = dict(self.factors)
            for site, right in other.factors:
                left = merged.pop(site, None)
                if left is None:
                    merged[site] = right
                elif left == right:
                    continue  # sigma^a sigma^a = I
                else:
                    scalar, axis = _PRODUCT[(left, right)]
                    phase *= scalar
                    merged[site] = axis
            return PauliTerm(self.coefficient * other.coefficient * phase, merged)
        if isinstance(other, (int, float, complex)):
            return PauliTerm(self.coefficient * other, self.factors)
        return NotImplemented

    __rmul__ = __mul__


def _combine(terms: Iterable[PauliTerm]) -> tuple[PauliTerm, ...]:
    acc: dict[tuple, complex] = {}
    for t in terms:
        acc[t.factors] = acc.get(t.factors, 0j) + t.coefficient
    kept = [PauliTerm(c, f) for f, c in acc.items() if abs(c) >= PRUNE_TOL]
    kept.sort(key=lambda t: t.factors)
    return tuple(kept)


@dataclass(frozen=True)
class OperatorSum:
    """A sum of :class:`PauliTerm`, canonicalised and pruned."""

    terms: tuple[PauliTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _combine(self.terms))

    @classmethod
    def identity(cls, coefficient: complex = 1.0) -> "OperatorSum":
        return cls((PauliTerm(coefficient),))

    @classmethod
    def zero(cls) -> "OperatorSum":
        return cls(())

    @property
    def support(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self.terms:
            out |= t.support
        return frozenset(out)

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def dagger(self) -> "OperatorSum":
        return OperatorSum(tuple(t.dagger() for t in self.terms))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        # canonical form has unique strings, so hermiticity reduces to
        # every coefficient being real
        return all(abs(t.coefficient.imag) <= tol for t in self.terms)

    def shifted(self, constant: float) -> "OperatorSum":
        """Return this operator plus ``constant * I``."""
        return OperatorSum(self.terms + (PauliTerm(constant),))

    def __add__(self, other):
        if isinstance(other, OperatorSum):
            return OperatorSum(self.terms + other.terms)
        if isinstance(other, PauliTerm):
            return OperatorSum(self.terms + (other,))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, (OperatorSum, PauliTerm)):
            return self + (-1.0) * other
        return NotImplemented

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return OperatorSum(tuple(other * t for t in self.terms))
        if isinstance(other, PauliTerm):
            other = OperatorSum((other,))
        if isinstance(other, OperatorSum):
            return OperatorSum(
                tuple(a * b for a in self.terms for b in other.terms)
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.__mul__(other)
        if isinstance(other, PauliTerm):
            return OperatorSum((other,)) * self
        return NotImplemented


def operator_sum(terms: Iterable[PauliTerm]) -> OperatorSum:
    return OperatorSum(tuple(terms))


def sigma(axis: str, site: int, coefficient: complex = 1.0) -> OperatorSum:
    """Single Pauli operator ``coefficient * sigma^axis_site`` as a sum."""
    return OperatorSum((PauliTerm(coefficient, {site: axis}),))


def commutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """``a b - b a`` with products simplified symbolically."""
    return a * b - b * a


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over the ``2^site_count`` chain basis."""

    amplitudes: np.ndarray
    site_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] != 1 << self.site_count:
            raise ValueError(
                f"amplitude vector of length {amps.shape} does not match "
                f"{self.site_count} sites"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def computational_basis(cls, site_count: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << site_count, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, site_count)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.site_count)

    def require_normalized(self, tol: float = 1e-12) -> "StateVector":
        if abs(self.norm - 1.0) > tol:
            raise ValueError(f"state norm {self.norm} deviates from 1 by more than {tol}")
        return self


@dataclass(frozen=True)
class StateEnsemble:
    """Weighted mixture of pure states, kept as explicit branches."""

    weights: tuple[float, ...]
    states: tuple[StateVector, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.states) or not self.states:
            raise ValueError("ensemble needs matching, non-empty weights and states")
        n = self.states[0].site_count
        if any(s.site_count != n for s in self.states):
            raise ValueError("ensemble states live on different chains")
        if any(w < -1e-12 for w in self.weights):
            raise ValueError("ensemble weights must be non-negative")
        total = sum(self.weights)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"ensemble weights sum to {total}, expected 1")

    @property
    def site_count(self) -> int:
        return self.states[0].site_count

    def branches(self):
        return zip(self.weights, self.states)


StateLike = Union[StateVector, StateEnsemble]


def _term_masks(term: PauliTerm) -> tuple[int, int, int]:
    xmask = yzmask = ny = 0
    for site, axis in term.factors:
        if axis != "z":
            xmask |= 1 << site
        if axis != "x":
            yzmask |= 1 << site
        if axis == "y":
            ny += 1
    return xmask, yzmask, ny


def _term_action(amps: np.ndarray, idx: np.ndarray, term: PauliTerm) -> np.ndarray:
    xmask, yzmask, ny = _term_masks(term)
    src = idx if xmask == 0 else idx ^ xmask
    vals = amps[src]
    if yzmask:
        sign = 1 - 2 * (np.bitwise_count(src & yzmask).astype(np.int64) & 1)
        vals = vals * sign
    return (term.coefficient * (1j) ** ny) * vals


class OperatorAction:
    """Reusable matrix-free application of an operator at a fixed chain size.

    Precomputes per-term index and sign data so repeated applications (as in
    an iterative eigensolver) avoid redundant bit work.
    """

    def __init__(self, op: OperatorSum, site_count: int):
        _check_support(op, site_count)
        self.site_count = site_count
        size = 1 << site_count
        idx = np.arange(size, dtype=np.int64)
        sign_cache: dict[int, np.ndarray] = {}
        self._parts = []
        for term in op.terms:
            xmask, yzmask, ny = _term_masks(term)
            if yzmask not in sign_cache:
                if yzmask:
                    sign_cache[yzmask] = (
                        1 - 2 * (np.bitwise_count(idx & yzmask).astype(np.int8) & 1)
                    ).astype(np.int8)
                else:
                    sign_cache[yzmask] = None
            self._parts.append(
                (term.coefficient * (1j) ** ny, xmask, sign_cache[yzmask])
            )
        self._idx = idx

    def __call__(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(vec)
        idx = self._idx
        for coeff, xmask, sign in self._parts:
            src = idx if xmask == 0 else idx ^ xmask
            vals = vec[src]
            if sign is not None:
                vals = vals * sign[src]
            out += coeff * vals
        return out


def _check_support(op: OperatorSum, site_count: int) -> None:
    for site in op.support:
        if site >= site_count:
            raise ValueError(
                f"operator touches site {site} but the chain has {site_count} sites"
            )


def apply(op: OperatorSum, state: StateVector) -> StateVector:
    """Apply ``op`` to ``state`` term by term; result is not renormalised."""
    _check_support(op, state.site_count)
    amps = state.amplitudes
    idx = np.arange(amps.shape[0], dtype=np.int64)
    out = np.zeros_like(amps)
    for term in op.terms:
        out += _term_action(amps, idx, term)
    return StateVector(out, state.site_count)


def matrix_element(bra: StateVector, op: OperatorSum, ket: StateVector) -> complex:
    """``<bra| op |ket>``."""
    if bra.site_count != ket.site_count:
        raise ValueError(
            f"bra has {bra.site_count} sites but ket has {ket.site_count}"
        )
    return complex(np.vdot(bra.amplitudes, apply(op, ket).amplitudes))


def expectation(state: StateLike, op: OperatorSum) -> complex:
    """``<state| op |state>``; for ensembles, the weighted branch average."""
    if isinstance(state, StateEnsemble):
        return sum(w * expectation(s, op) for w, s in state.branches())
    return matrix_element(state, op, state)


def expectation_real(state: StateLike, op: OperatorSum, tol: float = 1e-10) -> float:
    value = expectation(state, op)
    if abs(value.imag) > tol:
        raise ValueError(
            f"expectation of a Hermitian operator came out complex: {value}"
        )
    return value.real


@dataclass(frozen=True)
class DensityBlock:
    """Reduced density matrix on an ordered subset of sites.

    Block basis index ``k`` stores the spin of ``sites[i]`` in bit ``i``,
    matching the chain-wide bit convention.
    """

    sites: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        dim = 1 << len(self.sites)
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not fit sites {self.sites}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def validate(self, trace_tol: float = 1e-12, psd_tol: float = -1e-10) -> "DensityBlock":
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("density block is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density block trace {tr} deviates from 1")
        if np.min(np.linalg.eigvalsh(m)) < psd_tol:
            raise ValueError("density block has a significantly negative eigenvalue")
        return self


def partial_trace(state: StateLike, keep: Sequence[int]) -> DensityBlock:
    """Reduced density matrix of a pure state or ensemble on ``keep``."""
    keep = tuple(int(s) for s in keep)
    if not keep:
        raise ValueError("keep set must not be empty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"keep sites must be unique, got {keep}")
    if isinstance(state, StateEnsemble):
        branches = list(state.branches())
        n = state.site_count
    else:
        branches = [(1.0, state)]
        n = state.site_count
    if any(s < 0 or s >= n for s in keep):
        raise ValueError(f"keep sites {keep} outside chain of {n} sites")

    rest = [s for s in range(n) if s not in keep]
    # tensor axis for site m is (n - 1 - m); flatten order wants the highest
    # block bit first, i.e. keep[-1] leads
    axes = [n - 1 - s for s in reversed(keep)] + [n - 1 - s for s in rest]
    dim = 1 << len(keep)
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for w, s in branches:
        tensor = s.amplitudes.reshape((2,) * n).transpose(axes)
        m = tensor.reshape(dim, -1)
        rho += w * (m @ m.conj().T)
    return DensityBlock(keep, rho).validate()


def to_matrix(op: OperatorSum, site_count: int) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix of ``op``; oracle and small-size use only."""
    if site_count > 12:
        raise ValueError(
            f"dense matrix for {site_count} sites would need "
            f"{(1 << site_count) ** 2 * 16 / 2**30:.1f} GiB; use apply() instead"
        )
    _check_support(op, site_count)
    dim = 1 << site_count
    out = np.zeros((dim, dim), dtype=np.complex128)
    for term in op.terms:
        factors = dict(term.factors)
        m = np.array([[term.coefficient]], dtype=np.complex128)
        for site in range(site_count - 1, -1, -1):
            m = np.kron(m, PAULI_MATRICES[factors[site]] if site in factors else _ID2)
        out += m
    return out


def matrix_on_sites(op: OperatorSum, sites: Sequence[int]) -> np.ndarray:
    """Dense matrix of ``op`` restricted to ``sites`` (its support block).

    Block bit ``i`` corresponds to ``sites[i]``, as in :class:`DensityBlock`.
    """
    sites = tuple(sites)
    if not op.support <= set(sites):
        raise ValueError(f"operator support {sorted(op.support)} not within {sites}")
    dim = 1 << len(sites)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for term in op.terms:
        factors = dict(term.factors)
        m = np.array([[term.coefficient]], dtype=np.complex128)
        for site in reversed(sites):
            m = np.kron(m, PAULI_MATRICES[factors[site]] if site in factors else _ID2)
        out += m
    return out


def embed_on_sites(
    block_amplitudes: np.ndarray, sites: Sequence[int], site_count: int
) -> StateVector:
    """Lift a state on ``sites`` to the full chain, all other sites spin-up."""
    sites = tuple(sites)
    amps = np.zeros(1 << site_count, dtype=np.complex128)
    for k, value in enumerate(np.asarray(block_amplitudes, dtype=np.complex128)):
        full = 0
        for i, site in enumerate(sites):
            if (k >> i) & 1:
                full |= 1 << site
        amps[full] = value
    return StateVector(amps, site_count)


def apply_on_site(gate: np.ndarray, site: int, state: StateVector) -> StateVector:
    """Apply a single-qubit gate (2x2 matrix) to ``site``."""
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ValueError("gate must be a 2x2 matrix")
    n = state.site_count
    if site < 0 or site >= n:
        raise ValueError(f"site {site} outside chain of {n} sites")
    high, low = 1 << (n - site - 1), 1 << site
    tensor = state.amplitudes.reshape(high, 2, low)
    out = np.einsum("ab,hbl->hal", gate, tensor)
    return StateVector(out.reshape(-1), n)
