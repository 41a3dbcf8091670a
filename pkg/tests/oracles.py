"""Independent dense-matrix oracles for cross checks.

Everything here is built straight from 2x2 matrices and Kronecker
products, sharing only the bit convention with the library (site m lives
in bit m, bit 0 is spin up), never its code paths.
"""

import numpy as np

ID2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = {"x": SX, "y": SY, "z": SZ}


def site_matrix(site_count: int, site: int, single: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in range(site_count - 1, -1, -1):
        out = np.kron(out, single if m == site else ID2)
    return out


def string_matrix(site_count: int, coefficient, factors) -> np.ndarray:
    out = np.array([[complex(coefficient)]])
    factors = dict(factors)
    for m in range(site_count - 1, -1, -1):
        out = np.kron(out, SIGMA[factors[m]] if m in factors else ID2)
    return out


def operator_matrix(site_count: int, op) -> np.ndarray:
    """Dense matrix of an OperatorSum, rebuilt from raw term data."""
    dim = 1 << site_count
    out = np.zeros((dim, dim), dtype=complex)
    for term in op.terms:
        out += string_matrix(site_count, term.coefficient, term.factors)
    return out


def ising_matrix(site_count: int, b: float, h: float, boundary: str = "periodic"):
    dim = 1 << site_count
    out = np.zeros((dim, dim), dtype=complex)
    for n in range(site_count):
        out -= b * site_matrix(site_count, n, SZ)
    bonds = site_count if boundary == "periodic" else site_count - 1
    for n in range(bonds):
        out -= h * (
            site_matrix(site_count, n, SX)
            @ site_matrix(site_count, (n + 1) % site_count, SX)
        )
    return out


def ground_vector(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    values, vectors = np.linalg.eigh(matrix)
    return float(values[0]), vectors[:, 0]


def reduced_density(amplitudes: np.ndarray, site_count: int, keep) -> np.ndarray:
    """Reduced density matrix by explicit outer-product accumulation."""
    keep = tuple(keep)
    dim = 1 << len(keep)
    rho = np.zeros((dim, dim), dtype=complex)
    rest = [s for s in range(site_count) if s not in keep]
    for i in range(1 << site_count):
        for j in range(1 << site_count):
            if any((i >> r) & 1 != (j >> r) & 1 for r in rest):
                continue
            bi = sum(((i >> s) & 1) << k for k, s in enumerate(keep))
            bj = sum(((j >> s) & 1) << k for k, s in enumerate(keep))
            rho[bi, bj] += amplitudes[i] * np.conj(amplitudes[j])
    return rho
