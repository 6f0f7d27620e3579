"""Dense operator algebra for small multi-qubit systems.

Operators are plain ``numpy`` complex arrays. :class:`Observable` and
:class:`DensityState` wrap an array together with the checks that the rest
of the package relies on (Hermitian and involutory observables, valid
density matrices).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import numpy.typing as npt

CMatrix = npt.NDArray[np.complex128]

ATOL = 1e-12
MAX_QUBITS = 8

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def as_cmatrix(data) -> CMatrix:
    """Return ``data`` as a square, finite, power-of-two complex matrix."""
    m = np.array(data, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    if dim < 1 or dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    m.setflags(write=False)
    return m


def n_qubits_of(m: CMatrix) -> int:
    return int(m.shape[0]).bit_length() - 1


def identity(dim: int) -> CMatrix:
    return as_cmatrix(np.eye(dim))


def dagger(m: CMatrix) -> CMatrix:
    return m.conj().T


def _check_conformable(*ms: CMatrix) -> None:
    shapes = {m.shape for m in ms}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


def matmul(*ms: CMatrix) -> CMatrix:
    """Ordered product ``ms[0] @ ms[1] @ ...``."""
    _check_conformable(*ms)
    return reduce(np.matmul, ms)


def add(a: CMatrix, b: CMatrix) -> CMatrix:
    _check_conformable(a, b)
    return a + b


def scale(c: complex, m: CMatrix) -> CMatrix:
    return c * m


def trace(m: CMatrix) -> complex:
    return complex(np.trace(m))


def commutator(a: CMatrix, b: CMatrix) -> CMatrix:
    _check_conformable(a, b)
    return a @ b - b @ a


def anticommutator(a: CMatrix, b: CMatrix) -> CMatrix:
    _check_conformable(a, b)
    return a @ b + b @ a


def is_hermitian(m: CMatrix, atol: float = ATOL) -> bool:
    return bool(np.allclose(m, dagger(m), rtol=0, atol=atol))


def kron_all(factors) -> CMatrix:
    return reduce(np.kron, factors)


@dataclass(frozen=True)
class Observable:
    """Hermitian operator that squares to the identity."""

    matrix: CMatrix
    label: str = ""
    atol: float = field(default=ATOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not is_hermitian(m, self.atol):
            raise ValueError(f"observable {self.label!r} is not Hermitian")
        if not np.allclose(m @ m, np.eye(m.shape[0]), rtol=0, atol=self.atol):
            raise ValueError(f"observable {self.label!r} does not square to the identity")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.matrix)


@dataclass(frozen=True)
class DensityState:
    matrix: CMatrix

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not is_hermitian(m):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > ATOL:
            raise ValueError(f"density matrix has trace {np.trace(m).real:.3g}, expected 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.matrix)


def pauli_on_site(which: str, site: int, n_qubits: int) -> Observable:
    """Pauli ``which`` acting on ``site`` (site 0 is the leftmost factor)."""
    if which not in PAULI:
        raise ValueError(f"unknown Pauli {which!r}")
    if not 0 < n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    if not 0 <= site < n_qubits:
        raise ValueError(f"site {site} out of range for {n_qubits} qubits")
    factors = [PAULI["I"]] * n_qubits
    factors[site] = PAULI[which]
    return Observable(kron_all(factors), label=f"{which}{site}")


def projector(obs: Observable, outcome: int) -> CMatrix:
    """Eigenprojector of ``obs`` onto eigenvalue ``(-1)**outcome``."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    sign = 1 - 2 * outcome
    return as_cmatrix((np.eye(obs.dim) + sign * obs.matrix) / 2)


def maximally_mixed(n_qubits: int) -> DensityState:
    dim = 2**n_qubits
    return DensityState(np.eye(dim) / dim)


def basis_state(n_qubits: int, index: int = 0) -> DensityState:
    """Computational basis state ``|index><index|``."""
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1
    return DensityState(rho)


def pure_state(vector) -> DensityState:
    psi = np.asarray(vector, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityState(np.outer(psi, psi.conj()))


def random_density(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> DensityState:
    """Random mixed state from a Ginibre matrix ``G G^dagger / tr``."""
    dim = 2**n_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    rho = (rho + dagger(rho)) / 2
    return DensityState(rho / np.trace(rho).real)
