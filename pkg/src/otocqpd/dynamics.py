"""Lattice Hamiltonians, time evolution and Heisenberg-picture operators."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .opcore import (
    MAX_QUBITS,
    PAULI,
    CMatrix,
    Observable,
    as_cmatrix,
    dagger,
    is_hermitian,
    kron_all,
)

_TERM_RE = re.compile(r"([IXYZ])(\d+)")


def parse_pauli_string(descriptor) -> tuple[tuple[str, int], ...]:
    """Normalize a Pauli-string descriptor to ``((letter, site), ...)``.

    Accepts ``"Z0 Z1"``, ``"Z0Z1"`` or an iterable of ``(letter, site)`` pairs.
    """
    if isinstance(descriptor, str):
        text = descriptor.replace(" ", "").replace("*", "")
        pairs = _TERM_RE.findall(text)
        if "".join(f"{p}{s}" for p, s in pairs) != text:
            raise ValueError(f"cannot parse Pauli string {descriptor!r}")
        return tuple((p, int(s)) for p, s in pairs)
    out = []
    for letter, site in descriptor:
        if letter not in PAULI:
            raise ValueError(f"unknown Pauli {letter!r}")
        out.append((letter, int(site)))
    return tuple(out)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Sum of ``coupling * PauliString`` terms on ``n_qubits`` sites."""

    n_qubits: int
    terms: tuple = ()
    preset: str | None = None
    params: dict = field(default_factory=dict, compare=False)


def tfim(n_qubits: int, J: float = 1.0, g: float = 1.05, h: float = 0.5) -> HamiltonianSpec:
    """Mixed-field Ising chain ``-J sum Z_i Z_{i+1} - g sum X_i - h sum Z_i``, open boundary."""
    terms = [(-J, (("Z", i), ("Z", i + 1))) for i in range(n_qubits - 1)]
    terms += [(-g, (("X", i),)) for i in range(n_qubits)]
    terms += [(-h, (("Z", i),)) for i in range(n_qubits)]
    # zero couplings are kept out so that e.g. g=h=0 gives exactly -J Z Z
    terms = tuple((c, t) for c, t in terms if c != 0)
    return HamiltonianSpec(n_qubits, terms, preset="TFIM_longitudinal", params=dict(J=J, g=g, h=h))


def build_hamiltonian(spec: HamiltonianSpec) -> CMatrix:
    n = spec.n_qubits
    if not 0 < n <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n}")
    if not spec.terms:
        raise ValueError("Hamiltonian has no terms")
    dim = 2**n
    H = np.zeros((dim, dim), dtype=complex)
    for coupling, descriptor in spec.terms:
        if np.iscomplexobj(coupling) and np.imag(coupling) != 0:
            raise ValueError(f"complex coupling {coupling} makes the term non-Hermitian")
        factors = [PAULI["I"]] * n
        for letter, site in parse_pauli_string(descriptor):
            if not 0 <= site < n:
                raise ValueError(f"site {site} out of range for {n} qubits")
            factors[site] = factors[site] @ PAULI[letter]
        term = kron_all(factors)
        if not is_hermitian(term):
            raise ValueError(f"term {descriptor!r} is not Hermitian (repeated site?)")
        H += float(np.real(coupling)) * term
    return as_cmatrix(H)


@dataclass(frozen=True)
class Propagator:
    time: float
    matrix: CMatrix


class Spectrum:
    """Eigendecomposition of a Hermitian ``H``, reused across a time sweep."""

    def __init__(self, H: CMatrix):
        H = as_cmatrix(H)
        if not is_hermitian(H):
            raise ValueError("Hamiltonian is not Hermitian")
        try:
            self.energies, self.vectors = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise ValueError("eigendecomposition failed") from exc

    def propagator(self, t: float) -> Propagator:
        if t == 0:
            return Propagator(0.0, as_cmatrix(np.eye(len(self.energies))))
        V = self.vectors
        U = (V * np.exp(-1j * self.energies * t)) @ dagger(V)
        return Propagator(float(t), as_cmatrix(U))


def propagator(H: CMatrix, t: float) -> Propagator:
    """``exp(-i H t)`` with hbar = 1."""
    return Spectrum(H).propagator(t)


def heisenberg(B: Observable, U: Propagator) -> Observable:
    """``U^dagger B U``."""
    if B.matrix.shape != U.matrix.shape:
        raise ValueError(f"dimension mismatch: {B.matrix.shape} vs {U.matrix.shape}")
    Bt = dagger(U.matrix) @ B.matrix @ U.matrix
    Bt = (Bt + dagger(Bt)) / 2
    return Observable(Bt, label=f"{B.label}(t={U.time:g})", atol=1e-10)
