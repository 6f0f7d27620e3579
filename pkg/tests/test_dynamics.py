import numpy as np
import pytest
import scipy.linalg

from otocqpd.dynamics import (
    HamiltonianSpec,
    Spectrum,
    build_hamiltonian,
    heisenberg,
    parse_pauli_string,
    propagator,
    tfim,
)
from otocqpd.opcore import commutator, pauli_on_site


def _tfim_by_loops(n, J, g, h):
    """Independent construction: diagonal ZZ/Z parts from bit strings, X by bit flips."""
    dim = 2**n
    H = np.zeros((dim, dim))
    for s in range(dim):
        z = [1 - 2 * ((s >> (n - 1 - i)) & 1) for i in range(n)]
        H[s, s] = -J * sum(z[i] * z[i + 1] for i in range(n - 1)) - h * sum(z)
        for i in range(n):
            H[s ^ (1 << (n - 1 - i)), s] += -g
    return H


def test_single_z_term():
    H = build_hamiltonian(HamiltonianSpec(1, ((1.0, "Z0"),)))
    assert np.array_equal(H, np.diag([1, -1]))


def test_tfim_two_sites_pure_coupling():
    H = build_hamiltonian(tfim(2, J=1, g=0, h=0))
    Z = np.diag([1, -1])
    assert np.allclose(H, -np.kron(Z, Z))


def test_tfim_matches_independent_construction():
    H = build_hamiltonian(tfim(3, 1.0, 1.05, 0.5))
    ref = _tfim_by_loops(3, 1.0, 1.05, 0.5)
    assert np.allclose(H, ref, atol=1e-12)
    assert np.allclose(H, H.conj().T)
    assert np.allclose(np.linalg.eigvalsh(H), scipy.linalg.eigvalsh(ref), atol=1e-12)


def test_hamiltonian_errors():
    with pytest.raises(ValueError, match="no terms"):
        build_hamiltonian(HamiltonianSpec(2, ()))
    with pytest.raises(ValueError, match="non-Hermitian"):
        build_hamiltonian(HamiltonianSpec(2, ((1j, "Z0"),)))
    with pytest.raises(ValueError, match="out of range"):
        build_hamiltonian(HamiltonianSpec(2, ((1.0, "Z5"),)))
    with pytest.raises(ValueError, match="Hermitian"):
        build_hamiltonian(HamiltonianSpec(2, ((1.0, "X0 Z0"),)))


def test_parse_pauli_string():
    assert parse_pauli_string("Z0 Z1") == (("Z", 0), ("Z", 1))
    assert parse_pauli_string("X3") == (("X", 3),)
    assert parse_pauli_string([("Y", 2)]) == (("Y", 2),)
    with pytest.raises(ValueError):
        parse_pauli_string("Q1")


def test_propagator_at_zero_is_identity():
    H = build_hamiltonian(tfim(3))
    assert np.array_equal(propagator(H, 0).matrix, np.eye(8))


def test_propagator_diagonal():
    U = propagator(np.diag([1.0, -1.0]), np.pi).matrix
    assert np.allclose(U, -np.eye(2), atol=1e-12)


def test_propagator_unitary_and_matches_expm():
    H = build_hamiltonian(tfim(3))
    U = propagator(H, 1.7).matrix
    assert np.abs(U @ U.conj().T - np.eye(8)).max() < 1e-10
    assert np.allclose(U, scipy.linalg.expm(-1j * 1.7 * H), atol=1e-10)


def test_propagator_composition():
    spec = Spectrum(build_hamiltonian(tfim(3)))
    U1, U2, U12 = (spec.propagator(t).matrix for t in (0.4, 1.1, 1.5))
    assert np.abs(U1 @ U2 - U12).max() < 1e-10


def test_non_hermitian_hamiltonian_rejected():
    with pytest.raises(ValueError):
        propagator(np.array([[0, 1], [0, 0]]), 1.0)


def test_heisenberg_identity_propagator():
    B = pauli_on_site("Z", 1, 2)
    H = build_hamiltonian(tfim(2))
    assert np.allclose(heisenberg(B, propagator(H, 0)).matrix, B.matrix)


def test_heisenberg_preserves_spectrum_and_involution():
    B = pauli_on_site("Z", 0, 2)
    Bt = heisenberg(B, propagator(build_hamiltonian(tfim(2)), 2.3))
    assert np.abs(Bt.matrix @ Bt.matrix - np.eye(4)).max() < 1e-10
    assert np.allclose(np.linalg.eigvalsh(Bt.matrix), np.linalg.eigvalsh(B.matrix), atol=1e-10)


def test_heisenberg_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        heisenberg(pauli_on_site("Z", 0, 2), propagator(np.diag([1.0, -1.0]), 1.0))


def _weight_off_site0(op, n):
    """Frobenius weight of the part of ``op`` acting nontrivially on site 0."""
    d = 2 ** (n - 1)
    blocks = op.reshape(2, d, 2, d)
    reduced = np.einsum("iaib->ab", blocks) / 2
    local = np.kron(np.eye(2), reduced)
    return np.linalg.norm(op - local) ** 2 / np.linalg.norm(op) ** 2


def test_heisenberg_operator_spreads_to_far_site():
    B = pauli_on_site("Z", 2, 3)
    assert _weight_off_site0(B.matrix, 3) < 1e-24
    Bt = heisenberg(B, propagator(build_hamiltonian(tfim(3)), 2.0))
    assert _weight_off_site0(Bt.matrix, 3) > 0.05


def test_distinct_sites_initially_commute():
    A, B = pauli_on_site("Z", 0, 3), pauli_on_site("Z", 2, 3)
    B0 = heisenberg(B, propagator(build_hamiltonian(tfim(3)), 0))
    assert np.abs(commutator(A.matrix, B0.matrix)).max() < 1e-12
