import numpy as np
import pytest

from conftest import random_involution, tfim_instance
from otocqpd.opcore import maximally_mixed, pauli_on_site, random_density
from otocqpd.oracle import Outer, commutator_square, expectation, nested_correlator, qpd_direct


def test_expectation_examples(rng):
    Z = pauli_on_site("Z", 0, 1)
    assert expectation(maximally_mixed(1), [Z]) == 0
    A, B = pauli_on_site("Z", 0, 2), pauli_on_site("X", 1, 2)
    rho = random_density(2, rng)
    assert expectation(rho, [B, A, B, A]) == pytest.approx(1, abs=1e-12)
    assert expectation(rho, [A, A]) == pytest.approx(1, abs=1e-12)


def test_expectation_dimension_mismatch():
    with pytest.raises(ValueError):
        expectation(maximally_mixed(2), [pauli_on_site("Z", 0, 1)])


def test_commuting_qpd_is_classical(rng):
    rho = random_density(2, rng)
    A, B = pauli_on_site("Z", 0, 2), pauli_on_site("Z", 1, 2)
    q = qpd_direct(rho, A, B)
    assert np.abs(q.values.imag).max() < 1e-12
    assert q.values.real.min() > -1e-12
    assert abs(q.nonclassicalityN) < 1e-12
    # classical joint distribution: only b' = b and a' = a survive
    probs = np.real(np.diag(rho.matrix)).reshape(2, 2)
    for bp, ap, b, a in np.ndindex(2, 2, 2, 2):
        want = probs[a, b] if (bp, ap) == (b, a) else 0
        assert q.values[bp, ap, b, a] == pytest.approx(want, abs=1e-12)


def test_qpd_normalized_and_consistent(rng):
    for n in (2, 3):
        rho, A, B_t = tfim_instance(n, rng.uniform(0.5, 4), rng)
        q = qpd_direct(rho, A, B_t)
        assert q.values.sum() == pytest.approx(1, abs=1e-12)
        assert q.nonclassicalityN >= -1e-12
        assert q.otocF == pytest.approx(expectation(rho, [B_t, A, B_t, A]), abs=1e-12)
        C = commutator_square(rho, A, B_t)
        assert C >= -1e-12
        assert C == pytest.approx(q.commutatorC, abs=1e-12)


def test_hermitian_strings_are_real(rng):
    rho, A, B_t = tfim_instance(3, 1.7, rng)
    for word in ([B_t, A, B_t], [A, B_t, A], [A, B_t, A, B_t, A]):
        assert abs(expectation(rho, word).imag) < 1e-12


def test_nested_examples(rng):
    rho = random_density(2, rng)
    A = random_involution(2, rng)
    assert nested_correlator(rho, [A]) == pytest.approx(expectation(rho, [A]).real)
    A0, B1 = pauli_on_site("Z", 0, 2), pauli_on_site("X", 1, 2)
    assert nested_correlator(rho, [A0, B1], Outer.COMMUTATOR) == pytest.approx(0, abs=1e-12)


def test_nested_four_contains_otoc(rng):
    for _ in range(5):
        rho, A, B_t = tfim_instance(3, rng.uniform(0, 3), rng)
        F = expectation(rho, [B_t, A, B_t, A])
        # BABA + ABAB + identity words: the bracket is (1 + Re F) / 2
        got = nested_correlator(rho, [A, B_t, A, B_t])
        assert got == pytest.approx((1 + F.real) / 2, abs=1e-12)
        got = nested_correlator(rho, [A, B_t, A, B_t], Outer.COMMUTATOR)
        assert got == pytest.approx(F.imag / 2, abs=1e-12)


def test_nested_length_limits(rng):
    A = random_involution(1, rng)
    with pytest.raises(ValueError):
        nested_correlator(maximally_mixed(1), [A] * 5)
