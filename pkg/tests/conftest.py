from __future__ import annotations

import numpy as np
import pytest

from otocqpd.dynamics import Spectrum, build_hamiltonian, heisenberg, tfim
from otocqpd.opcore import Observable, pauli_on_site, random_density

HALF_PI = np.pi / 2


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_involution(n: int, rng: np.random.Generator) -> Observable:
    """Random Hermitian involution with balanced spectrum."""
    U = random_unitary(2**n, rng)
    Z = pauli_on_site("Z", 0, n).matrix
    return Observable(U @ Z @ U.conj().T, label="R", atol=1e-10)


def tfim_instance(n: int, t: float, rng: np.random.Generator, site_b: int | None = None):
    """Random state with A = Z0 and B = Z_last evolved under the default chain."""
    A = pauli_on_site("Z", 0, n)
    B = pauli_on_site("Z", n - 1 if site_b is None else site_b, n)
    B_t = heisenberg(B, Spectrum(build_hamiltonian(tfim(n))).propagator(t))
    return random_density(n, rng), A, B_t


def random_strengths(rng: np.random.Generator, k: int, lo: float = 0.1, hi: float = HALF_PI) -> tuple:
    return tuple(rng.uniform(lo, hi, size=k))


#: (criterion, passed, detail) rows filled in by test_acceptance
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
