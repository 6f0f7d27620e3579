"""Watch a local operator scramble on a 5-qubit chaotic Ising chain.

At t = 0 the observables Z0 and Z4 commute, so the OTOC is 1 and the
quasiprobability is an ordinary distribution. As B(t) spreads across the
chain the OTOC decays and negative or complex entries appear; the
nonclassicality N tracks that.
"""
import numpy as np

from otocqpd import (
    Spectrum,
    assemble_qpd,
    build_hamiltonian,
    extract_correlators,
    heisenberg,
    maximally_mixed,
    pauli_on_site,
    tfim,
)

N_QUBITS = 5
HALF_PI = np.pi / 2

spectrum = Spectrum(build_hamiltonian(tfim(N_QUBITS)))
A = pauli_on_site("Z", 0, N_QUBITS)
B = pauli_on_site("Z", N_QUBITS - 1, N_QUBITS)
rho = maximally_mixed(N_QUBITS)

# weak first A, projective afterwards
strengths = (0.67 * HALF_PI, HALF_PI, HALF_PI, HALF_PI)

print(f"{'t':>5} {'Re F':>8} {'Im F':>8} {'C':>7} {'N':>7}")
for t in np.linspace(0, 6, 13):
    B_t = heisenberg(B, spectrum.propagator(t))
    q = assemble_qpd(extract_correlators(rho, A, B_t, strengths))
    print(f"{t:5.1f} {q.otocF.real:8.4f} {q.otocF.imag:8.4f} {q.commutatorC:7.4f} {q.nonclassicalityN:7.4f}")
