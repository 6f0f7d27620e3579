"""Estimate the quasiprobability from finite measurement records.

Simulated shots are drawn from a counter-based generator, so a given seed
always produces the same records regardless of batching or thread count.
The error bars shrink like 1/sqrt(shots) and stay below the worst-case
bound max|xi| / sqrt(shots).
"""
import numpy as np

from otocqpd import (
    Spectrum,
    Variant,
    assemble_qpd,
    build_hamiltonian,
    extract_correlators,
    heisenberg,
    maximally_mixed,
    otoc_sequence,
    pauli_on_site,
    tfim,
)
from otocqpd.sample import qpd_from_shots, sample_sequence

HALF_PI = np.pi / 2
n = 3
A, B = pauli_on_site("Z", 0, n), pauli_on_site("Z", n - 1, n)
B_t = heisenberg(B, Spectrum(build_hamiltonian(tfim(n))).propagator(2.0))
rho = maximally_mixed(n)

s4 = (0.67 * HALF_PI, HALF_PI, HALF_PI, HALF_PI)
s3 = (HALF_PI,) * 3
exact = assemble_qpd(extract_correlators(rho, A, B_t, s4, s3))
print(f"exact p(0,0,0,0) = {exact[(0, 0, 0, 0)]:.5f}")

for shots in (10**3, 10**4, 10**5, 10**6):
    info = sample_sequence(rho, otoc_sequence(A, B_t, s4), shots, seed=1)
    non = sample_sequence(rho, otoc_sequence(A, B_t, s3, Variant.NONINFO_FIRST3), shots, seed=1, stream=1)
    est = qpd_from_shots(info, non, s4, s3)
    p, err, bound = est.qpd[(0, 0, 0, 0)], est.re_err[0, 0, 0, 0], est.re_bound[0, 0, 0, 0]
    print(f"{shots:>8} shots: Re p = {p.real:.5f} +/- {err:.5f} (bound {bound:.5f})")
