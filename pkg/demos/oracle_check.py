"""Compare the measurement-based reconstruction with direct evaluation.

The oracle builds every entry of the quasiprobability straight from
eigenprojectors. The reconstruction uses only outcome statistics of weak
measurement circuits. They agree to machine precision for any admissible
strengths, which is the reason the protocol works.
"""
import numpy as np

from otocqpd import assemble_qpd, extract_correlators, random_density
from otocqpd.dynamics import Spectrum, build_hamiltonian, heisenberg, tfim
from otocqpd.opcore import pauli_on_site
from otocqpd.oracle import qpd_direct

rng = np.random.default_rng(7)
worst = 0.0
for trial in range(10):
    n = int(rng.integers(2, 5))
    rho = random_density(n, rng)
    A, B = pauli_on_site("Z", 0, n), pauli_on_site("Z", n - 1, n)
    B_t = heisenberg(B, Spectrum(build_hamiltonian(tfim(n))).propagator(rng.uniform(0, 5)))
    s4 = tuple(rng.uniform(0.1, np.pi / 2 - 0.01, 4))
    s3 = tuple(rng.uniform(0.1, np.pi / 2, 3))
    dev = np.abs(assemble_qpd(extract_correlators(rho, A, B_t, s4, s3)).values - qpd_direct(rho, A, B_t).values).max()
    worst = max(worst, dev)
    print(f"trial {trial}: {n} qubits, max deviation {dev:.2e}")
print(f"worst {worst:.2e}")
