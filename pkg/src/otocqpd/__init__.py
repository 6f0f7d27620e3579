"""Sequential-measurement estimation of OTOC quasiprobabilities on small qubit systems."""

__version__ = "0.1.0"

from .dynamics import HamiltonianSpec, Propagator, Spectrum, build_hamiltonian, heisenberg, propagator, tfim
from .estimate import (
    CorrelatorSet,
    ValueAssignment,
    Xi,
    assemble_qpd,
    average,
    build_assignment,
    extract_correlators,
    generalized_eigenvalue,
)
from .measure import Kind, MeasurementSpec, OutcomeDistribution, Variant, joint_distribution, kraus, otoc_sequence
from .opcore import DensityState, Observable, maximally_mixed, pauli_on_site, projector, random_density
from .optimize import OptimizationResult, QpdTarget, StrengthConfig, minimize, objective_max_abs
from .oracle import expectation, nested_correlator, qpd_direct
from .qpd import Qpd
from .sample import SampleStats, ShotRecord, empirical_average, qpd_from_shots, sample_sequence
