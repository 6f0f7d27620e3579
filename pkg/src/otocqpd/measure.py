"""Ancilla-based qubit measurements at arbitrary strength.

Measurements are applied as Kraus maps on the system state; the ancillas
themselves are never represented.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .opcore import CMatrix, DensityState, Observable, dagger

HALF_PI = np.pi / 2


class Kind(enum.Enum):
    INFORMATIVE = "informative"
    NONINFORMATIVE = "noninformative"


class Variant(enum.Enum):
    ALL_INFORMATIVE = "all_informative"
    NONINFO_FIRST3 = "noninfo_first3"
    NONINFO_FIRST4 = "noninfo_first4"


def check_angle(phi: float) -> float:
    phi = float(phi)
    if not 0 < phi <= HALF_PI + 1e-15:
        raise ValueError(f"strength angle {phi} outside (0, pi/2]")
    return min(phi, HALF_PI)


@dataclass(frozen=True)
class MeasurementSpec:
    kind: Kind
    observable: Observable
    strength: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "strength", check_angle(self.strength))


def informative(obs: Observable, phi: float) -> MeasurementSpec:
    return MeasurementSpec(Kind.INFORMATIVE, obs, phi)


def noninformative(obs: Observable, phi: float) -> MeasurementSpec:
    return MeasurementSpec(Kind.NONINFORMATIVE, obs, phi)


def kraus(spec: MeasurementSpec, outcome: int) -> CMatrix:
    """Kraus operator for ancilla outcome ``outcome``.

    Informative: ``[cos(phi/2) I + (-1)^a sin(phi/2) A] / sqrt 2``.
    Noninformative: ``[cos(phi/2) I - i (-1)^a sin(phi/2) A] / sqrt 2``.
    """
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    A = spec.observable.matrix
    c, s = np.cos(spec.strength / 2), np.sin(spec.strength / 2)
    sign = 1 - 2 * outcome
    if spec.kind is Kind.NONINFORMATIVE:
        s = -1j * s
    return (c * np.eye(A.shape[0]) + sign * s * A) / np.sqrt(2)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint outcome probabilities of a measurement sequence.

    ``probs[o1, ..., on]`` is the probability of the outcome string
    ``(o1, ..., on)``; ``post_states`` holds the matching unnormalized
    post-measurement states when requested.
    """

    sequence: tuple
    probs: np.ndarray
    post_states: np.ndarray | None = None

    @property
    def length(self) -> int:
        return len(self.sequence)

    def items(self):
        for bits in itertools.product((0, 1), repeat=self.length):
            yield bits, float(self.probs[bits])

    def marginal(self, k: int) -> "OutcomeDistribution":
        """Distribution of the first ``k`` outcomes."""
        if not 1 <= k <= self.length:
            raise ValueError(f"cannot marginalize a length-{self.length} sequence to {k}")
        probs = self.probs.sum(axis=tuple(range(k, self.length)))
        return OutcomeDistribution(self.sequence[:k], probs)


def _check_probabilities(probs: np.ndarray) -> np.ndarray:
    if probs.min() < -1e-12:
        raise FloatingPointError(f"negative probability {probs.min():.3e}; Kraus map is broken")
    if abs(probs.sum() - 1) > 1e-10:
        raise FloatingPointError(f"probabilities sum to {probs.sum():.15f}")
    return np.clip(probs, 0.0, 1.0)


def joint_distribution(
    rho: DensityState, sequence, keep_states: bool = False
) -> OutcomeDistribution:
    """Exact joint outcome distribution of ``sequence`` applied to ``rho``."""
    sequence = tuple(sequence)
    if not 1 <= len(sequence) <= 4:
        raise ValueError(f"sequence length must be 1..4, got {len(sequence)}")
    for spec in sequence:
        if spec.observable.dim != rho.dim:
            raise ValueError(
                f"dimension mismatch: state {rho.dim}, observable {spec.observable.dim}"
            )
    states = rho.matrix[None]
    for spec in sequence:
        K = np.stack([kraus(spec, 0), kraus(spec, 1)])
        # new[i, o] = K_o states[i] K_o^dagger, flattened with o fastest
        states = K[None] @ states[:, None] @ K.conj().transpose(0, 2, 1)[None]
        states = states.reshape(-1, rho.dim, rho.dim)
    shape = (2,) * len(sequence)
    probs = np.einsum("iaa->i", states).real.reshape(shape)
    probs = _check_probabilities(probs)
    post = states.reshape(shape + (rho.dim, rho.dim)) if keep_states else None
    return OutcomeDistribution(sequence, probs, post)


def otoc_sequence(
    A: Observable, B_t: Observable, strengths, variant: Variant = Variant.ALL_INFORMATIVE
) -> tuple[MeasurementSpec, ...]:
    """Measurement sequence ``(A, B(t), A, B(t))`` of the OTOC circuit.

    The noninformative variants replace the first ``A`` measurement; the
    three-measurement form drops the final ``B(t)`` (and ignores a fourth
    strength if one is given).
    """
    variant = Variant(variant)
    if A.dim != B_t.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B_t.dim}")
    strengths = [check_angle(p) for p in strengths]
    n = 3 if variant is Variant.NONINFO_FIRST3 else 4
    if len(strengths) < n:
        raise ValueError(f"{variant.value} needs {n} strengths, got {len(strengths)}")
    obs = (A, B_t, A, B_t)
    first = Kind.INFORMATIVE if variant is Variant.ALL_INFORMATIVE else Kind.NONINFORMATIVE
    kinds = (first,) + (Kind.INFORMATIVE,) * 3
    return tuple(MeasurementSpec(kinds[i], obs[i], strengths[i]) for i in range(n))
