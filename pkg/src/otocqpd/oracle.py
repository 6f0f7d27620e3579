"""Brute-force reference values computed by direct traces.

Deliberately naive and independent of the measurement and estimation code:
projectors come from an eigendecomposition, products are formed explicitly.
"""
from __future__ import annotations

import enum
from functools import reduce

import numpy as np

from .qpd import Qpd


class Outer(enum.Enum):
    ANTICOMMUTATOR = "anticommutator"
    COMMUTATOR = "commutator"


def _mat(x) -> np.ndarray:
    return np.asarray(getattr(x, "matrix", x), dtype=complex)


def expectation(rho, factors) -> complex:
    """``tr(rho F1 F2 ... Fk)`` for the operator string ``factors``."""
    r = _mat(rho)
    mats = [_mat(f) for f in factors]
    for m in mats:
        if m.shape != r.shape:
            raise ValueError(f"dimension mismatch: {m.shape} vs {r.shape}")
    if not mats:
        return complex(np.trace(r))
    return complex(np.trace(r @ reduce(np.matmul, mats)))


def _eigenprojectors(obs) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(_mat(obs))
    plus = v[:, w > 0]
    minus = v[:, w < 0]
    return plus @ plus.conj().T, minus @ minus.conj().T


def qpd_direct(rho, A, B_t) -> Qpd:
    """``p(b', a', b, a) = tr(rho Pi^B_b' Pi^A_a' Pi^B_b Pi^A_a)`` for all 16 outcomes."""
    PA = _eigenprojectors(A)
    PB = _eigenprojectors(B_t)
    r = _mat(rho)
    if PA[0].shape != r.shape or PB[0].shape != r.shape:
        raise ValueError("dimension mismatch between state and observables")
    values = np.empty((2, 2, 2, 2), dtype=complex)
    for bp in (0, 1):
        for ap in (0, 1):
            for b in (0, 1):
                for a in (0, 1):
                    values[bp, ap, b, a] = np.trace(r @ PB[bp] @ PA[ap] @ PB[b] @ PA[a])
    F = 0j
    for bp in (0, 1):
        for ap in (0, 1):
            for b in (0, 1):
                for a in (0, 1):
                    F += (-1) ** (bp + ap + b + a) * values[bp, ap, b, a]
    return Qpd(
        values=values,
        otocF=complex(F),
        commutatorC=2 * (1 - F.real),
        nonclassicalityN=float(np.sum(np.abs(values)) - 1),
    )


def commutator_square(rho, A, B_t) -> float:
    """``<[A, B]^dagger [A, B]>``."""
    a, b = _mat(A), _mat(B_t)
    c = a @ b - b @ a
    return expectation(rho, [c.conj().T, c]).real


def nested_correlator(rho, observables, outer: Outer = Outer.ANTICOMMUTATOR) -> float:
    """Nested bracket ``{...{{A_n, A_n-1}, A_n-2}..., A_1} / 2^(n-1)``.

    With ``outer=COMMUTATOR`` the outermost bracket (with ``A_1``) is a
    commutator and the result is divided by ``2^(n-1) i``.
    """
    mats = [_mat(o) for o in observables]
    n = len(mats)
    if not 1 <= n <= 4:
        raise ValueError(f"need 1..4 observables, got {n}")
    outer = Outer(outer)
    if n == 1:
        # a lone noninformative measurement carries no information
        return 0.0 if outer is Outer.COMMUTATOR else expectation(rho, mats).real
    acc = mats[-1]
    for k in range(n - 2, 0, -1):
        acc = acc @ mats[k] + mats[k] @ acc
    if outer is Outer.COMMUTATOR:
        acc = (acc @ mats[0] - mats[0] @ acc) / 1j
    else:
        acc = acc @ mats[0] + mats[0] @ acc
    return (expectation(rho, [acc]) / 2 ** (n - 1)).real
