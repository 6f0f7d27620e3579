"""Value assignments, correlator extraction and QPD reconstruction.

Each :class:`Xi` assignment maps the outcome strings of one measurement
circuit to real numbers whose average over the exact (or sampled) outcome
distribution isolates a single correlator, at any measurement strength.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import astuple, dataclass, fields

import numpy as np

from .measure import HALF_PI, OutcomeDistribution, Variant, check_angle, joint_distribution, otoc_sequence
from .qpd import Qpd

#: ``phi_a`` must stay this far below pi/2 when 1/cos(phi_a) appears
GUARD_BAND = 1e-3


class Xi(enum.Enum):
    A = "XiA"
    AB = "XiAB"
    B = "XiB"
    ABA = "XiABA"
    RE_BABA3 = "XiReBABA3"
    IM_BABA3 = "XiImBABA3"
    BAB = "XiBAB"
    RE_BABA4 = "XiReBABA4"
    IM_BABA4 = "XiImBABA4"

    @property
    def length(self) -> int:
        return _LENGTH[self]

    @property
    def needs_weak_first(self) -> bool:
        return self in (Xi.B, Xi.ABA, Xi.BAB)


_LENGTH = {
    Xi.A: 1,
    Xi.AB: 2,
    Xi.B: 3,
    Xi.ABA: 3,
    Xi.RE_BABA3: 3,
    Xi.IM_BABA3: 3,
    Xi.BAB: 4,
    Xi.RE_BABA4: 4,
    Xi.IM_BABA4: 4,
}


def generalized_eigenvalue(phi: float, outcome) -> float:
    """``(-1)^outcome / sin(phi)``; works elementwise on outcome arrays."""
    phi = check_angle(phi)
    return (1 - 2 * np.asarray(outcome)) / np.sin(phi)


@dataclass(frozen=True)
class ValueAssignment:
    name: Xi
    strengths: tuple
    table: np.ndarray

    @property
    def length(self) -> int:
        return self.table.ndim

    def __getitem__(self, bits) -> float:
        return float(self.table[tuple(bits)])


def _alphas(strengths, n):
    """Generalized eigenvalues over an ``n``-outcome grid.

    Strengths may be arrays of a common shape ``S``; the result then has
    shape ``S + (2,) * n``.
    """
    grid = np.indices((2,) * n)
    out = []
    for i in range(n):
        phi = np.asarray(strengths[i], dtype=float)[(...,) + (None,) * n]
        out.append((1 - 2 * grid[i]) / np.sin(phi))
    return out


def _expand(x, n):
    return np.asarray(x, dtype=float)[(...,) + (None,) * n]


def xi_table(name, strengths) -> np.ndarray:
    """Raw value table of assignment ``name``; no validation, broadcasts over strength arrays."""
    name = Xi(name)
    n = name.length
    al = _alphas(strengths, n)

    if name is Xi.A:
        table = al[0]
    elif name is Xi.AB:
        table = al[0] * al[1]
    elif name in (Xi.B, Xi.ABA):
        phi_a = _expand(strengths[0], n)
        xi_b = (al[1] - 2 * al[0] * al[1] * al[2] * np.sin(phi_a / 2) ** 2) / np.cos(phi_a)
        table = xi_b if name is Xi.B else 2 * al[0] * al[1] * al[2] - xi_b
    elif name is Xi.RE_BABA3:
        phi_b = _expand(strengths[1], n)
        table = (al[0] * al[2] - np.cos(phi_b / 2) ** 2) / np.sin(phi_b / 2) ** 2
    elif name is Xi.IM_BABA3:
        table = al[0] * al[2] / np.sin(_expand(strengths[1], n) / 2) ** 2
    elif name is Xi.BAB:
        phi_a, phi_a2 = _expand(strengths[0], n), _expand(strengths[2], n)
        sa, sa2, ca2 = np.sin(phi_a / 2) ** 2, np.sin(phi_a2 / 2) ** 2, np.cos(phi_a2 / 2) ** 2
        table = (
            -al[0]
            + 2 * al[1] * al[2] * al[3]
            - 2 * al[0] * al[1] * al[3] * sa / sa2
            + 2 * al[0] * sa * ca2 / sa2
        ) / np.cos(phi_a)
    elif name is Xi.RE_BABA4:
        table = 2 * al[0] * al[1] * al[2] * al[3] - 1
    else:  # IM_BABA4
        table = 2 * al[0] * al[1] * al[2] * al[3]

    shape = np.broadcast_shapes(*(np.shape(p) for p in strengths[:n])) + (2,) * n
    return np.broadcast_to(table, shape)


def build_assignment(name, strengths) -> ValueAssignment:
    name = Xi(name)
    n = name.length
    strengths = tuple(check_angle(p) for p in strengths)
    if len(strengths) != n:
        raise ValueError(f"{name.value} needs {n} strengths, got {len(strengths)}")
    if name.needs_weak_first and strengths[0] > HALF_PI - GUARD_BAND:
        raise ValueError(
            f"{name.value} needs a non-projective first measurement: phi_a = {strengths[0]:.6f} "
            f"must be <= pi/2 - {GUARD_BAND:g}; a projective first measurement collapses the "
            "state irreversibly so its effect cannot be cancelled by the later ones"
        )
    table = np.array(xi_table(name, strengths), dtype=float)
    if not np.all(np.isfinite(table)):
        raise FloatingPointError(f"{name.value} table has non-finite entries")
    table.setflags(write=False)
    return ValueAssignment(name, strengths, table)


def lift(table: np.ndarray, n_from: int, n_to: int) -> np.ndarray:
    """Extend a table over the first ``n_from`` outcomes to ``n_to`` outcomes."""
    return np.broadcast_to(table[(...,) + (None,) * (n_to - n_from)], table.shape + (2,) * (n_to - n_from))


def average(dist: OutcomeDistribution, assignment: ValueAssignment) -> float:
    """``sum_o table[o] * P(o)``."""
    if dist.probs.shape != assignment.table.shape:
        raise ValueError(
            f"outcome space mismatch: distribution over {dist.length} outcomes, "
            f"{assignment.name.value} over {assignment.length}"
        )
    return float(np.sum(dist.probs * assignment.table))


@dataclass(frozen=True)
class CorrelatorSet:
    """The eight real correlators that fix the QPD."""

    expA: float
    expB: float
    reBA: float
    imBA: float
    expBAB: float
    expABA: float
    reBABA: float
    imBABA: float

    def check(self, eps: float = 1e-9) -> None:
        for name in ("expA", "expB", "expBAB", "expABA"):
            if abs(getattr(self, name)) > 1 + eps:
                raise FloatingPointError(f"|{name}| = {abs(getattr(self, name))} exceeds 1")
        if self.reBA**2 + self.imBA**2 > 1 + eps:
            raise FloatingPointError("|<BA>| exceeds 1")
        if self.reBABA**2 + self.imBABA**2 > 1 + eps:
            raise FloatingPointError("|<BABA>| exceeds 1")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


#: Correlators entering the real parts, in the order used by :func:`qpd_expansion`.
RE_TERMS = ("one", "expA", "expB", "reBA", "expBAB", "expABA", "reBABA")
#: Correlators entering the imaginary parts.
IM_TERMS = ("imBA", "imBABA")


def _reduce(word: str) -> str:
    while True:
        shorter = word.replace("AA", "").replace("BB", "")
        if shorter == word:
            return word
        word = shorter


def qpd_expansion() -> tuple[np.ndarray, np.ndarray]:
    """Integer coefficients expressing each QPD entry through the correlators.

    Returns ``(re, im)`` with shapes ``(2, 2, 2, 2, 7)`` and ``(2, 2, 2, 2, 2)``
    such that ``16 Re p(b',a',b,a) = re[b',a',b,a] . RE_TERMS`` and
    ``16 Im p(b',a',b,a) = im[b',a',b,a] . IM_TERMS``. Obtained by expanding
    every projector as ``(I +- X)/2`` and reducing words with ``A^2 = B^2 = I``.
    """
    re = np.zeros((2, 2, 2, 2, len(RE_TERMS)), dtype=int)
    im = np.zeros((2, 2, 2, 2, len(IM_TERMS)), dtype=int)
    # word -> (real-part term, imaginary-part term, sign of imaginary part)
    words = {
        "": ("one", None, 0),
        "A": ("expA", None, 0),
        "B": ("expB", None, 0),
        "BA": ("reBA", "imBA", 1),
        "AB": ("reBA", "imBA", -1),
        "ABA": ("expABA", None, 0),
        "BAB": ("expBAB", None, 0),
        "BABA": ("reBABA", "imBABA", 1),
    }
    for bits in itertools.product((0, 1), repeat=4):
        for chosen in itertools.product((0, 1), repeat=4):
            sign = (-1) ** sum(c * b for c, b in zip(chosen, bits))
            word = _reduce("".join(ch for ch, c in zip("BABA", chosen) if c))
            re_term, im_term, im_sign = words[word]
            re[bits + (RE_TERMS.index(re_term),)] += sign
            if im_term is not None:
                im[bits + (IM_TERMS.index(im_term),)] += sign * im_sign
    return re, im


RE_COEFFS, IM_COEFFS = qpd_expansion()


def assemble_qpd(c: CorrelatorSet, check: bool = True) -> Qpd:
    re_terms = np.array([1.0, c.expA, c.expB, c.reBA, c.expBAB, c.expABA, c.reBABA])
    im_terms = np.array([c.imBA, c.imBABA])
    values = (RE_COEFFS @ re_terms + 1j * (IM_COEFFS @ im_terms)) / 16
    return Qpd.from_values(values, check=check)


def _check_strengths(strengths, n, label):
    strengths = tuple(strengths)
    if len(strengths) < n:
        raise ValueError(f"{label} needs {n} strengths, got {len(strengths)}")
    return tuple(check_angle(p) for p in strengths[:n])


def extract_correlators(
    rho, A, B_t, strengths4, strengths3=(HALF_PI,) * 3, four_measurement_baba: bool = False
) -> CorrelatorSet:
    """All eight correlators from the two circuits' exact distributions.

    Six come from the four-measurement informative circuit (and its
    marginals); ``Im<BA>`` and ``Im<BABA>`` from the circuit whose first
    measurement is noninformative. With ``four_measurement_baba`` the
    ``<BABA>`` parts use the four-outcome assignments instead, and the
    noninformative circuit keeps its final measurement.
    """
    s4 = _check_strengths(strengths4, 4, "informative circuit")
    n3 = 4 if four_measurement_baba else 3
    s3 = _check_strengths(strengths3, n3, "noninformative circuit")

    info = joint_distribution(rho, otoc_sequence(A, B_t, s4, Variant.ALL_INFORMATIVE))
    variant = Variant.NONINFO_FIRST4 if four_measurement_baba else Variant.NONINFO_FIRST3
    noninfo = joint_distribution(rho, otoc_sequence(A, B_t, s3, variant))
    info3 = info.marginal(3)

    if four_measurement_baba:
        reBABA = average(info, build_assignment(Xi.RE_BABA4, s4))
        imBABA = average(noninfo, build_assignment(Xi.IM_BABA4, s3))
    else:
        reBABA = average(info3, build_assignment(Xi.RE_BABA3, s4[:3]))
        imBABA = average(noninfo, build_assignment(Xi.IM_BABA3, s3))

    return CorrelatorSet(
        expA=average(info.marginal(1), build_assignment(Xi.A, s4[:1])),
        expB=average(info3, build_assignment(Xi.B, s4[:3])),
        reBA=average(info.marginal(2), build_assignment(Xi.AB, s4[:2])),
        imBA=average(noninfo.marginal(2), build_assignment(Xi.AB, s3[:2])),
        expBAB=average(info, build_assignment(Xi.BAB, s4)),
        expABA=average(info3, build_assignment(Xi.ABA, s4[:3])),
        reBABA=reBABA,
        imBABA=imBABA,
    )



def re_term_tables(strengths4, three_measurement_baba: bool = True) -> np.ndarray:
    """Per-outcome values of every ``RE_TERMS`` entry on the four-outcome space.

    Shape ``S + (7, 2, 2, 2, 2)`` for strength arrays of shape ``S``.
    """
    s = tuple(strengths4)
    baba = (Xi.RE_BABA3, s[:3]) if three_measurement_baba else (Xi.RE_BABA4, s)
    parts = [(Xi.A, s[:1]), (Xi.B, s[:3]), (Xi.AB, s[:2]), (Xi.BAB, s), (Xi.ABA, s[:3]), baba]
    shape = np.broadcast_shapes(*(np.shape(p) for p in s)) + (2,) * 4
    tables = [np.ones(shape)]
    for name, angles in parts:
        tables.append(np.broadcast_to(lift(xi_table(name, angles), name.length, 4), shape))
    return np.stack(tables, axis=-5)


def im_term_tables(strengths3, three_measurement_baba: bool = True) -> np.ndarray:
    """Per-outcome values of the ``IM_TERMS`` on the noninformative circuit.

    Shape ``S + (2,) + (2,) * n`` with ``n`` = 3 (or 4 for the four-outcome form).
    """
    s = tuple(strengths3)
    n = 3 if three_measurement_baba else 4
    baba = (Xi.IM_BABA3, s[:3]) if three_measurement_baba else (Xi.IM_BABA4, s[:4])
    shape = np.broadcast_shapes(*(np.shape(p) for p in s[:n])) + (2,) * n
    tables = [
        np.broadcast_to(lift(xi_table(name, angles), name.length, n), shape)
        for name, angles in [(Xi.AB, s[:2]), baba]
    ]
    return np.stack(tables, axis=-n - 1)


def entry_table(bits, part: str, strengths, three_measurement_baba: bool = True) -> np.ndarray:
    """Per-outcome value whose average is ``Re`` or ``Im`` of QPD entry ``bits``.

    ``bits`` is ``(b', a', b, a)``. Real parts live on the four-outcome
    informative circuit, imaginary parts on the noninformative one.
    """
    bits = tuple(bits)
    if part == "re":
        terms = re_term_tables(strengths, three_measurement_baba)
        coeffs, n = RE_COEFFS[bits], 4
    elif part == "im":
        terms = im_term_tables(strengths, three_measurement_baba)
        coeffs, n = IM_COEFFS[bits], 3 if three_measurement_baba else 4
    else:
        raise ValueError(f"part must be 're' or 'im', got {part!r}")
    return np.moveaxis(terms, -n - 1, -1) @ coeffs / 16
