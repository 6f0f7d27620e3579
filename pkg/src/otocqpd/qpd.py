"""Container for the four-argument OTOC quasiprobability and its witnesses."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

#: outcome tuples ``(b', a', b, a)`` in flat index order ``8b' + 4a' + 2b + a``
INDEX = tuple(itertools.product((0, 1), repeat=4))


def parity_signs() -> np.ndarray:
    """``(-1)^(b'+a'+b+a)`` as a ``(2, 2, 2, 2)`` array."""
    bits = np.indices((2, 2, 2, 2)).sum(axis=0)
    return (-1.0) ** bits


@dataclass(frozen=True)
class Qpd:
    values: np.ndarray
    otocF: complex
    commutatorC: float
    nonclassicalityN: float

    @classmethod
    def from_values(cls, values, check: bool = True) -> "Qpd":
        values = np.array(values, dtype=complex).reshape(2, 2, 2, 2)
        F = complex((parity_signs() * values).sum())
        qpd = cls(
            values=values,
            otocF=F,
            commutatorC=2 * (1 - F.real),
            nonclassicalityN=float(np.abs(values).sum() - 1),
        )
        if check:
            qpd.check()
        return qpd

    def check(self, atol: float = 1e-10) -> None:
        total = self.values.sum()
        if abs(total - 1) > atol:
            raise FloatingPointError(f"QPD sums to {total}, expected 1")
        if self.nonclassicalityN < -atol:
            raise FloatingPointError(f"negative nonclassicality {self.nonclassicalityN}")

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(16)

    def __getitem__(self, bits) -> complex:
        return complex(self.values[tuple(bits)])
