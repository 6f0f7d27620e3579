"""Finite-shot simulation of the measurement circuits and shot-noise estimates.

Random numbers come from a counter-based Philox stream keyed by
``(seed, stream)``: shot ``k`` always consumes counter block ``k``, so a
record set is reproducible no matter how shots are split into batches or
spread over workers.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimate import IM_COEFFS, RE_COEFFS, ValueAssignment, im_term_tables, re_term_tables
from .measure import OutcomeDistribution, kraus
from .opcore import DensityState
from .qpd import Qpd

BATCH = 1 << 16


@dataclass(frozen=True)
class ShotRecord:
    """``weight`` realizations that produced the outcome string ``outcomes``."""

    outcomes: tuple
    weight: float


@dataclass(frozen=True)
class SampleStats:
    n_shots: float
    mean: float
    dev_of_mean: float
    bound: float

    @property
    def std(self) -> float:
        """Empirical standard deviation of a single shot."""
        return self.dev_of_mean * np.sqrt(self.n_shots)


def conditional_tree(rho: DensityState, sequence) -> list[np.ndarray]:
    """Probability of outcome 0 at every node of the sequential measurement tree.

    Entry ``k`` has shape ``(2,) * k``: the probability that measurement ``k``
    yields 0 given the earlier outcomes. The state is renormalized after each
    Kraus update, exactly as a shot-by-shot simulation would.
    """
    states = [rho.matrix]
    tree = []
    for spec in sequence:
        K = (kraus(spec, 0), kraus(spec, 1))
        p0 = np.empty(len(states))
        new_states = []
        for i, r in enumerate(states):
            branches = [k @ r @ k.conj().T for k in K]
            ps = [np.trace(b).real for b in branches]
            p0[i] = min(max(ps[0], 0.0), 1.0)
            for p, b in zip(ps, branches):
                # unreachable branches keep a placeholder state; they are never visited
                new_states.append(b / p if p > 1e-300 else r)
        tree.append(p0.reshape((2,) * len(tree)))
        states = new_states
    return tree


def _draw(tree, seed: int, stream: int, start: int, count: int) -> np.ndarray:
    bitgen = np.random.Philox(key=int(seed) + (int(stream) << 64))
    bitgen.advance(start)
    raw = bitgen.random_raw(4 * count).reshape(count, 4)
    u = (raw >> np.uint64(11)) * (1.0 / 2**53)
    index = np.zeros(count, dtype=np.int64)
    for k, p0 in enumerate(tree):
        bit = (u[:, k] >= p0.reshape(-1)[index]).astype(np.int64)
        index = 2 * index + bit
    return np.bincount(index, minlength=2 ** len(tree))


def sample_sequence(
    rho: DensityState, sequence, n_shots: int, seed: int, stream: int = 0, workers: int = 1
) -> list[ShotRecord]:
    """Simulate ``n_shots`` realizations of ``sequence``; returns aggregated records."""
    sequence = tuple(sequence)
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    if not 1 <= len(sequence) <= 4:
        raise ValueError(f"sequence length must be 1..4, got {len(sequence)}")
    tree = conditional_tree(rho, sequence)
    starts = range(0, n_shots, BATCH)
    jobs = [(s, min(BATCH, n_shots - s)) for s in starts]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda j: _draw(tree, seed, stream, *j), jobs))
    else:
        parts = [_draw(tree, seed, stream, *j) for j in jobs]
    counts = np.sum(parts, axis=0)
    outcomes = itertools.product((0, 1), repeat=len(sequence))
    return [ShotRecord(o, int(c)) for o, c in zip(outcomes, counts) if c]


def records_from_distribution(dist: OutcomeDistribution) -> list[ShotRecord]:
    """Exact distribution as fractional weights (the infinite-shot limit)."""
    return [ShotRecord(bits, p) for bits, p in dist.items()]


def frequencies(records, length: int) -> np.ndarray:
    freq = np.zeros((2,) * length)
    for r in records:
        freq[r.outcomes] += r.weight
    return freq / freq.sum()


def _weights(records, length: int) -> np.ndarray:
    if not records:
        raise ValueError("no shot records")
    w = np.zeros((2,) * length)
    for r in records:
        if len(r.outcomes) != length:
            raise ValueError(f"record {r.outcomes} does not match a {length}-outcome table")
        w[tuple(r.outcomes)] += r.weight
    return w


def _stats(weights: np.ndarray, table: np.ndarray) -> SampleStats:
    n = weights.sum()
    mean = float(np.sum(weights * table) / n)
    dev = float(np.sqrt(np.sum(weights * (table - mean) ** 2)) / n)
    bound = float(np.abs(table).max() / np.sqrt(n))
    return SampleStats(float(n), mean, dev, bound)


def empirical_average(records, assignment: ValueAssignment) -> SampleStats:
    """Sample mean of the assigned values with its deviation and worst-case bound."""
    return _stats(_weights(records, assignment.length), assignment.table)


@dataclass(frozen=True)
class QpdEstimate:
    qpd: Qpd
    re_err: np.ndarray
    im_err: np.ndarray
    re_bound: np.ndarray
    im_bound: np.ndarray


def qpd_from_shots(
    records4, records3, strengths4, strengths3, three_measurement_baba: bool = True
) -> QpdEstimate:
    """All 16 QPD values with error bars from the two circuits' records.

    Each QPD entry is averaged as one combined per-shot value, so its error
    bar reflects the correlations between the individual assignments.
    """
    n_im = 3 if three_measurement_baba else 4
    w4 = _weights(records4, 4)
    w3 = _weights(records3, n_im)
    re_terms = re_term_tables(strengths4, three_measurement_baba)
    im_terms = im_term_tables(strengths3, three_measurement_baba)
    shape = (2, 2, 2, 2)
    re, im = np.empty(shape), np.empty(shape)
    re_err, im_err = np.empty(shape), np.empty(shape)
    re_bound, im_bound = np.empty(shape), np.empty(shape)
    for bits in itertools.product((0, 1), repeat=4):
        table = np.moveaxis(re_terms, 0, -1) @ RE_COEFFS[bits] / 16
        st = _stats(w4, table)
        re[bits], re_err[bits], re_bound[bits] = st.mean, st.dev_of_mean, st.bound
        table = np.moveaxis(im_terms, 0, -1) @ IM_COEFFS[bits] / 16
        st = _stats(w3, table)
        im[bits], im_err[bits], im_bound[bits] = st.mean, st.dev_of_mean, st.bound
    qpd = Qpd.from_values(re + 1j * im)
    return QpdEstimate(qpd, re_err, im_err, re_bound, im_bound)
