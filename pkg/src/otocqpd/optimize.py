"""Choice of measurement strengths that minimizes the shot-noise bound.

The deviation of a sample mean over ``N`` shots is bounded by
``max_j |value_j| / sqrt(N)``, where ``j`` runs over outcome strings. For a
given QPD entry the per-outcome value depends only on the strengths, so the
bound can be minimized once, independently of the state being probed.
"""
from __future__ import annotations

import itertools
from dataclasses import astuple, dataclass

import numpy as np

from .estimate import GUARD_BAND, entry_table
from .measure import HALF_PI

GRID_STEP = np.pi / 40
LOWER = 1e-3


@dataclass(frozen=True)
class QpdTarget:
    """Real or imaginary part of the QPD entry ``(b', a', b, a)``."""

    bits: tuple
    part: str = "re"

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != 4 or set(bits) - {0, 1}:
            raise ValueError(f"bits must be four 0/1 values, got {self.bits}")
        if self.part not in ("re", "im"):
            raise ValueError(f"part must be 're' or 'im', got {self.part!r}")
        object.__setattr__(self, "bits", bits)

    def __str__(self) -> str:
        return f"{self.part}{''.join(map(str, self.bits))}"

    @property
    def upper(self) -> np.ndarray:
        """Upper bound on each angle; real parts divide by cos(phi_a)."""
        top = HALF_PI - GUARD_BAND if self.part == "re" else HALF_PI
        return np.array([top, HALF_PI, HALF_PI, HALF_PI])

    @property
    def free(self) -> tuple[int, ...]:
        # the imaginary-part circuit has no fourth measurement
        return (0, 1, 2, 3) if self.part == "re" else (0, 1, 2)


def all_targets() -> list[QpdTarget]:
    return [QpdTarget(b, part) for part in ("re", "im") for b in itertools.product((0, 1), repeat=4)]


@dataclass(frozen=True)
class StrengthConfig:
    phi_a: float
    phi_b: float
    phi_a2: float
    phi_b2: float

    def __post_init__(self):
        for name, phi in zip(("phi_a", "phi_b", "phi_a2", "phi_b2"), astuple(self)):
            if not 0 < phi <= HALF_PI + 1e-15:
                raise ValueError(f"{name} = {phi} outside (0, pi/2]")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return astuple(self)

    def in_units_of_half_pi(self) -> tuple[float, ...]:
        return tuple(p / HALF_PI for p in astuple(self))


@dataclass(frozen=True)
class OptimizationResult:
    target: QpdTarget
    argmin: StrengthConfig
    objective: float
    trace: list


def _values(target: QpdTarget, angles) -> np.ndarray:
    angles = tuple(angles)
    strengths = angles if target.part == "re" else angles[:3]
    return entry_table(target.bits, target.part, strengths)


def objective_max_abs(target: QpdTarget, config: StrengthConfig) -> float:
    """Largest ``|value|`` over outcome strings for ``target`` at ``config``."""
    if target.part == "re" and config.phi_a > HALF_PI - GUARD_BAND:
        raise ValueError(
            f"real-part targets need phi_a <= pi/2 - {GUARD_BAND:g}, got {config.phi_a}"
        )
    return float(np.abs(_values(target, config.as_tuple())).max())


def _grid_search(target: QpdTarget, step: float):
    axes = []
    for i in range(4):
        if i in target.free:
            pts = np.arange(1, int(round(HALF_PI / step)) + 1) * step
            axes.append(pts[pts <= target.upper[i] + 1e-12])
        else:
            axes.append(np.array([HALF_PI]))
    best_f, best_x = np.inf, None
    b_grid = np.meshgrid(*axes[1:], indexing="ij")
    for phi_a in axes[0]:
        vals = _values(target, (phi_a, *b_grid))
        f = np.abs(vals).reshape(vals.shape[:3] + (-1,)).max(axis=-1)
        k = int(np.argmin(f))
        if f.flat[k] < best_f:
            idx = np.unravel_index(k, f.shape)
            best_f = float(f.flat[k])
            best_x = np.array([phi_a] + [axes[i + 1][idx[i]] for i in range(3)])
    return best_x, best_f


def _objective(target, x) -> float:
    return float(np.abs(_values(target, x)).max())


def minimize(target: QpdTarget, tolerance: float = 1e-5, grid_step: float = GRID_STEP) -> OptimizationResult:
    """Coarse grid over the strength box, then compass search to ``tolerance``."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    x, f = _grid_search(target, grid_step)
    trace = [(StrengthConfig(*x), f)]
    lo, hi = LOWER, target.upper
    step = grid_step / 2
    while step >= tolerance:
        improved = False
        for i in target.free:
            for direction in (-1, 1):
                y = x.copy()
                y[i] = np.clip(y[i] + direction * step, lo, hi[i])
                if y[i] == x[i]:
                    continue
                fy = _objective(target, y)
                trace.append((StrengthConfig(*y), fy))
                if fy < f:
                    x, f, improved = y, fy, True
                    break
        if not improved:
            step /= 2
    return OptimizationResult(target, StrengthConfig(*x), f, trace)
