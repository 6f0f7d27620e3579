import numpy as np
import pytest

from conftest import HALF_PI, tfim_instance
from otocqpd.estimate import entry_table
from otocqpd.measure import otoc_sequence
from otocqpd.optimize import (
    GRID_STEP,
    QpdTarget,
    StrengthConfig,
    _grid_search,
    minimize,
    objective_max_abs,
)
from otocqpd.sample import _stats, _weights, sample_sequence

RE0 = QpdTarget((0, 0, 0, 0), "re")
IM0 = QpdTarget((0, 0, 0, 0), "im")


def _config(phi_a, rest=HALF_PI):
    return StrengthConfig(phi_a, rest, rest, rest)


def test_re_0000_optimum_is_local_minimum_in_phi_a():
    # the minimum is a kink; 0.67 is its two-digit value
    u = np.linspace(0.62, 0.72, 2001)
    f = np.array([objective_max_abs(RE0, _config(x * HALF_PI)) for x in u])
    k = int(np.argmin(f))
    assert 0 < k < len(u) - 1
    assert u[k] == pytest.approx(0.67, abs=0.005)
    assert f[0] > f[k] and f[-1] > f[k]


def test_imaginary_objective_decreases_toward_projective():
    values = [objective_max_abs(IM0, _config(u * HALF_PI, u * HALF_PI)) for u in np.linspace(0.2, 1, 17)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_real_objective_diverges_near_projective_first():
    values = [objective_max_abs(RE0, _config(HALF_PI - eps)) for eps in (1e-1, 1e-2, 1e-3)]
    assert values[0] < values[1] < values[2]
    assert values[2] > 100


def test_guard_band_enforced():
    with pytest.raises(ValueError):
        objective_max_abs(RE0, _config(HALF_PI))
    with pytest.raises(ValueError):
        StrengthConfig(0.0, 1.0, 1.0, 1.0)


def test_target_validation():
    with pytest.raises(ValueError):
        QpdTarget((0, 0, 2, 0))
    with pytest.raises(ValueError):
        QpdTarget((0, 0, 0, 0), "abs")


def test_minimize_re_0000():
    res = minimize(RE0)
    u = res.argmin.in_units_of_half_pi()
    assert u[0] == pytest.approx(0.67, abs=0.03)
    assert u[1:] == pytest.approx((1, 1, 1), abs=0.01)
    assert res.objective >= 1


def test_minimize_im_0000_projective():
    res = minimize(IM0)
    assert res.argmin.in_units_of_half_pi() == pytest.approx((1, 1, 1, 1), abs=0.01)


def test_minimize_is_deterministic():
    a, b = minimize(QpdTarget((0, 1, 1, 0))), minimize(QpdTarget((0, 1, 1, 0)))
    assert a.argmin == b.argmin and a.objective == b.objective and len(a.trace) == len(b.trace)


def test_refinement_never_worse_than_grid():
    for target in (RE0, QpdTarget((1, 0, 0, 1)), IM0):
        _, grid_best = _grid_search(target, GRID_STEP)
        res = minimize(target)
        assert res.objective <= grid_best
        assert res.trace[0][1] == grid_best


def test_minimize_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        minimize(RE0, tolerance=0)


def test_objective_bounds_sampled_deviation(rng):
    rho, A, B_t = tfim_instance(3, 2.2, rng)
    cfg = _config(0.67 * HALF_PI)
    records = sample_sequence(rho, otoc_sequence(A, B_t, cfg.as_tuple()), 5000, seed=6)
    st = _stats(_weights(records, 4), entry_table(RE0.bits, "re", cfg.as_tuple()))
    assert np.sqrt(st.n_shots) * st.dev_of_mean <= objective_max_abs(RE0, cfg)
