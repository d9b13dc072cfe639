import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from obh_entanglement.sommerfeld import (GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS,
                                         ModeCapWarning, NonConvergenceError, PoleOutsideWindowError,
                                         QuadraturePolicy, dispersion_grid, integrate_h,
                                         integrate_interval, mode_weights, pv_integral, stop_index,
                                         sum_mode_array, sum_modes)


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod 15 integrates x^28 exactly on [-1, 1]
    assert KRONROD_WEIGHTS @ KRONROD_NODES ** 22 == pytest.approx(2 / 23, rel=1e-13)


def test_gaussian_along_contour():
    res = integrate_h(lambda h: np.exp(-h ** 2), 1.0)
    assert res.value[0] == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_odd_integrand_vanishes():
    res = integrate_h(lambda h: h * np.exp(-h ** 2), 1.0, even=False)
    assert abs(res.value[0]) < 1e-14


def test_branch_point_integrand():
    # square-root branch point at h = 1, compared with mpmath along the real axis
    def f(h):
        eta = np.sqrt(1 - h ** 2 + 0j)
        eta = np.where(eta.imag < 0, -eta, eta)
        return np.exp(2j * eta) * np.exp(-0.1 * h ** 2)

    res = integrate_h(f, 1.0, QuadraturePolicy(rel_tol=1e-10))

    def g(h):
        eta = mpmath.sqrt(1 - h ** 2) if abs(h) < 1 else 1j * mpmath.sqrt(h ** 2 - 1)
        return mpmath.exp(2j * eta) * mpmath.exp(-0.1 * h ** 2)

    ref = 2 * complex(mpmath.quad(g, [0, 1, 5, mpmath.inf]))
    assert abs(res.value[0] - ref) <= 1e-9 * abs(ref)


def test_multichannel_shapes_and_error():
    res = integrate_interval(lambda x: np.stack([np.sin(x), np.cos(x)], axis=-1), 0, np.pi)
    assert res.value == pytest.approx([2.0, 0.0], abs=1e-12)
    assert np.all(res.error < 1e-8 * 2)


def test_budget_exhaustion_reports_estimate():
    policy = QuadraturePolicy(rel_tol=1e-14, max_panels=6)
    with pytest.raises(NonConvergenceError) as exc:
        integrate_interval(lambda x: np.sqrt(np.abs(x - 0.3)), 0, 1, policy)
    assert exc.value.value is not None and exc.value.error is not None


def test_stop_index_geometric():
    policy = QuadraturePolicy(stop_tol=1e-10, n_stop=5)
    terms = 0.5 ** np.arange(100)
    kept = stop_index(terms, policy)
    # 0.5^n <= 1e-10 * 2 first holds at n = 33; five in a row end at n = 37
    assert kept == 38


def test_stop_rule_on_alternating_cancellation():
    # a symmetric alternating block sums to zero; accumulated magnitude still lets it stop
    t = np.concatenate([(-1.0) ** np.arange(20), np.zeros(10)])
    assert stop_index(t, QuadraturePolicy()) < 30


def test_sum_modes_geometric_series():
    s = sum_modes(lambda n: 0.3 ** n)
    assert s == pytest.approx(2 / 0.7 - 1, rel=1e-12)


def test_sum_modes_cap_warns():
    with pytest.warns(ModeCapWarning):
        sum_modes(lambda n: 1.0, QuadraturePolicy(n_max=10))


def test_sum_mode_array_matches_scalar():
    terms = np.array([0.9 ** np.arange(400)])
    sums, kept, fired = sum_mode_array(terms, QuadraturePolicy())
    assert fired[0]
    assert sums[0] == pytest.approx(sum_modes(lambda n: 0.9 ** n), rel=1e-14)
    assert mode_weights([0, 1, 5]).tolist() == [1.0, 2.0, 2.0]


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0.2, 3.0))
def test_pv_of_rational_against_mpmath(p):
    grid = dispersion_grid(0.01, 5.0, pole=p)
    val = pv_integral(lambda w: 1.0 / (1.0 + w ** 2), p, grid)
    # antiderivative of 1 / ((1 + w^2)(w - p)) by partial fractions
    def anti(w):
        return (math.log(abs(w - p)) - 0.5 * math.log(1 + w * w) - p * math.atan(w)) / (1 + p * p)
    exact = anti(5.0) - anti(0.01)
    assert val == pytest.approx(exact, rel=1e-10, abs=1e-12)


def test_pv_symmetric_window():
    # PV int_{1-d}^{1+d} w / (w - 1) dw = 2 d
    d = 0.5
    grid = np.linspace(1 - d, 1 + d, 9)
    assert pv_integral(lambda w: w, 1.0, grid) == pytest.approx(2 * d, rel=1e-13)


def test_pv_tails_exact_for_model_functions():
    # fn(b) = fn(a) = 1: the continuations b/w and w/a integrated directly
    b, p = 5.0, 1.0
    tail = 1.0 * b / p * math.log(b / (b - p))
    direct = float(mpmath.quad(lambda w: (b / w) / (w - p), [b, mpmath.inf]))
    assert tail == pytest.approx(direct, rel=1e-13)
    a = 0.01
    lower = 1.0 * (1 + p / a * math.log((p - a) / p))
    direct_lo = float(mpmath.quad(lambda w: (w / a) / (w - p), [0, a]))
    assert lower == pytest.approx(direct_lo, rel=1e-10)


def test_pv_pole_outside_window():
    with pytest.raises(PoleOutsideWindowError):
        pv_integral(lambda w: w, 6.0, dispersion_grid())


def test_dispersion_grid_contains_pole():
    g = dispersion_grid(0.01, 5, pole=0.37)
    assert 0.37 in g and np.all(np.diff(g) > 0) and g[0] == 0.01 and g[-1] == 5


def test_policy_validation():
    with pytest.raises(ValueError):
        QuadraturePolicy(rel_tol=0)
    with pytest.raises(ValueError):
        QuadraturePolicy(n_max=0)
