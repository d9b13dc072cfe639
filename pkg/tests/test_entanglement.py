import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from obh_entanglement.atom_dynamics import RateSet, ShiftSet, amplitudes
from obh_entanglement.entanglement import (FamilyMismatchError, StateError, TwoAtomState,
                                           density_matrix, local_maxima, negativity_closed,
                                           negativity_eigen, negativity_trace, partial_transpose_a,
                                           product_basis_matrix)


def test_pure_symmetric_state():
    s = density_matrix(1.0, 0.0)
    assert s.rho_pp == 1 and s.rho_LL == 0
    assert negativity_eigen(s) == pytest.approx(0.5, abs=1e-15)
    assert negativity_eigen(s, doubled=True) == pytest.approx(1.0, abs=1e-15)


def test_partial_transpose_spectrum_of_bell_state():
    # direct 4x4 oracle: |+> = (|ul> + |lu>)/sqrt 2 has PT eigenvalues {1/2, 1/2, 1/2, -1/2}
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    rho = np.outer(psi, psi)
    # element-wise oracle: PT[(a1 b1), (a2 b2)] = rho[(a2 b1), (a1 b2)]
    pt = np.empty((4, 4))
    for a1, b1, a2, b2 in np.ndindex(2, 2, 2, 2):
        pt[2 * a1 + b1, 2 * a2 + b2] = rho[2 * a2 + b1, 2 * a1 + b2]
    mine = partial_transpose_a(rho)
    assert np.array_equal(mine, pt)
    assert np.sort(np.linalg.eigvalsh(pt)) == pytest.approx([-0.5, 0.5, 0.5, 0.5], abs=1e-15)


def test_product_and_ground_states_are_separable():
    product = density_matrix(2 ** -0.5, 2 ** -0.5)
    assert product.rho_pm == pytest.approx(0.5)
    rho = product_basis_matrix(product)
    assert rho[1, 1] == pytest.approx(1.0) and np.sum(np.abs(rho)) == pytest.approx(1.0)
    assert negativity_eigen(product) == pytest.approx(0.0, abs=1e-16)
    assert negativity_eigen(TwoAtomState(0, 0, 0, 1)) == 0


def test_norm_violation():
    with pytest.raises(StateError):
        density_matrix(1.0, 0.5)


rate_sets = st.builds(lambda g, f: RateSet(g, f * g), st.floats(0.01, 5.0), st.floats(-0.999, 0.999))
shift_sets = st.builds(ShiftSet, st.floats(-50, 50), st.floats(-200, 200))


@settings(max_examples=200, deadline=None)
@given(rates=rate_sets, shifts=shift_sets, t=st.floats(0, 60))
def test_closed_form_equals_eigenvalue_route(rates, shifts, t):
    trace = negativity_trace(rates, shifts, np.array([t]))
    assert abs(trace.neg_eigen[0] - trace.neg_closed[0]) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(rates=rate_sets, shifts=shift_sets, t=st.floats(0, 60))
def test_state_invariants(rates, shifts, t):
    trace = negativity_trace(rates, shifts, np.array([t]))
    total = trace.rho_pp[0] + trace.rho_mm[0] + trace.rho_LL[0]
    assert abs(total - 1.0) <= 1e-12
    assert trace.neg_eigen[0] >= 0
    cp, cm = amplitudes(rates, shifts, t)
    rho = product_basis_matrix(density_matrix(cp, cm, t))
    assert np.allclose(rho, rho.conj().T)
    assert np.linalg.eigvalsh(rho).min() >= -1e-10


def test_trace_starts_at_zero_and_doubles():
    rates, shifts = RateSet(1.32, 0.71), ShiftSet(-0.21, 170.0)
    t = np.linspace(0, 50, 501)
    trace = negativity_trace(rates, shifts, t)
    assert trace.neg_eigen[0] == 0 and trace.neg_closed[0] == 0
    doubled = negativity_trace(rates, shifts, t, doubled=True)
    assert doubled.neg_eigen == pytest.approx(2 * trace.neg_eigen, abs=1e-15)
    assert len(list(trace.rows())) == 501


def test_closed_form_short_time_is_cancellation_free():
    # to first order in t: rho_LL = Gamma t, rho_pp - rho_mm = -Gamma_AB t, sin(2 delta t) = 2 delta t,
    # so N = (sqrt(Gamma^2 + Gamma_AB^2 + 4 delta_AB^2) - Gamma) t / 2
    rates, shifts = RateSet(1.0, 0.2), ShiftSet(0.3)
    t = 1e-9
    n = negativity_closed(rates, shifts, t)
    assert n == pytest.approx((np.sqrt(1 + 0.04 + 0.36) - 1) * t / 2, rel=1e-6)


def test_family_checks():
    with pytest.raises(FamilyMismatchError):
        negativity_closed(RateSet(1.0, 2.0), ShiftSet(0.0), 1.0)
    with pytest.raises(ValueError):
        negativity_trace(RateSet(1.0, 0.0), ShiftSet(0.0), np.array([0.0, 0.0]))


def test_local_maxima():
    t = np.linspace(0, 4 * np.pi, 4001)
    peaks = local_maxima(t, np.sin(t))
    assert peaks == pytest.approx([np.pi / 2, 5 * np.pi / 2], abs=2e-3)
