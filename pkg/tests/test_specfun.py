import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from obh_entanglement.specfun import (MAX_ABS_ARG, MAX_ORDER, DomainError, SingularArgumentError,
                                      bessel_j, cylfun, deriv_pair, hankel1, log_ladder)


def mp_j(n, z):
    return complex(mpmath.besselj(n, mpmath.mpc(z.real, z.imag), maxprec=20000))


def mp_h(n, z):
    # J + iY at raised precision; hankel1 at default precision loses digits
    # to cancellation once Im z is large
    with mpmath.workdps(40 + int(0.9 * abs(z.imag))):
        zz = mpmath.mpc(z.real, z.imag)
        return complex(mpmath.besselj(n, zz, maxprec=20000)
                       + 1j * mpmath.bessely(n, zz, maxprec=20000))


def test_series_oracle_j0_j1_at_one():
    # power series sum_k (-1)^k (z/2)^(2k+n) / (k! (k+n)!) at z = 1
    for n in (0, 1):
        series = sum((-1) ** k * 0.5 ** (2 * k + n) / (math.factorial(k) * math.factorial(k + n))
                     for k in range(25))
        assert bessel_j(n, 1.0) == pytest.approx(series, rel=1e-14)
    assert bessel_j(0, 1.0) == pytest.approx(0.7651976865579666, rel=1e-14)


def test_hankel_frozen_value():
    assert hankel1(0, 1.0) == pytest.approx(0.7651976865579666 + 0.08825696421567696j, rel=1e-13)


@pytest.mark.parametrize("n,z", [(0, 3 + 0j), (5, 2.5 + 1j), (40, 30 - 2j), (200, 150 + 5j),
                                 (1000, 800 + 20j), (2048, 4000 + 0.5j), (3, 0.01 + 0.01j),
                                 (60, 10 + 40j), (0, 25j)])
def test_against_mpmath(n, z):
    assert abs(bessel_j(n, z) - mp_j(n, z)) <= 3e-12 * abs(mp_j(n, z))
    assert abs(hankel1(n, z) - mp_h(n, z)) <= 2e-11 * abs(mp_h(n, z))


@settings(max_examples=1000, deadline=None)
@given(n=st.integers(0, 400), re=st.floats(0.05, 300), im=st.floats(-5, 60))
def test_wronskian(n, re, im):
    # J_n H_n' - J_n' H_n = 2i / (pi z), checked through log-derivatives to stay in range
    z = complex(re, im)
    lad = log_ladder(np.array([z]), n)
    w = np.exp(lad.log_j[0, n] + lad.log_h[0, n]) * (lad.dlog_h[0, n] - lad.dlog_j[0, n])
    assert abs(w - 2j / (np.pi * z)) <= 1e-9 * abs(2j / (np.pi * z))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 300), re=st.floats(0.1, 200), im=st.floats(-3, 30))
def test_three_term_recurrence(n, re, im):
    # keep to orders where H_{n+1} stays representable
    z = complex(re, im)
    n = min(n, int(abs(z)) + 20)
    for kind in ("J", "H1"):
        lo, mid, hi = (cylfun(kind, m, z).value for m in (n - 1, n, n + 1))
        assert abs(lo + hi - 2 * n / z * mid) <= 1e-9 * max(abs(lo), abs(hi), abs(mid))


@settings(max_examples=100, deadline=None)
@given(n=st.integers(0, 50), re=st.floats(0.5, 40), im=st.floats(-2, 5))
def test_derivative_against_finite_difference(n, re, im):
    z = complex(re, im)
    step = 1e-5 * abs(z)
    for kind in ("J", "H1"):
        _, d = deriv_pair(kind, n, z)
        fd = (cylfun(kind, n, z + step).value - cylfun(kind, n, z - step).value) / (2 * step)
        scale = max(abs(cylfun(kind, n, z).value), abs(d))
        assert abs(d - fd) <= 1e-7 * scale


@settings(max_examples=100, deadline=None)
@given(n=st.integers(0, 100), re=st.floats(0.1, 100), im=st.floats(0, 20))
def test_conjugation_symmetry_of_j(n, re, im):
    z = complex(re, im)
    assert abs(bessel_j(n, z.conjugate()) - np.conj(bessel_j(n, z))) <= 1e-12 * abs(bessel_j(n, z))


def test_order_reflection():
    z = 7.3 + 0.4j
    for n in range(1, 6):
        assert mp_j(-n, z) == pytest.approx((-1) ** n * bessel_j(n, z), rel=1e-12)


def test_zero_argument():
    assert bessel_j(0, 0) == 1
    assert bessel_j(3, 0) == 0
    assert deriv_pair("J", 1, 0)[1] == 0.5
    with pytest.raises(SingularArgumentError):
        hankel1(2, 0)


def test_envelope_limits():
    with pytest.raises(DomainError):
        bessel_j(MAX_ORDER + 1, 1.0)
    with pytest.raises(DomainError):
        hankel1(1, MAX_ABS_ARG * 1.01)
    with pytest.raises(ValueError):
        cylfun("Y", 1, 1.0)
