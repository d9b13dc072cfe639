"""Two-atom reduced density matrix and its negativity.

The single-excitation state is written in the Dicke basis |+>, |->, |L>
(|L> = both atoms down); the doubly excited |U> stays empty. Negativity is
(1/2) sum_i (|mu_i| - mu_i) over the eigenvalues of the partial transpose,
so a Bell state has negativity 1/2 (``doubled=True`` reports twice that).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atom_dynamics import RateSet, ShiftSet, amplitudes

NORM_SLACK = 1e-12


class StateError(ValueError):
    """Populations outside the physical range."""


class FamilyMismatchError(ValueError):
    """Rates or shifts not of the single-excitation Markovian form."""


@dataclass(frozen=True)
class TwoAtomState:
    rho_pp: float
    rho_mm: float
    rho_pm: complex
    rho_LL: float
    t: float = 0.0


def density_matrix(c_plus, c_minus, t=0.0) -> TwoAtomState:
    """Reduced state for Dicke amplitudes C_+ and C_-."""
    pp = abs(c_plus) ** 2
    mm = abs(c_minus) ** 2
    if pp + mm > 1 + NORM_SLACK:
        raise StateError(f"|C+|^2 + |C-|^2 = {pp + mm} exceeds 1")
    return TwoAtomState(pp, mm, complex(c_plus * np.conj(c_minus)), max(0.0, 1.0 - pp - mm), t)


def product_basis_matrix(state: TwoAtomState):
    """4x4 density matrix in the order |uu>, |ul>, |lu>, |ll> (u = up, l = down; atom A first)."""
    pp, mm, pm = state.rho_pp, state.rho_mm, state.rho_pm
    rho = np.zeros((4, 4), complex)
    rho[1, 1] = (pp + mm + 2 * pm.real) / 2
    rho[2, 2] = (pp + mm - 2 * pm.real) / 2
    rho[1, 2] = (pp - mm - 2j * pm.imag) / 2
    rho[2, 1] = np.conj(rho[1, 2])
    rho[3, 3] = state.rho_LL
    return rho


def partial_transpose_a(rho):
    """Transpose the indices of the first qubit of a 4x4 two-qubit matrix."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(2, 1, 0, 3).reshape(4, 4)


def negativity_eigen(state: TwoAtomState, doubled=False):
    """Negativity from the eigenvalues of the partial transpose over atom A."""
    mu = np.linalg.eigvalsh(partial_transpose_a(product_basis_matrix(state)))
    neg = 0.5 * float(np.sum(np.abs(mu) - mu))
    return 2 * neg if doubled else neg


def _closed_parts(rates, shifts, t):
    t = np.asarray(t, dtype=float)
    pp = 0.5 * np.exp(-rates.gamma_plus * t)
    mm = 0.5 * np.exp(-rates.gamma_minus * t)
    LL = -0.5 * (np.expm1(-rates.gamma_plus * t) + np.expm1(-rates.gamma_minus * t))
    return t, pp, mm, LL


def _check_family(rates, shifts):
    if not (np.isfinite(rates.gamma) and np.isfinite(rates.gamma_ab) and np.isfinite(shifts.delta_ab)):
        raise FamilyMismatchError("rates and shifts must be finite")
    if rates.gamma_plus < 0 or rates.gamma_minus < 0:
        raise FamilyMismatchError("Gamma_pm must be nonnegative for a decaying single-excitation state")


def negativity_closed(rates: RateSet, shifts: ShiftSet, t, doubled=False):
    """Closed-form negativity of the state grown from |u_A l_B>.

    N = (1/2) [sqrt(rho_LL^2 + (rho_pp + rho_mm)^2 - e^{-2 Gamma t} cos^2(2 delta_AB t)) - rho_LL]

    The root argument is evaluated through the exact identity
    (rho_pp + rho_mm)^2 - e^{-2 Gamma t} = (rho_pp - rho_mm)^2, which avoids the
    cancellation between two numbers close to one at short times; rho_LL is
    formed with expm1 for the same reason.
    """
    _check_family(rates, shifts)
    t, pp, mm, LL = _closed_parts(rates, shifts, t)
    arg = LL ** 2 + (pp - mm) ** 2 + np.exp(-2 * rates.gamma * t) * np.sin(2 * shifts.delta_ab * t) ** 2
    neg = 0.5 * (np.sqrt(arg) - LL)
    neg = np.maximum(neg, 0.0)
    return 2 * neg if doubled else neg


@dataclass(frozen=True)
class NegativityTrace:
    t: np.ndarray
    rho_pp: np.ndarray
    rho_mm: np.ndarray
    rho_LL: np.ndarray
    neg_eigen: np.ndarray
    neg_closed: np.ndarray

    def peak(self):
        i = int(np.argmax(self.neg_eigen))
        return float(self.t[i]), float(self.neg_eigen[i])

    def rows(self):
        return zip(self.t, self.rho_pp, self.rho_mm, self.rho_LL, self.neg_eigen, self.neg_closed)


def negativity_trace(rates: RateSet, shifts: ShiftSet, times, doubled=False) -> NegativityTrace:
    """Density-matrix elements and both negativity routes at each time."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    cp, cm = amplitudes(rates, shifts, times)
    states = [density_matrix(a, b, t) for a, b, t in zip(cp, cm, times)]
    eig = np.array([negativity_eigen(s, doubled) for s in states])
    closed = negativity_closed(rates, shifts, times, doubled)
    return NegativityTrace(times,
                           np.array([s.rho_pp for s in states]),
                           np.array([s.rho_mm for s in states]),
                           np.array([s.rho_LL for s in states]),
                           eig, np.atleast_1d(closed))


def local_maxima(t, values):
    """Times of strict interior local maxima of a sampled curve."""
    v = np.asarray(values)
    idx = np.where((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    return np.asarray(t)[idx]
