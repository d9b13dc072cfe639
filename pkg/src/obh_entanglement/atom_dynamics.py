"""Markovian decay rates, dipole-dipole shifts and Dicke-state amplitudes.

Two identical atoms with z-oriented dipoles sit at equal radius r on opposite
sides of the cylinder axis (azimuths 0 and pi, same z). All rates and shifts
are in units of the free-space single-atom rate Gamma_0, times in 1/Gamma_0.
With c = 1,

    Gamma_jj' / Gamma_0 = (6 pi / k) Im G_zz(r_j, r_j', omega_A)
    delta_jj' / Gamma_0 = (3 pi / k) Re G_zz(r_j, r_j', omega_A)

where the second line is the Kramers-Kronig resummation of the principal-value
frequency integral. G is split into the closed-form vacuum part and the
scattering part of the layered cylinder. The vacuum self-shift (Lamb shift)
is absorbed into the transition frequency; only the scattering self-shift is
reported.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .layered_green import freespace_green_zz, scattering_green_channels
from .medium import LayerStack
from .sommerfeld import (QuadraturePolicy, dispersion_grid, integrate_interval, mode_weights,
                         pv_integral, stop_index)
from .specfun import log_ladder

POSITIVITY_SLACK = 1e-9
PV_WARN_FRACTION = 0.05


class InvariantViolation(ArithmeticError):
    """A physical invariant (e.g. Gamma_pm >= 0) failed beyond tolerance."""


class PVDiscrepancyWarning(RuntimeWarning):
    """Principal-value and Kramers-Kronig shifts disagree by more than 5%."""


@dataclass(frozen=True)
class AtomPair:
    """Transition frequency omega_A (omega_0 units) and common radius r (c/omega_0)."""

    omega_A: float
    r: float
    d: float = 1.0

    def __post_init__(self):
        if self.omega_A <= 0 or self.r <= 0:
            raise ValueError("omega_A and r must be positive")

    @property
    def separation(self):
        return 2.0 * self.r


@dataclass(frozen=True)
class RateSet:
    gamma: float
    gamma_ab: float
    gamma_err: float = 0.0
    gamma_ab_err: float = 0.0

    @property
    def gamma_plus(self):
        return self.gamma + self.gamma_ab

    @property
    def gamma_minus(self):
        return self.gamma - self.gamma_ab


@dataclass(frozen=True)
class ShiftSet:
    delta_ab: float
    lamb: float = 0.0
    delta_ab_err: float = 0.0
    lamb_err: float = 0.0

    @property
    def delta_plus(self):
        return self.lamb + self.delta_ab

    @property
    def delta_minus(self):
        return self.lamb - self.delta_ab


@dataclass(frozen=True)
class Response:
    """Rates, shifts and numerical metadata of one environment evaluation."""

    rates: RateSet
    shifts: ShiftSet
    max_order: int
    cap_hits: int
    panels: int
    h_max: float


def freespace_rates(k, separation):
    """(Gamma_AB, delta_AB) / Gamma_0 of the closed-form vacuum Green function."""
    G = freespace_green_zz(separation, k)
    return 6 * np.pi / k * G.imag, 3 * np.pi / k * G.real


def freespace_collective(x):
    """Vacuum Gamma_AB and delta_AB for k * separation = x, dipoles normal to the separation."""
    x = np.asarray(x, dtype=float)
    s, c = np.sin(x), np.cos(x)
    gab = 1.5 * (s / x + c / x ** 2 - s / x ** 3)
    dab = -0.75 * (-c / x + s / x ** 2 + c / x ** 3)
    return gab, dab


def vacuum_rates_modes(atoms: AtomPair, policy: QuadraturePolicy = QuadraturePolicy()) -> RateSet:
    """Vacuum Gamma and Gamma_AB from the cylindrical mode expansion.

    The vacuum term of the mode sum carries J_n(eta r) H_n(eta r); its real
    part vanishes for evanescent h (eta imaginary makes every term imaginary),
    so the rates reduce to the propagating interval:

        Gamma_pm = (3/4) 2 int_0^k dh (eta^2/k^3) sum_n (2 - delta_n0)
                   J_n(eta r)^2 (1 +- (-1)^n).

    Independent of the closed form; used to validate the mode-sum machinery.
    """
    k = atoms.omega_A
    r = atoms.r

    def term(h):
        eta = np.sqrt(np.maximum(k ** 2 - h.real ** 2, 0.0)) + 0j
        eta = np.where(eta == 0, 1e-300, eta)
        nmax = min(policy.n_max, int(np.max(np.abs(eta)) * r) + 64)
        lad = log_ladder(eta * r, nmax)
        n = np.arange(nmax + 1)
        jj = np.exp(2 * lad.log_j).real * (eta.real ** 2 / k ** 3)[:, None]
        chan = np.stack([jj, jj * (-1.0) ** n], axis=1) * mode_weights(n)
        kept = stop_index(chan, policy)
        return np.where(n < kept[..., None], chan, 0).sum(axis=-1)

    res = integrate_interval(term, 0.0, k, policy)
    I = 2 * res.value.real
    return RateSet(0.75 * I[0], 0.75 * I[1], 0.75 * 2 * res.error[0], 0.75 * 2 * res.error[1])


@lru_cache(maxsize=64)
def _response(atoms: AtomPair, stack: LayerStack, policy: QuadraturePolicy) -> Response:
    k = atoms.omega_A
    g_ab0, d_ab0 = freespace_rates(k, atoms.separation)
    res = scattering_green_channels(atoms.r, atoms.r, [0.0, np.pi], 0.0, k, stack, policy)
    G, err = res.values, res.errors
    rates = RateSet(1.0 + 6 * np.pi / k * G[0].imag, g_ab0 + 6 * np.pi / k * G[1].imag,
                    6 * np.pi / k * err[0], 6 * np.pi / k * err[1])
    shifts = ShiftSet(d_ab0 + 3 * np.pi / k * G[1].real, 3 * np.pi / k * G[0].real,
                      3 * np.pi / k * err[1], 3 * np.pi / k * err[0])
    return Response(rates, shifts, res.max_order, res.cap_hits, res.panels, res.h_max)


def _check_atoms(atoms, stack):
    if atoms.r <= stack.radii[0]:
        raise ValueError(f"atoms at r={atoms.r} are not outside the shell (a_1={stack.radii[0]})")


def environment_response(atoms: AtomPair, stack: LayerStack,
                         policy: QuadraturePolicy = QuadraturePolicy()) -> Response:
    """Rates and shifts together (one quadrature run, cached)."""
    _check_atoms(atoms, stack)
    return _response(atoms, stack, policy)


def decay_rates(atoms: AtomPair, stack: LayerStack,
                policy: QuadraturePolicy = QuadraturePolicy()) -> RateSet:
    """Gamma, Gamma_AB and Gamma_pm in units of Gamma_0.

    Raises InvariantViolation if Gamma_+ or Gamma_- is negative beyond the
    quadrature error bound.
    """
    rates = environment_response(atoms, stack, policy).rates
    slack = POSITIVITY_SLACK + rates.gamma_err + rates.gamma_ab_err
    if rates.gamma_plus < -slack or rates.gamma_minus < -slack:
        raise InvariantViolation(f"negative collective rate: Gamma+={rates.gamma_plus}, "
                                 f"Gamma-={rates.gamma_minus}")
    return rates


@dataclass(frozen=True)
class PVCheck:
    kk: float
    pv: float
    discrepancy: float


def pv_scattering_shift(atoms: AtomPair, stack: LayerStack, policy: QuadraturePolicy,
                        window=(0.01, 5.0), panels=32, tails=True):
    """Scattering part of delta_AB from the principal-value frequency integral.

    delta_AB / Gamma_0 = (3 / omega_A^3) P int dw w^2 Im G_S,AB(w) / (w - omega_A)

    over the dispersion window (resonant term only, as in the Markovian
    two-level treatment), with the tails continued by the 1/w falloff.
    The integral converges only if w^2 Im G_S decays, which a layer of
    frequency-independent permittivity prevents; the result then depends on
    the window and is meant as a diagnostic.
    """
    wA = atoms.omega_A
    grid = dispersion_grid(window[0], window[1], center=1.0, panels=panels, pole=wA)

    def im_g(ws):
        out = np.empty(len(ws))
        for i, w in enumerate(ws):
            res = scattering_green_channels(atoms.r, atoms.r, [np.pi], 0.0, float(w), stack, policy)
            out[i] = w ** 2 * res.values[0].imag
        return out

    return 3.0 / wA ** 3 * pv_integral(im_g, wA, grid, tails=tails)


def dipole_shift(atoms: AtomPair, stack: LayerStack, policy: QuadraturePolicy = QuadraturePolicy(),
                 mode: str = "kk", window=(0.01, 5.0), panels=32):
    """delta_AB (and the scattering self-shift) in units of Gamma_0.

    ``mode="kk"`` takes Re G directly. ``mode="pv"`` additionally evaluates the
    principal-value integral of the scattering part and returns
    ``(ShiftSet, PVCheck)``; a PVDiscrepancyWarning fires when the two differ
    by more than 5%.
    """
    shifts = environment_response(atoms, stack, policy).shifts
    if mode == "kk":
        return shifts
    if mode != "pv":
        raise ValueError("mode must be 'kk' or 'pv'")
    _, d_ab0 = freespace_rates(atoms.omega_A, atoms.separation)
    kk = shifts.delta_ab - d_ab0
    pv = pv_scattering_shift(atoms, stack, policy, window, panels)
    disc = abs(pv - kk) / max(abs(kk), 1e-300)
    if disc > PV_WARN_FRACTION:
        warnings.warn(f"PV and KK scattering shifts differ by {100 * disc:.1f}% "
                      f"(PV {pv:.6g}, KK {kk:.6g})", PVDiscrepancyWarning, stacklevel=2)
    return shifts, PVCheck(kk, pv, disc)


def amplitudes(rates: RateSet, shifts: ShiftSet, t):
    """C_pm(t) = exp((-Gamma_pm / 2 + i delta_pm) t) / sqrt(2), starting from |u_A l_B>."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    cp = np.exp((-rates.gamma_plus / 2 + 1j * shifts.delta_plus) * t) / np.sqrt(2)
    cm = np.exp((-rates.gamma_minus / 2 + 1j * shifts.delta_minus) * t) / np.sqrt(2)
    return cp, cm
