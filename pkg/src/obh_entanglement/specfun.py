"""Complex-argument cylindrical Bessel J_n and Hankel H^(1)_n functions.

Whole ladders of orders are produced at once, in logarithmic form, so that
orders far beyond the argument (where J_n underflows and H_n overflows) stay
representable. Low-order seeds come from ``scipy.special`` (exponentially
scaled variants); everything above order one comes from three-term
recurrences run in their numerically stable direction:

* J_n: backward recurrence on the ratio rho_n = J_n / J_{n-1} (minimal
  solution), normalised by the seed J_0 or J_1, whichever is larger.
* H_n: forward recurrence on the ratio sigma_n = H_n / H_{n-1} (dominant
  solution).

Derivatives follow from the ratios, Z_n'/Z_n = 1/ratio_n - n/z.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import special

#: largest order covered by the accuracy validation
MAX_ORDER = 2048
#: largest |z| covered by the accuracy validation
MAX_ABS_ARG = 4096.0

KINDS = ("J", "H1")


class DomainError(ValueError):
    """Raised when (n, |z|) leaves the validated envelope."""


class SingularArgumentError(ZeroDivisionError):
    """Raised when a function singular at z = 0 is requested there."""


class CylFunValue(NamedTuple):
    order: int
    argument: complex
    value: complex
    derivative: complex


class LogLadder(NamedTuple):
    """Orders 0..nmax of J_n and H_n at each argument.

    ``log_j``/``log_h`` hold principal-branch-free logarithms (only exp() of
    them is meaningful); ``dlog_j``/``dlog_h`` hold Z_n'(z)/Z_n(z). All arrays
    have shape ``z.shape + (nmax + 1,)``.
    """

    log_j: np.ndarray
    log_h: np.ndarray
    dlog_j: np.ndarray
    dlog_h: np.ndarray


def _check_envelope(n, z):
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    if n > MAX_ORDER or abs(z) > MAX_ABS_ARG:
        raise DomainError(
            f"(n={n}, |z|={abs(z):.6g}) outside the validated envelope "
            f"n <= {MAX_ORDER}, |z| <= {MAX_ABS_ARG}")


def _backward_start(nmax, zmax):
    return int(max(nmax, zmax) + 20 + 10 * zmax ** (1 / 3)) + 1


def log_ladder(z, nmax):
    """Log-form ladders of J_n and H^(1)_n for n = 0..nmax.

    Parameters
    ----------
    z : array_like of complex
        Nonzero arguments, any shape. Hankel values are meaningful for
        Im z >= 0 (the radiating branch used throughout this package).
    nmax : int
        Highest order returned.

    Returns
    -------
    LogLadder
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularArgumentError("log_ladder needs nonzero arguments")
    nmax = int(nmax)
    zabs = np.abs(z)
    top = _backward_start(nmax, float(zabs.max()) if z.size else 0.0)

    rho = np.empty(z.shape + (nmax + 2,), complex)
    two_over_z = 2.0 / z
    r = np.zeros(z.shape, complex)
    for n in range(top, nmax + 1, -1):
        r = 1.0 / (n * two_over_z - r)
    for n in range(min(top, nmax + 1), 0, -1):
        r = 1.0 / (n * two_over_z - r)
        rho[..., n] = r

    j0 = special.jve(0, z)
    j1 = special.jve(1, z)
    use_j1 = np.abs(j1) > np.abs(j0)
    with np.errstate(divide="ignore"):
        log_j0 = np.where(use_j1, np.log(j1) - np.log(rho[..., 1]), np.log(j0))
    log_j0 = log_j0 + np.abs(z.imag)

    log_j = np.empty(z.shape + (nmax + 1,), complex)
    log_j[..., 0] = log_j0
    log_j[..., 1:] = log_j0[..., None] + np.cumsum(np.log(rho[..., 1:nmax + 1]), axis=-1)

    h0 = special.hankel1e(0, z)
    h1 = special.hankel1e(1, z)
    sig = np.empty(z.shape + (nmax + 1,), complex)
    s = h1 / h0
    if nmax >= 1:
        sig[..., 1] = s
    for n in range(1, nmax):
        s = n * two_over_z - 1.0 / s
        sig[..., n + 1] = s
    log_h = np.empty_like(log_j)
    log_h[..., 0] = np.log(h0) + 1j * z
    log_h[..., 1:] = log_h[..., :1] + np.cumsum(np.log(sig[..., 1:]), axis=-1)

    orders = np.arange(1, nmax + 1)
    dlog_j = np.empty_like(log_j)
    dlog_h = np.empty_like(log_j)
    dlog_j[..., 0] = -rho[..., 1]
    dlog_h[..., 0] = -h1 / h0
    dlog_j[..., 1:] = 1.0 / rho[..., 1:nmax + 1] - orders / z[..., None]
    dlog_h[..., 1:] = 1.0 / sig[..., 1:] - orders / z[..., None]
    return LogLadder(log_j, log_h, dlog_j, dlog_h)


def _j_at_zero(n):
    value = 1.0 + 0j if n == 0 else 0j
    derivative = 0.5 + 0j if n == 1 else 0j
    return value, derivative


def cylfun(kind, n, z):
    """Value and z-derivative of J_n (kind "J") or H^(1)_n (kind "H1")."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    n = int(n)
    z = complex(z)
    _check_envelope(n, z)
    if z == 0:
        if kind == "H1":
            raise SingularArgumentError("H1_n is singular at z = 0")
        value, derivative = _j_at_zero(n)
        return CylFunValue(n, z, value, derivative)
    lad = log_ladder(np.array([z]), n)
    if kind == "J":
        log_val, dlog = lad.log_j[0, n], lad.dlog_j[0, n]
    else:
        log_val, dlog = lad.log_h[0, n], lad.dlog_h[0, n]
    value = complex(np.exp(log_val))
    return CylFunValue(n, z, value, value * complex(dlog))


def bessel_j(n, z):
    """J_n(z) for integer n >= 0 and complex z."""
    return cylfun("J", n, z).value


def hankel1(n, z):
    """H^(1)_n(z) = J_n(z) + i Y_n(z) for integer n >= 0 and complex z != 0."""
    return cylfun("H1", n, z).value


def deriv_pair(kind, n, z):
    """Return (Z_n(z), dZ_n/dz) for Z = J or H^(1)."""
    v = cylfun(kind, n, z)
    return v.value, v.derivative
