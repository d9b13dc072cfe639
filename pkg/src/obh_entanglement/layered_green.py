"""Transfer matrices of a layered cylinder and the zz scattering Green function.

Conventions
-----------
Layers are numbered 1..N from the outside in; interface f (1..N-1) has radius
``stack.radii[f - 1]`` and separates layer f from layer f + 1. A mode is fixed
by the azimuthal order n and axial wavenumber h; in layer j

    k_j = sqrt(eps_j) omega,  eta_j = sqrt(k_j^2 - h^2) with Im eta_j >= 0,
    tau_j = sqrt(eps_j),  zeta_j = i h n / k_j,  ell_j = eta_j^2 / k_j.

The field in a layer is a combination of four cylindrical waves, ordered
[N-Hankel, M-Hankel, N-Bessel, M-Bessel]; F maps those amplitudes to the
tangential field components on a given cylinder, and T_f = F_{(f+1)f}^{-1} F_{ff}
carries the amplitudes of layer f into layer f + 1. Only the even (cosine)
family enters the zz Green function, so the upper sign of the +-/-+ rows is
used throughout.

Two evaluation routes exist. The *direct* route builds F from raw Bessel and
Hankel values and multiplies the cascade out; it is readable and serves as an
oracle but overflows for orders well above the argument. The *scaled* route
(used for all integrals) divides every column of F by its own cylinder
function, so entries involve only logarithmic derivatives, and propagates a
2 x 4 row functional from the core outwards, renormalising at each step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .medium import LayerStack
from .sommerfeld import (ModeCapWarning, NonConvergenceError, QuadraturePolicy,
                         integrate_h, mode_weights, stop_index)
from .specfun import MAX_ABS_ARG, MAX_ORDER, DomainError, log_ladder

POLARIZATIONS = ("H", "V")
COND_LIMIT = 1e12
# absolute negligibility scale of a mode term, relative to the largest node seen
FLOOR_FACTOR = 1e-3


class IllConditionedError(np.linalg.LinAlgError):
    """Raised when an interface matrix is too ill-conditioned to invert."""

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class VanishingDenominatorError(ZeroDivisionError):
    """The scattering coefficient's denominator is zero (a real-axis pole)."""


def eta_branch(k, h):
    """sqrt(k^2 - h^2) on the branch with Im >= 0.

    A real root takes the sign of Re k, the omega + i0 limit, so that
    propagating waves stay outgoing at negative frequency as well.
    """
    k = np.asarray(k, dtype=complex)
    eta = np.sqrt(k ** 2 - np.asarray(h, dtype=complex) ** 2)
    flip = (eta.imag < 0) | ((eta.imag == 0) & (k.real < 0))
    return np.where(flip, -eta, eta)


@dataclass(frozen=True)
class ModeParams:
    """Per-layer spectral parameters of one (n, h) term."""

    n: int
    h: complex
    omega: complex
    eps: np.ndarray
    k: np.ndarray
    eta: np.ndarray
    tau: np.ndarray
    zeta: np.ndarray
    ell: np.ndarray


def mode_params(n, h, omega, eps):
    """Build ModeParams for permittivities ``eps`` (outermost layer first)."""
    eps = np.asarray(eps, dtype=complex)
    tau = np.sqrt(eps)
    k = tau * omega
    eta = eta_branch(k, h)
    return ModeParams(int(n), complex(h), complex(omega), eps, k, eta, tau,
                      1j * h * n / k, eta ** 2 / k)


def _raw_cylinder(n, z):
    if z == 0:
        from .specfun import SingularArgumentError
        raise SingularArgumentError("eta * a = 0 is the branch point; move the contour")
    lad = log_ladder(np.array([z]), n)
    H = complex(np.exp(lad.log_h[0, n]))
    J = complex(np.exp(lad.log_j[0, n]))
    return H, H * complex(lad.dlog_h[0, n]), J, J * complex(lad.dlog_j[0, n])


def _assemble(pol, zeta_a, ell, tau, dH, dJ, H, J):
    """4x4 transmission matrix from column functions; broadcasting over leading axes."""
    o = np.zeros(np.broadcast(zeta_a, ell, tau, dH, dJ, H, J).shape, complex)
    if pol == "V":
        rows = [[zeta_a * H, dH, zeta_a * J, dJ],
                [ell * H, o, ell * J, o],
                [tau * dH, -tau * zeta_a * H, tau * dJ, -tau * zeta_a * J],
                [o, tau * ell * H, o, tau * ell * J]]
    elif pol == "H":
        rows = [[dH, -zeta_a * H, dJ, -zeta_a * J],
                [o, ell * H, o, ell * J],
                [tau * zeta_a * H, tau * dH, tau * zeta_a * J, tau * dJ],
                [tau * ell * H, o, tau * ell * J, o]]
    else:
        raise ValueError(f"polarization must be one of {POLARIZATIONS}")
    rows = [[np.broadcast_to(x, o.shape) for x in row] for row in rows]
    return np.moveaxis(np.array(rows), (0, 1), (-2, -1))


def transmission_matrix(pol, layer, a, mode: ModeParams):
    """F^{pol} of ``layer`` (1-based) evaluated on the cylinder of radius ``a``.

    Radial derivatives are eta_j Z_n'(eta_j a).
    """
    j = layer - 1
    eta = mode.eta[j]
    H, Hp, J, Jp = _raw_cylinder(mode.n, eta * a)
    return _assemble(pol, mode.zeta[j] / a, mode.ell[j], mode.tau[j],
                     eta * Hp, eta * Jp, H, J)


def _equilibrated_cond(F):
    scale = np.abs(F).max(axis=0)
    scale[scale == 0] = 1.0
    return np.linalg.cond(F / scale)


def interface_transfer(pol, f, stack: LayerStack, mode: ModeParams):
    """T_f = F_{(f+1)f}^{-1} F_{ff} for interface f (1-based).

    Raises IllConditionedError if the column-equilibrated condition number of
    F_{(f+1)f} exceeds 1e12. Identical materials give the identity exactly.
    """
    if not 1 <= f <= len(stack.radii):
        raise ValueError(f"interface index {f} outside 1..{len(stack.radii)}")
    if mode.eps[f - 1] == mode.eps[f]:
        return np.eye(4, dtype=complex)
    a = stack.radii[f - 1]
    inner = transmission_matrix(pol, f + 1, a, mode)
    outer = transmission_matrix(pol, f, a, mode)
    cond = _equilibrated_cond(inner)
    if not cond <= COND_LIMIT:
        raise IllConditionedError(f"interface {f}: condition estimate {cond:.3e}", cond)
    return np.linalg.solve(inner, outer)


@dataclass(frozen=True)
class TransferCascade:
    """Interface matrices T_1..T_{N-1} and their full product T^(1)."""

    pol: str
    transfers: Tuple[np.ndarray, ...]

    def partial(self, K):
        """T^(K) = T_{N-1} ... T_K (1-based K)."""
        out = np.eye(4, dtype=complex)
        for T in self.transfers[K - 1:]:
            out = T @ out
        return out

    @property
    def total(self):
        return self.partial(1)


def cascade(pol, stack: LayerStack, mode: ModeParams) -> TransferCascade:
    return TransferCascade(pol, tuple(interface_transfer(pol, f, stack, mode)
                                      for f in range(1, len(stack.radii) + 1)))


def _coefficient_from_rows(T):
    num = T[..., 0, 1] * T[..., 1, 2] - T[..., 1, 1] * T[..., 0, 2]
    den = T[..., 0, 0] * T[..., 1, 1] - T[..., 0, 1] * T[..., 1, 0]
    return num, den


def scattering_coefficient(pol, stack: LayerStack, mode: ModeParams):
    """C_1^{pol} = (T12 T23 - T22 T13) / (T11 T22 - T12 T21) of the full cascade."""
    num, den = _coefficient_from_rows(cascade(pol, stack, mode).total)
    if den == 0:
        raise VanishingDenominatorError("scattering coefficient denominator vanished")
    return complex(num / den)


@dataclass(frozen=True)
class ScatterCoeffs:
    c1H: complex
    c1V: complex


def scatter_coeffs(stack: LayerStack, mode: ModeParams) -> ScatterCoeffs:
    return ScatterCoeffs(scattering_coefficient("H", stack, mode),
                         scattering_coefficient("V", stack, mode))


# ---------------------------------------------------------------------------
# scaled, vectorised route


def _wavenumbers(omega, eps):
    tau = np.sqrt(np.asarray(eps, dtype=complex))
    return tau, tau * omega


def _ladder_plan(n_layers):
    """(layer, interface) pairs (0-based) whose ladders the cascade needs."""
    plan = [(0, 0)]
    for j in range(1, n_layers - 1):
        plan += [(j, j - 1), (j, j)]
    plan.append((n_layers - 1, n_layers - 2))
    return plan


def _check_ladder_domain(z, nmax):
    if nmax > MAX_ORDER or np.max(np.abs(z)) > MAX_ABS_ARG:
        raise DomainError(f"cylinder functions needed beyond the validated envelope "
                          f"(n={nmax}, |z|={np.max(np.abs(z)):.4g})")


def log_scattering_terms(pol, stack: LayerStack, omega, h, nmax, radii_out=()):
    """log C_1^{pol}(n, h) for n = 0..nmax, plus log H_n(eta_1 r) at extra radii.

    Parameters
    ----------
    pol : {"H", "V"}
    stack : LayerStack
    omega : complex
    h : array of complex, shape (P,)
    nmax : int
    radii_out : sequence of float
        Radii in layer 1 at which log H^(1)_n(eta_1 r) is also returned.

    Returns
    -------
    log_c : (P, nmax + 1) complex array
        -inf where the coefficient vanishes exactly (transparent stack).
    log_h_out : list of (P, nmax + 1) arrays, one per radius in ``radii_out``
    eta1 : (P,) complex array
    """
    h = np.atleast_1d(np.asarray(h, dtype=complex))
    eps = stack.permittivities(omega)
    tau, k = _wavenumbers(omega, eps)
    eta = eta_branch(k[:, None], h[None, :])  # (N, P)
    radii = np.array(stack.radii)
    N = len(eps)
    plan = _ladder_plan(N)
    args = [eta[j] * radii[m] for j, m in plan] + [eta[0] * r for r in radii_out]
    z = np.stack(args, axis=-1)  # (P, L)
    _check_ladder_domain(z, nmax)
    lad = log_ladder(z, nmax)
    slot = {jm: i for i, jm in enumerate(plan)}
    n = np.arange(nmax + 1)

    def f_tilde(j, m):
        i = slot[(j, m)]
        e = eta[j][:, None]
        return _assemble(pol, (1j * h[:, None] * n / k[j]) / radii[m], (eta[j] ** 2 / k[j])[:, None],
                         tau[j], e * lad.dlog_h[:, i], e * lad.dlog_j[:, i], 1.0, 1.0)

    R = np.zeros(h.shape + (nmax + 1, 2, 4), complex)
    R[..., 0, 0] = 1.0
    R[..., 1, 1] = 1.0
    for f in range(N - 2, -1, -1):
        if eps[f + 1] != eps[f]:
            inner = f_tilde(f + 1, f)
            outer = f_tilde(f, f)
            # R <- R inner^{-1} outer, via a solve with the transposed system
            X = np.linalg.solve(np.swapaxes(inner, -1, -2), np.swapaxes(R, -1, -2))
            R = np.swapaxes(X, -1, -2) @ outer
        if f > 0:
            i_in, i_out = slot[(f, f)], slot[(f, f - 1)]
            PH = np.exp(lad.log_h[:, i_in] - lad.log_h[:, i_out])
            PJ = np.exp(lad.log_j[:, i_in] - lad.log_j[:, i_out])
            R = R * np.stack([PH, PH, PJ, PJ], axis=-1)[..., None, :]
        R = R / np.abs(R).max(axis=-1, keepdims=True)
    num, den = _coefficient_from_rows(R)
    if np.any(den == 0):
        raise VanishingDenominatorError("scattering coefficient denominator vanished")
    i0 = slot[(0, 0)]
    with np.errstate(divide="ignore"):
        log_c = np.log(num / den) + lad.log_j[:, i0] - lad.log_h[:, i0]
    n_plan = len(plan)
    log_h_out = [lad.log_h[:, n_plan + i] for i in range(len(radii_out))]
    return log_c, log_h_out, eta[0]


def scattering_coefficients_scaled(pol, stack, omega, h, nmax):
    """C_1^{pol}(n, h) for n = 0..nmax through the scaled route (may overflow in exp)."""
    log_c, _, _ = log_scattering_terms(pol, stack, omega, h, nmax)
    return np.exp(log_c)


def detour_end(stack: LayerStack, omega):
    """Real h where the contour rejoins the axis: beyond every layer wavenumber."""
    eps = stack.permittivities(omega)
    k1 = abs(omega)
    return k1 * max(1.5, 1.2 * float(np.max(np.abs(np.sqrt(eps)))) + 0.25)


class ScatteringKernel:
    """Vectorised h-integrand of the scattering zz Green function.

    For each h returns, per channel c,

        sum_n (2 - delta_n0) (eta_1^2 / k_1^2) C_1V H_n(eta_1 r) H_n(eta_1 r')
              cos(n dphi_c) cos(h dz)

    with the order truncated by the policy's stop rule. The number of orders
    computed adapts: it starts from the last requirement and doubles until the
    stop rule fires at every node or n_max is reached. Orders below
    ``stop_tol * FLOOR_FACTOR`` times the largest node magnitude met so far count as
    negligible, so deep evanescent nodes stop early; evaluation order is fixed
    by the quadrature, which keeps results bit-reproducible.
    """

    def __init__(self, stack, omega, r, rp, dphis, dz, policy, chunk_budget=3e6):
        self.stack, self.omega = stack, complex(omega)
        self.r, self.rp = float(r), float(rp)
        self.dphis = np.atleast_1d(np.asarray(dphis, dtype=float))
        self.dz = float(dz)
        self.policy = policy
        self.k1 = self.omega
        self.vacuum = stack.is_vacuum(omega)
        self.n_hint = 32
        self.scale = 0.0
        self.max_order_used = 0
        self.cap_hits = 0
        self.chunk_budget = chunk_budget

    def _chunk_terms(self, h, nmax):
        radii = (self.r,) if self.rp == self.r else (self.r, self.rp)
        log_c, logs, eta1 = log_scattering_terms("V", self.stack, self.omega, h, nmax, radii)
        log_hh = logs[0] + (logs[0] if len(logs) == 1 else logs[1])
        pref = (eta1 ** 2 / self.k1 ** 2)[:, None]
        base = pref * np.exp(log_c + log_hh)
        n = np.arange(nmax + 1)
        chan = np.cos(np.outer(self.dphis, n))  # (m, nmax+1)
        return base[:, None, :] * chan[None, :, :]  # (P, m, nmax+1)

    def _sum_chunk(self, h):
        nmax = min(self.n_hint, self.policy.n_max)
        while True:
            terms = self._chunk_terms(h, nmax)
            n = np.arange(nmax + 1)
            weighted = terms * mode_weights(n)
            kept = stop_index(weighted, self.policy, FLOOR_FACTOR * self.scale)
            done = np.all(kept <= nmax)
            if done or nmax >= self.policy.n_max:
                break
            nmax = min(2 * nmax, self.policy.n_max)
        if not done:
            self.cap_hits += int(np.sum(kept > nmax))
        used = int(np.max(kept))
        self.max_order_used = max(self.max_order_used, used)
        self.n_hint = max(32, int(1.25 * used))
        mask = n < kept[..., None]
        self.scale = max(self.scale, float(np.max(np.abs(np.where(mask, weighted, 0)).sum(axis=-1))))
        return np.where(mask, weighted, 0).sum(axis=-1)

    def __call__(self, h):
        h = np.asarray(h, dtype=complex)
        out = np.zeros((h.size, len(self.dphis)), complex)
        if self.vacuum:
            return out
        n_lad = 2 * self.stack.n_regions + 2
        per = max(4, int(self.chunk_budget // (n_lad * (min(self.n_hint, self.policy.n_max) + 1))))
        for i in range(0, h.size, per):
            out[i:i + per] = self._sum_chunk(h[i:i + per])
        if self.dz != 0.0:
            out *= np.cos(h * self.dz)[:, None]
        return out


@dataclass
class GreenResult:
    """Scattering zz Green values (one per azimuth difference) with error bounds."""

    values: np.ndarray
    errors: np.ndarray
    max_order: int
    cap_hits: int
    panels: int
    h_max: float


def scattering_green_channels(r, rp, dphis, dz, omega, stack: LayerStack,
                              policy: QuadraturePolicy = QuadraturePolicy()) -> GreenResult:
    """G_S,zz at radii r, r' for several azimuth differences at once.

    G = (i / 8 pi) int dh sum_n (2 - delta_n0) (eta_1^2/k_1^2) C_1V
        H_n(eta_1 r) H_n(eta_1 r') cos(n dphi) e^{i h dz}
    """
    if min(r, rp) <= stack.radii[0]:
        raise ValueError("field and source points must lie outside the outermost interface")
    kernel = ScatteringKernel(stack, omega, r, rp, dphis, dz, policy)
    if kernel.vacuum:
        m = len(kernel.dphis)
        return GreenResult(np.zeros(m, complex), np.zeros(m), 0, 0, 0, 0.0)
    res = integrate_h(kernel, abs(omega), policy, h_far=detour_end(stack, omega), even=True,
                      upper=np.real(omega) < 0)
    if kernel.cap_hits:
        import warnings
        warnings.warn(f"{kernel.cap_hits} quadrature nodes reached n_max={policy.n_max}",
                      ModeCapWarning, stacklevel=2)
    scale = 1j / (8 * np.pi)
    return GreenResult(scale * res.value, abs(scale) * res.error, kernel.max_order_used,
                       kernel.cap_hits, res.panels, res.h_max)


def scattering_green_zz(r, phi, z, rp, phip, zp, omega, stack: LayerStack,
                        quad: QuadraturePolicy = QuadraturePolicy()):
    """zz element of the scattering Green tensor between two points outside the stack."""
    res = scattering_green_channels(r, rp, [phi - phip], z - zp, omega, stack, quad)
    return complex(res.values[0])


def freespace_green_zz(R, omega):
    """Closed-form vacuum G_zz for z dipoles separated by R perpendicular to z."""
    if R <= 0:
        raise ZeroDivisionError("free-space Green function is singular at R = 0")
    kR = omega * R
    return np.exp(1j * kR) / (4 * np.pi * R) * (1 + 1j / kR - 1 / kR ** 2)


def vacuum_green_zz_modes(r, rp, dphi, omega, policy: QuadraturePolicy = QuadraturePolicy()):
    """Vacuum zz Green function from its cylindrical mode expansion (r != r').

    (i/8 pi) int dh sum_n (2 - delta_n0) (eta^2/k^2) J_n(eta r<) H_n(eta r>) cos(n dphi),
    integrated on the same deformed contour as the scattering part. Serves as
    an independent check of the closed form and of the quadrature engine.
    """
    if r == rp:
        raise ValueError("the mode expansion needs distinct radii")
    lo, hi = min(r, rp), max(r, rp)
    k = complex(omega)

    def term(h):
        eta = eta_branch(k, h)
        need = int(2 * hi * np.max(np.abs(eta)) + 30 / np.log(hi / lo)) + 64
        nmax = min(policy.n_max, need)
        lad = log_ladder(np.stack([eta * lo, eta * hi], axis=-1), nmax)
        t = np.exp(lad.log_j[:, 0] + lad.log_h[:, 1]) * (eta ** 2 / k ** 2)[:, None]
        n = np.arange(nmax + 1)
        weighted = t * np.cos(n * dphi) * mode_weights(n)
        kept = stop_index(weighted, policy)
        if np.any(kept > nmax) and nmax < policy.n_max:
            raise NonConvergenceError("vacuum mode sum did not settle")
        return np.where(n < kept[:, None], weighted, 0).sum(axis=-1)

    res = integrate_h(term, abs(omega), policy, h_far=1.5 * abs(omega), even=True,
                      upper=np.real(omega) < 0)
    return complex(1j / (8 * np.pi) * res.value[0])
