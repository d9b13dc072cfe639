"""Axial-wavenumber quadrature, azimuthal mode sums and principal-value integrals.

The h integral runs along a contour that leaves the real axis at h = 0, dips
into the lower half h-plane on a semi-ellipse, and returns to the real axis
at ``h_far`` (beyond every layer's wavenumber), after which it follows the
real axis outwards. The branch points at h = +-k_1 and the weakly damped
guided-mode poles (which sit just above the real axis for a passive stack)
are therefore never approached. With the branch choice Im eta_1 >= 0 the
integrand is continuous from below onto the physical real-axis values, so
the deformation does not change the integral.

Panels use a 7-point Gauss / 15-point Kronrod pair; |K15 - G7| is the error
bound of a panel, which is conservative for smooth integrands.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Gauss-Kronrod 7/15 nodes on [-1, 1] (nonnegative half, QUADPACK qk15).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
KRONROD_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, 7 on each side).
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class NonConvergenceError(RuntimeError):
    """Quadrature or mode sum did not reach the requested tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class ModeCapWarning(RuntimeWarning):
    """The azimuthal sum reached n_max before the stop rule fired."""


@dataclass(frozen=True)
class QuadraturePolicy:
    """Numerical policy for the h integral and the n sum.

    rel_tol
        Target relative error of each integral channel.
    abs_tol
        Absolute error floor per channel.
    branch_window
        Depth of the lower half-plane detour, in units of k_1.
    n_max
        Hard cap on the azimuthal order.
    n_stop
        Number of successive orders that must fall below ``stop_tol``
        relative to the running sum before the n sum stops.
    stop_tol
        Relative size below which an order counts as negligible.
    ellipse_panels
        Initial number of panels on the detour.
    max_panels
        Panel budget for the adaptive refinement.
    max_tail_panels
        Cap on the number of real-axis extension panels.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    branch_window: float = 0.25
    n_max: int = 2048
    n_stop: int = 5
    stop_tol: float = 1e-10
    ellipse_panels: int = 8
    max_panels: int = 4000
    max_tail_panels: int = 40

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if not self.branch_window > 0:
            raise ValueError("branch_window must be > 0")
        if self.n_max < 1 or self.n_stop < 1:
            raise ValueError("n_max and n_stop must be >= 1")


@dataclass
class QuadratureResult:
    value: np.ndarray
    error: np.ndarray
    panels: int
    h_max: float


@dataclass
class _Panel:
    kind: str  # "arc" (ellipse parameter) or "line" (real h)
    a: float
    b: float
    value: np.ndarray
    error: np.ndarray


def _panel_nodes(kind, a, b, h_far, depth):
    """Contour points and dh-weights of the 15 Kronrod nodes of one panel."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    t = mid + half * KRONROD_NODES
    if kind == "line":
        return t + 0j, np.full(15, half, dtype=complex)
    c = 0.5 * h_far
    h = c - c * np.cos(t) - 1j * depth * np.sin(t)
    dh = c * np.sin(t) - 1j * depth * np.cos(t)
    return h, half * dh


def _evaluate(term, panels, h_far, depth, even, scale=2.0):
    """Evaluate a batch of panels in one vectorised call of ``term``."""
    nodes, jac = zip(*(_panel_nodes(p[0], p[1], p[2], h_far, depth) for p in panels))
    h = np.concatenate(nodes)
    f = np.asarray(term(h))
    if not even:
        f = f + np.asarray(term(-h))
    else:
        f = scale * f
    if f.ndim == 1:
        f = f[:, None]
    f = f.reshape(len(panels), 15, -1) * np.stack(jac)[:, :, None]
    out = []
    for (kind, a, b), fp in zip(panels, f):
        k15 = KRONROD_WEIGHTS @ fp
        g7 = GAUSS_WEIGHTS @ fp
        out.append(_Panel(kind, a, b, k15, np.abs(k15 - g7)))
    return out


def _tolerance(total, policy):
    return policy.rel_tol * np.abs(total) + policy.abs_tol


def integrate_h(term: Callable, k1: float, policy: QuadraturePolicy = QuadraturePolicy(),
                h_far: float | None = None, even: bool = True,
                upper: bool = False) -> QuadratureResult:
    """Integrate ``term`` over the whole real h axis along the deformed contour.

    Parameters
    ----------
    term : callable
        Vectorised map from an array of complex h (shape ``(P,)``) to values of
        shape ``(P,)`` or ``(P, m)`` for m simultaneous channels.
    k1 : float
        Background wavenumber; sets the detour depth.
    policy : QuadraturePolicy
    h_far : float, optional
        Real point where the detour rejoins the axis. Must exceed the real part
        of every branch point and pole of ``term``. Defaults to 1.5 k1.
    even : bool
        If True, ``term`` is taken to be even in h and the result is twice the
        half-line integral. Otherwise ``term(h) + term(-h)`` is integrated over
        the half line, which equals the full-line integral.
    upper : bool
        Detour through the upper half-plane instead of the lower one. Needed
        at negative frequency, where the branch point on the positive h axis
        sits just below the real line.

    Returns
    -------
    QuadratureResult
        ``value`` and ``error`` have shape ``(m,)`` (``(1,)`` for scalar terms).

    Raises
    ------
    NonConvergenceError
        When the panel budget runs out; carries the best value and error bound.
    """
    if h_far is None:
        h_far = 1.5 * k1
    depth = policy.branch_window * k1
    if upper:
        depth = -depth

    def run(batch):
        return _evaluate(term, batch, h_far, depth, even)

    m = policy.ellipse_panels
    edges = np.linspace(0.0, np.pi, m + 1)
    panels = run([("arc", edges[i], edges[i + 1]) for i in range(m)])

    # real-axis extension: panels [b, 2b] until one is negligible and decaying
    a = h_far
    previous = None
    n_tail = 0
    while True:
        if n_tail >= policy.max_tail_panels:
            total = sum(p.value for p in panels)
            raise NonConvergenceError(f"evanescent tail not truncated by h = {a:.6g}",
                                      total, sum(p.error for p in panels))
        (p,) = run([("line", a, 2 * a)])
        panels.append(p)
        n_tail += 1
        a *= 2
        total = sum(q.value for q in panels)
        small = np.all(np.abs(p.value) <= _tolerance(total, policy))
        decaying = previous is None or np.all(np.abs(p.value) <= np.abs(previous))
        if small and decaying:
            break
        previous = p.value
    h_max = a

    return _refine(panels, run, policy, h_max)


def _refine(panels, run, policy, h_max):
    """Bisect panels until the summed error bound meets the tolerance."""
    while True:
        total = sum(p.value for p in panels)
        err = sum(p.error for p in panels)
        tol = _tolerance(total, policy)
        if np.all(err <= tol):
            break
        if len(panels) >= policy.max_panels:
            raise NonConvergenceError(
                f"panel budget {policy.max_panels} exhausted; error {np.max(err):.3e}",
                total, err)
        with np.errstate(divide="ignore", invalid="ignore"):
            share = np.array([np.max(np.where(tol > 0, p.error / tol, np.inf * p.error))
                              for p in panels])
        share = np.nan_to_num(share, nan=0.0)
        limit = 1.0 / len(panels)
        split = [i for i, s in enumerate(share) if s > limit] or [int(np.argmax(share))]
        children = []
        for i in split:
            p = panels[i]
            mid = 0.5 * (p.a + p.b)
            children += [(p.kind, p.a, mid), (p.kind, mid, p.b)]
        chosen = set(split)
        panels = [p for i, p in enumerate(panels) if i not in chosen] + run(children)
        panels.sort(key=lambda p: (p.kind != "arc", p.a))

    total = sum(p.value for p in panels)
    err = sum(p.error for p in panels)
    return QuadratureResult(total, err, len(panels), h_max)


def integrate_interval(term: Callable, a: float, b: float,
                       policy: QuadraturePolicy = QuadraturePolicy(), panels: int = 4):
    """Adaptive Gauss-Kronrod integral of a vectorised ``term`` over real [a, b]."""
    def run(batch):
        return _evaluate(term, batch, 0.0, 0.0, True, scale=1.0)

    edges = np.linspace(a, b, panels + 1)
    first = run([("line", edges[i], edges[i + 1]) for i in range(panels)])
    return _refine(first, run, policy, b)


def mode_weights(n):
    """The (2 - delta_n0) weight of the cosine mode sum."""
    n = np.asarray(n)
    return np.where(n == 0, 1.0, 2.0)


def stop_index(terms, policy: QuadraturePolicy, floor=0.0):
    """Apply the successive-term stop rule along the last axis.

    An order is negligible when its magnitude is at most ``policy.stop_tol``
    times the larger of the accumulated magnitude sum_{m<=n} |t_m| and
    ``floor`` (an absolute scale supplied by the caller, e.g. the size of the
    integrand elsewhere). Measuring against accumulated magnitude rather than
    |partial sum| keeps alternating, strongly cancelling sums from running to
    the cap. ``terms`` already carry the mode weights.

    Returns the number of orders to keep (shape ``terms.shape[:-1]``); a value
    equal to ``terms.shape[-1]`` means the rule did not fire.
    """
    terms = np.asarray(terms)
    n_tot = terms.shape[-1]
    mag = np.abs(terms)
    acc = np.cumsum(mag, axis=-1)
    small = mag <= policy.stop_tol * np.maximum(acc, floor)
    run = np.zeros(small.shape, dtype=np.int64)
    count = np.zeros(small.shape[:-1], dtype=np.int64)
    for n in range(n_tot):
        count = np.where(small[..., n], count + 1, 0)
        run[..., n] = count
    fired = run >= policy.n_stop
    return np.where(fired.any(axis=-1), fired.argmax(axis=-1) + 1, n_tot)


def sum_mode_array(terms, policy: QuadraturePolicy):
    """Weighted sum over the last axis (orders 0..N) with the stop rule.

    Returns ``(sums, kept, fired)`` where ``kept`` is the number of orders used
    and ``fired`` tells whether the stop rule triggered before the end.
    """
    terms = np.asarray(terms)
    n = np.arange(terms.shape[-1])
    weighted = terms * mode_weights(n)
    kept = stop_index(weighted, policy)
    mask = n < kept[..., None]
    sums = np.where(mask, weighted, 0).sum(axis=-1)
    return sums, kept, kept < terms.shape[-1]


def sum_modes(term: Callable[[int], complex], policy: QuadraturePolicy = QuadraturePolicy()):
    """Sum_{n>=0} (2 - delta_n0) term(n), in ascending order, with the stop rule.

    Emits ``ModeCapWarning`` if n_max is reached first.
    """
    acc = 0j
    mag = 0.0
    run = 0
    for n in range(policy.n_max + 1):
        t = (1.0 if n == 0 else 2.0) * complex(term(n))
        acc += t
        mag += abs(t)
        run = run + 1 if abs(t) <= policy.stop_tol * mag else 0
        if run >= policy.n_stop:
            return acc
    warnings.warn(f"mode sum reached n_max={policy.n_max} before the stop rule fired",
                  ModeCapWarning, stacklevel=2)
    return acc


class PoleOutsideWindowError(ValueError):
    """The principal-value pole must lie strictly inside the window."""


def pv_integral(fn: Callable, pole: float, grid, tails: bool = False):
    """Principal value of int fn(w) / (w - pole) dw over [grid[0], grid[-1]].

    The smooth remainder [fn(w) - fn(pole)] / (w - pole) is integrated with
    Gauss-Kronrod panels between consecutive grid points, and the subtracted
    pole contributes fn(pole) * log|(b - pole) / (pole - a)|.

    Parameters
    ----------
    fn : callable
        Vectorised real function of frequency.
    pole : float
    grid : array_like
        Increasing panel edges; the pole may coincide with an edge.
    tails : bool
        If True, add estimates for the frequencies outside the window: above
        ``b`` fn is continued as fn(b) b / w (the 1/w falloff), below ``a`` as
        fn(a) w / a (linear onset from zero frequency).

    Returns
    -------
    float
    """
    grid = np.asarray(grid, dtype=float)
    a, b = grid[0], grid[-1]
    if not a < pole < b:
        raise PoleOutsideWindowError(f"pole {pole} not inside ({a}, {b})")
    f0 = float(fn(np.array([pole]))[0])
    lo, hi = grid[:-1], grid[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    w = mid[:, None] + half[:, None] * KRONROD_NODES[None, :]
    x = w - pole
    vals = np.asarray(fn(w.ravel()), dtype=float).reshape(w.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.where(x == 0, 0.0, (vals - f0) / np.where(x == 0, 1.0, x))
    smooth = float(np.sum(half * (g @ KRONROD_WEIGHTS)))
    total = smooth + f0 * math.log(abs((b - pole) / (pole - a)))
    if tails:
        fb = float(fn(np.array([b]))[0])
        fa = float(fn(np.array([a]))[0])
        total += fb * b / pole * math.log(b / (b - pole))
        total += fa * (1.0 + pole / a * math.log((pole - a) / pole))
    return total


def dispersion_grid(lo=0.01, hi=5.0, center=1.0, panels=64, pole=None):
    """Frequency panel edges on [lo, hi], clustered around ``center``.

    If ``pole`` is given it is inserted as an edge so that no panel straddles it.
    """
    u = np.linspace(-1.0, 1.0, panels + 1)
    s = np.sinh(3.0 * u) / np.sinh(3.0)
    left = center - (center - lo) * np.abs(s[s < 0])
    right = center + (hi - center) * s[s >= 0]
    edges = np.unique(np.concatenate([[lo], left, right, [hi]]))
    if pole is not None:
        edges = np.unique(np.concatenate([edges, [pole]]))
    return edges
