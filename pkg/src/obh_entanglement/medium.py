"""Lorentz dispersion, the graded 1/r^2 permittivity profile and its layering.

Units: c = 1 and omega_0 = 1, so radii are in c/omega_0 and frequencies in
omega_0. Permeability is 1 everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

SAMPLINGS = ("inner", "midpoint")


class GeometryError(ValueError):
    """Raised for inconsistent radii or layer counts."""


@dataclass(frozen=True)
class LorentzModel:
    """Single-resonance Lorentz oscillator, all parameters in units of omega_0."""

    omega_p: float = 0.1
    omega_0: float = 1.0
    gamma: float = 0.01

    def __post_init__(self):
        if self.omega_p < 0 or self.gamma < 0 or self.omega_0 <= 0:
            raise GeometryError("need omega_p >= 0, gamma >= 0, omega_0 > 0")


@dataclass(frozen=True)
class ObhGeometry:
    """Outer shell radius, core radius and (complex) core permittivity."""

    a_s: float = 8 * np.pi
    a_c: float = 4 * np.pi
    eps_core: complex = 4 + 0.33j

    def __post_init__(self):
        if not 0 < self.a_c < self.a_s:
            raise GeometryError(f"need 0 < a_c < a_s, got a_c={self.a_c}, a_s={self.a_s}")

    def matches_core_index(self, rtol=1e-12):
        """True if a_c = a_s / sqrt(Re eps_core), the canonical graded-index match."""
        target = self.a_s / np.sqrt(np.real(self.eps_core))
        return bool(abs(self.a_c - target) <= rtol * self.a_s)


@dataclass(frozen=True)
class ConstantLayer:
    """Frequency-independent permittivity.

    For Re(omega) < 0 the conjugate is returned, which keeps the
    reality condition eps(-omega*) = eps(omega)* that any physical response
    obeys. Positive-frequency callers never see the difference.
    """

    eps: complex

    def __call__(self, omega):
        eps = complex(self.eps)
        return eps.conjugate() if np.real(omega) < 0 else eps


@dataclass(frozen=True)
class ScaledLorentzLayer:
    """Permittivity scale * eps_L(omega)."""

    scale: float
    model: LorentzModel

    def __call__(self, omega):
        return self.scale * lorentz_permittivity(omega, self.model)


LayerRule = Union[ConstantLayer, ScaledLorentzLayer]


@dataclass(frozen=True)
class LayerStack:
    """Concentric layers. ``radii`` are the N-1 interface radii, descending.

    Layer 1 lies outside radii[0]; layer N (the core) inside radii[-1].
    ``layers`` holds the N permittivity rules, outermost first.
    """

    radii: Tuple[float, ...]
    layers: Tuple[LayerRule, ...]

    def __post_init__(self):
        radii = tuple(float(a) for a in self.radii)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(radii) < 1:
            raise GeometryError("a stack needs at least one interface")
        if len(self.layers) != len(radii) + 1:
            raise GeometryError(f"{len(radii)} interfaces need {len(radii) + 1} layers, "
                                f"got {len(self.layers)}")
        if radii[-1] <= 0 or any(b >= a for a, b in zip(radii, radii[1:])):
            raise GeometryError(f"radii must be positive and strictly descending: {radii}")

    @property
    def n_regions(self):
        return len(self.layers)

    def permittivities(self, omega):
        """Array of the N layer permittivities at frequency omega."""
        return np.array([rule(omega) for rule in self.layers], dtype=complex)

    def is_vacuum(self, omega):
        return bool(np.all(self.permittivities(omega) == 1))

    @classmethod
    def from_constants(cls, radii, eps):
        """Stack with frequency-independent permittivities, outermost first."""
        return cls(tuple(radii), tuple(ConstantLayer(complex(e)) for e in eps))

    @classmethod
    def vacuum(cls, radii):
        return cls.from_constants(radii, [1.0] * (len(radii) + 1))


def lorentz_permittivity(omega, model: LorentzModel):
    """eps_L = 1 + omega_p^2 / (omega_0^2 - omega^2 - i gamma omega)."""
    return 1 + model.omega_p ** 2 / (model.omega_0 ** 2 - omega ** 2 - 1j * model.gamma * omega)


def profile_permittivity(r, omega, geometry: ObhGeometry, model: LorentzModel):
    """Continuous profile: 1 outside a_s, (a_s/r)^2 eps_L in the shell, eps_core inside.

    A radius exactly on a boundary belongs to the inner region.
    """
    if r < 0:
        raise GeometryError("radius must be nonnegative")
    if r > geometry.a_s:
        return 1.0 + 0j
    if r > geometry.a_c:
        return (geometry.a_s / r) ** 2 * lorentz_permittivity(omega, model)
    return complex(geometry.eps_core)


def discretize_shell(geometry: ObhGeometry, model: LorentzModel, shell_layers: int,
                     sampling: str = "inner") -> LayerStack:
    """Split the graded shell into equal-thickness homogeneous layers.

    Interface m (1-based) sits at a_m = a_s - (m - 1) * delta. With the
    default ``sampling="inner"`` layer m takes (a_s / a_m)^2 eps_L, a_m being
    its inner interface; ``"midpoint"`` uses the layer's mid radius instead.
    """
    if shell_layers < 1:
        raise GeometryError("shell_layers must be >= 1")
    if sampling not in SAMPLINGS:
        raise GeometryError(f"sampling must be one of {SAMPLINGS}")
    delta = (geometry.a_s - geometry.a_c) / shell_layers
    radii = tuple(geometry.a_s - m * delta for m in range(shell_layers + 1))
    layers = [ConstantLayer(1.0)]
    for m in range(1, shell_layers + 1):
        r_ref = radii[m] if sampling == "inner" else radii[m] + delta / 2
        layers.append(ScaledLorentzLayer((geometry.a_s / r_ref) ** 2, model))
    layers.append(ConstantLayer(complex(geometry.eps_core)))
    return LayerStack(radii, tuple(layers))
