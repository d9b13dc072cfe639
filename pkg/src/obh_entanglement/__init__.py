"""Two-atom entanglement near a layered optical-black-hole cylinder."""
from .atom_dynamics import AtomPair, RateSet, ShiftSet, amplitudes, decay_rates, dipole_shift
from .entanglement import NegativityTrace, TwoAtomState, negativity_closed, negativity_eigen, negativity_trace
from .layered_green import freespace_green_zz, scattering_coefficient, scattering_green_zz
from .medium import LayerStack, LorentzModel, ObhGeometry, discretize_shell, lorentz_permittivity
from .sommerfeld import QuadraturePolicy, integrate_h, pv_integral, sum_modes
from .specfun import bessel_j, deriv_pair, hankel1

__all__ = [
    "AtomPair", "RateSet", "ShiftSet", "amplitudes", "decay_rates", "dipole_shift",
    "NegativityTrace", "TwoAtomState", "negativity_closed", "negativity_eigen", "negativity_trace",
    "freespace_green_zz", "scattering_coefficient", "scattering_green_zz",
    "LayerStack", "LorentzModel", "ObhGeometry", "discretize_shell", "lorentz_permittivity",
    "QuadraturePolicy", "integrate_h", "pv_integral", "sum_modes",
    "bessel_j", "deriv_pair", "hankel1",
]
