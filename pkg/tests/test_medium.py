import numpy as np
import pytest
from hypothesis import given, strategies as st

from obh_entanglement.medium import (ConstantLayer, GeometryError, LayerStack, LorentzModel,
                                     ObhGeometry, discretize_shell, lorentz_permittivity,
                                     profile_permittivity)

MODEL = LorentzModel()
GEOM = ObhGeometry()


def test_lorentz_on_resonance():
    # 1 + omega_p^2 / (-i gamma) = 1 + i omega_p^2 / gamma
    assert lorentz_permittivity(1.0, MODEL) == pytest.approx(1 + 1j)


def test_lorentz_static_limit():
    assert lorentz_permittivity(0.0, MODEL) == pytest.approx(1.01)


@given(st.floats(1e-3, 10))
def test_lorentz_is_passive(w):
    assert lorentz_permittivity(w, MODEL).imag > 0


@given(st.floats(1e-3, 10))
def test_lorentz_reality_condition(w):
    assert lorentz_permittivity(-w, MODEL) == pytest.approx(np.conj(lorentz_permittivity(w, MODEL)))


def test_default_geometry_is_index_matched():
    assert GEOM.matches_core_index()


def test_profile_regions_and_boundaries():
    w = 0.1
    eps_l = lorentz_permittivity(w, MODEL)
    assert profile_permittivity(9 * np.pi, w, GEOM, MODEL) == 1
    assert profile_permittivity(GEOM.a_s, w, GEOM, MODEL) == pytest.approx(eps_l)
    assert profile_permittivity(6 * np.pi, w, GEOM, MODEL) == pytest.approx(16 / 9 * eps_l)
    assert profile_permittivity(GEOM.a_c, w, GEOM, MODEL) == GEOM.eps_core
    with pytest.raises(GeometryError):
        profile_permittivity(-1.0, w, GEOM, MODEL)


def test_discretization_radii_and_inner_sampling():
    stack = discretize_shell(GEOM, MODEL, 10)
    assert stack.n_regions == 12
    assert stack.radii[0] == pytest.approx(8 * np.pi)
    assert stack.radii[-1] == pytest.approx(4 * np.pi)
    assert np.diff(stack.radii) == pytest.approx(np.full(10, -0.4 * np.pi))
    eps = stack.permittivities(1.0)
    assert eps[0] == 1 and eps[-1] == GEOM.eps_core
    # the innermost shell layer reaches the core index scale (a_s/a_c)^2 = 4
    assert eps[-2] == pytest.approx(4 * (1 + 1j))
    assert eps[1] == pytest.approx((8 / 7.6) ** 2 * (1 + 1j))


def test_midpoint_sampling_lies_between():
    inner = discretize_shell(GEOM, MODEL, 10).permittivities(0.3)
    mid = discretize_shell(GEOM, MODEL, 10, "midpoint").permittivities(0.3)
    assert np.all(mid[1:-1].real < inner[1:-1].real)


@given(st.integers(1, 60), st.floats(1e-2, 5))
def test_all_layers_passive(layers, w):
    eps = discretize_shell(GEOM, MODEL, layers).permittivities(w)
    assert np.all(eps.imag >= 0)


def test_constant_layer_conjugates_for_negative_frequency():
    layer = ConstantLayer(4 + 0.33j)
    assert layer(0.5) == 4 + 0.33j
    assert layer(-0.5) == 4 - 0.33j


def test_stack_validation():
    with pytest.raises(GeometryError):
        LayerStack.from_constants([1.0, 2.0], [1, 2, 3])
    with pytest.raises(GeometryError):
        LayerStack.from_constants([2.0], [1, 2, 3])
    with pytest.raises(GeometryError):
        ObhGeometry(a_s=1.0, a_c=2.0)
    with pytest.raises(GeometryError):
        discretize_shell(GEOM, MODEL, 0)
    assert LayerStack.vacuum([3.0, 1.0]).is_vacuum(0.7)
