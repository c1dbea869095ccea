"""Tests for divergence-free initial-data generation."""

import numpy as np
import pytest

from mhd2d.initial import (
    DEFAULT_PHI_COMPONENTS,
    DEFAULT_PSI_COMPONENTS,
    gaussian_mixture_values,
    gaussian_state,
    random_band_state,
    state_from_streams,
)
from mhd2d.spectral import Grid2D, SpectralField, inverse_transform

G = Grid2D(64, 64, 100.0, 100.0)
# the random-band defaults (k_min = 1) target unit-size boxes
GS = Grid2D(64, 64, 2 * np.pi, 2 * np.pi)


def _peak(state):
    return max(
        float(np.max(np.abs(inverse_transform(SpectralField(state.grid, c)).values)))
        for c in state.fields()
    )


@pytest.mark.parametrize(
    "make",
    [
        lambda: gaussian_state(G, 1e-2),
        lambda: random_band_state(GS, 31, 1e-2),
    ],
    ids=["gaussian", "random-band"],
)
def test_states_are_divergence_free_and_real(make):
    st = make()
    assert st.max_divergence() < 1e-15
    for c in st.fields():
        assert SpectralField(st.grid, c).is_hermitian(tol=1e-12)


@pytest.mark.parametrize("amp", [1e-3, 1e-2, 0.5])
def test_amplitude_sets_the_peak_magnitude(amp):
    st = gaussian_state(G, amp)
    assert np.isclose(_peak(st), amp, rtol=1e-12)


def test_gaussian_mixture_values_centered_and_symmetric():
    vals = gaussian_mixture_values(G, DEFAULT_PSI_COMPONENTS)
    assert np.all(vals > 0)
    # even about the box center in each axis: index L/2 +- j coincide
    c = G.nx // 2
    for j in (1, 5, 20):
        assert np.allclose(vals[c + j, :], vals[c - j, :], rtol=1e-13)
        assert np.allclose(vals[:, c + j], vals[:, c - j], rtol=1e-13)
    amp_sum = sum(a for a, _, _ in DEFAULT_PSI_COMPONENTS)
    assert np.isclose(vals[c, c], amp_sum, rtol=1e-12)  # all peaks at center


def test_gaussian_state_mixture_tables_are_frozen():
    assert DEFAULT_PSI_COMPONENTS == ((1.0, 2.79, 1.35), (1.21, 3.85, 2.54))
    assert DEFAULT_PHI_COMPONENTS == ((3.44, 1.07, 1.66), (1.51, 6.89, 3.32))


def test_stream_function_derivatives():
    # u = d/dy psi, v = -d/dx psi for psi = cos x on the 2pi box
    g = Grid2D(32, 32, 2 * np.pi, 2 * np.pi)
    psi = np.zeros((32, 32), dtype=complex)
    psi[1, 0] = 0.5
    psi[-1, 0] = 0.5  # cos x
    st = state_from_streams(g, psi, np.zeros_like(psi), 1.0)
    u = inverse_transform(SpectralField(g, st.uhat)).values
    v = inverse_transform(SpectralField(g, st.vhat)).values
    X = g.x[:, None] + 0.0 * g.y[None, :]
    assert np.max(np.abs(u)) < 1e-14  # d/dy cos x = 0
    assert np.allclose(v, np.sin(X), atol=1e-13)  # -d/dx cos x, peak 1


def test_zero_streams_stay_zero():
    g = Grid2D(16, 16, 2 * np.pi, 2 * np.pi)
    z = np.zeros((16, 16), dtype=complex)
    st = state_from_streams(g, z, z, 1e-2)
    for c in st.fields():
        assert np.all(c == 0)


def test_random_band_state_is_deterministic():
    a = random_band_state(GS, 123, 1e-2)
    b = random_band_state(GS, 123, 1e-2)
    for ca, cb in zip(a.fields(), b.fields()):
        assert np.array_equal(ca, cb)
    c = random_band_state(GS, 124, 1e-2)
    assert not np.array_equal(a.uhat, c.uhat)


def test_random_band_state_band_support():
    k_min, k_max = 0.5, 1.5
    st = random_band_state(G, 7, 1e-2, k_min=k_min, k_max=k_max)
    k = np.sqrt(G.k2_mesh)
    outside = (k < k_min) | (k > k_max)
    for c in st.fields():
        assert np.all(c[outside] == 0)
        assert np.any(c != 0)


def test_random_band_default_k_max_respects_dealiasing():
    st = random_band_state(GS, 7, 1e-2)
    k = np.sqrt(GS.k2_mesh)
    edge = 2.0 * np.pi / GS.Lx * (GS.nx // 3)
    for c in st.fields():
        assert np.all(c[k > 0.5 * edge + 1e-12] == 0)


@pytest.mark.parametrize(
    "call",
    [
        lambda: gaussian_state(G, 0.0),
        lambda: gaussian_state(G, -1.0),
        lambda: random_band_state(G, 1, 0.0),
        lambda: random_band_state(G, 1, 1e-2, k_min=2.0, k_max=1.0),
        lambda: random_band_state(G, 1, 1e-2, k_min=0.0, k_max=1.0),
    ],
)
def test_bad_parameters_raise(call):
    with pytest.raises(ValueError):
        call()
