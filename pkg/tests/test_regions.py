"""Tests for the frequency-region decomposition and envelope certification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhd2d.errors import BadRegion, EmptySweep, RegionMismatch
from mhd2d.regions import (
    BOUND_REGIONS,
    REGION_NAMES,
    classify,
    envelope,
    heat_region_decay,
    region_mask,
    region_name,
    sample_region_frequencies,
    standard_times,
    verify_bounds,
)
from mhd2d.spectral import Grid2D, SpectralField

finite_freq = st.floats(-8.0, 8.0, allow_nan=False)


@pytest.mark.parametrize(
    "kx,ky,code",
    [
        (1.0, 0.0, 1),  # boundary: |a| = |k|^2 exactly
        (1.0, 2.0, 41),  # |a| < |k|^2/4, |k| = sqrt(5) >= 1
        (0.001, 0.2, 42),  # |a| < |k|^2/4, |k| = 0.2 < 1
        (0.0, 0.0, 1),  # origin: 0 >= 0
        (0.6, 0.8, 2),  # |k|^2 = 1: 0.5 <= 0.6 < 1
        (0.3, np.sqrt(0.91), 3),  # |a| = 0.3 in [0.25, 0.5) of |k|^2 = 1
    ],
)
def test_classify_examples(kx, ky, code):
    assert classify(kx, ky) == code


def test_classify_vectorized_matches_scalar():
    rng = np.random.default_rng(5)
    kx = rng.uniform(-4, 4, 100)
    ky = rng.uniform(-4, 4, 100)
    codes = classify(kx, ky)
    assert codes.shape == (100,)
    for j in range(100):
        assert codes[j] == classify(kx[j], ky[j])


@given(finite_freq, finite_freq)
@settings(max_examples=200, deadline=None)
def test_classify_sign_invariance(kx, ky):
    # membership depends only on (|a|, |k|^2)
    c = classify(kx, ky)
    assert classify(kx, -ky) == c
    assert classify(-kx, ky) == c
    assert classify(-kx, -ky) == c


def test_partition_is_exhaustive():
    g = Grid2D(64, 64, 2 * np.pi, 2 * np.pi)
    codes = classify(g.kx_mesh, g.ky_mesh)
    counts = {name: int(np.sum(region_mask(g, name))) for name in REGION_NAMES}
    assert set(np.unique(codes)) <= {1, 2, 3, 41, 42}
    assert sum(counts.values()) == g.nx * g.ny


def test_region_masks_are_disjoint_and_d4_is_union():
    g = Grid2D(32, 32, 2 * np.pi, 2 * np.pi)
    masks = [region_mask(g, name) for name in REGION_NAMES]
    total = np.zeros((g.nx, g.ny), dtype=int)
    for m in masks:
        total += m
    assert np.all(total == 1)
    assert np.array_equal(
        region_mask(g, "D4"), region_mask(g, "D41") | region_mask(g, "D42")
    )
    with pytest.raises(ValueError):
        region_mask(g, "D5")


def test_containment_radii_per_region():
    # |a| >= |k|^2/c with |a| <= |k| forces |k| <= c; each bound is sharp
    # and attained on a fine grid (so a tighter union bound would be false)
    g = Grid2D(256, 256, 100.0, 100.0)  # frequency step ~0.063, |k| up to ~8
    r = np.sqrt(g.k2_mesh)
    caps = {"D1": 1.01, "D2": 2.01, "D3": 4.01}
    for name, cap in caps.items():
        sup = float(np.max(r[region_mask(g, name)]))
        assert sup <= cap
        assert sup > cap - 1.02  # within one unit of sharp: bound is tight
    union = region_mask(g, "D1") | region_mask(g, "D2") | region_mask(g, "D3")
    assert float(np.max(r[union])) <= 4.01
    assert float(np.max(r[union])) > 3.9  # union bound 4 attained, not 2


def test_region_name_round_trip():
    for name in REGION_NAMES:
        assert region_name(classify(*_point_in(name))) == name
    with pytest.raises(ValueError):
        region_name(7)


def _point_in(name):
    return {
        "D1": (1.0, 0.0),
        "D2": (0.6, 0.8),
        "D3": (0.3, np.sqrt(0.91)),
        "D41": (1.0, 2.0),
        "D42": (0.001, 0.2),
    }[name]


@pytest.mark.parametrize("i", [1, 2, 3])
def test_envelope_is_one_at_time_zero_on_d1(i):
    assert envelope(i, "D1", 1.0, 0.0, 0.0) == 1.0


def test_envelope_examples():
    # D4, i = 1 at (0.1, 1): |a|/|k|^2 = 0.1/1.01 at t = 0
    assert np.isclose(envelope(1, "D4", 0.1, 1.0, 0.0), 0.1 / 1.01, rtol=1e-15)
    # D3, i = 2 with |a| = 0.3 |k|^2: pure e^{-|k|^2 t/32}
    kx, ky = 0.3, np.sqrt(0.91)
    assert np.isclose(envelope(2, "D3", kx, ky, 10.0), np.exp(-10.0 / 32.0), rtol=1e-15)


def test_envelope_d4_i3_is_sum_of_heat_and_wave_terms():
    kx, ky, t = 0.2, 1.4, 3.0
    s = kx**2 + ky**2
    expected = np.exp(-0.5 * s * t) + kx**2 / s**2 * np.exp(-(kx**2 / s) * t)
    assert np.isclose(envelope(3, "D4", kx, ky, t), expected, rtol=1e-15)


def test_envelope_rejects_misclassified_points():
    # points on the a = 0 line are never in D1 (except the origin)
    with pytest.raises(RegionMismatch):
        envelope(2, "D1", 0.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        envelope(4, "D1", 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        envelope(1, "D9", 1.0, 0.0, 1.0)


@pytest.mark.parametrize("region", ["D1", "D2", "D3", "D4", "D41", "D42"])
def test_sample_region_frequencies_lands_in_region(region):
    rng = np.random.default_rng(42)
    kx, ky = sample_region_frequencies(region, 500, rng)
    code = classify(kx, ky)
    if region == "D4":
        assert np.all((code == 41) | (code == 42))
        assert np.any(code == 41) and np.any(code == 42)  # both radii regimes
    else:
        assert np.all(code == {"D1": 1, "D2": 2, "D3": 3, "D41": 41, "D42": 42}[region])


def test_standard_times_shape():
    t = standard_times()
    assert t.shape == (50,)
    assert t[0] == 0.0
    assert np.isclose(t[1], 0.01) and np.isclose(t[-1], 100.0)
    assert np.all(np.diff(t) > 0)


def test_verify_bounds_reports():
    # stability is a property of the contract-size sweep (10^4 x 50);
    # sparser sweeps under-sample the ratio peak and may miss it
    reports = verify_bounds(n_per_region=10_000, seed=2024)
    assert len(reports) == len(BOUND_REGIONS) * 3
    for r in reports:
        assert r.region in BOUND_REGIONS
        assert np.isfinite(r.sup_ratio) and r.sup_ratio > 0
        assert r.sup_ratio_t10 <= r.sup_ratio
        # stability: the sup must not keep growing past t = 10
        assert r.sup_ratio <= 1.01 * r.sup_ratio_t10
        assert r.n_freqs == 10_000 and r.n_times == 50
        if r.region == "D4" and r.i == 3:
            assert r.dominant_term in ("heat", "wave")
        else:
            assert r.dominant_term is None


def test_verify_bounds_is_reproducible():
    a = verify_bounds(n_per_region=200, seed=9)
    b = verify_bounds(n_per_region=200, seed=9)
    for ra, rb in zip(a, b):
        assert ra == rb  # bit-exact, dataclass equality


def test_verify_bounds_empty_sweeps():
    with pytest.raises(EmptySweep):
        verify_bounds(n_per_region=0)
    with pytest.raises(EmptySweep):
        verify_bounds(n_per_region=10, times=np.array([]))


def test_heat_region_decay_zero_field():
    g = Grid2D(32, 32, 2 * np.pi, 2 * np.pi)
    f = SpectralField(g, np.zeros((32, 32), dtype=complex))
    out = heat_region_decay(f, "D1", 2, 0, 0.5, [0.0, 1.0, 2.0])
    assert np.all(out == 0.0)


def test_heat_region_decay_matches_direct_sum():
    g = Grid2D(16, 16, 2 * np.pi, 2 * np.pi)
    rng = np.random.default_rng(3)
    c = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    f = SpectralField(g, c)
    mask = region_mask(g, "D4")
    k2 = g.k2_mesh
    for r, k in [(1, 0), (2, 1), (1, 2)]:
        out = heat_region_decay(f, "D4", r, k, 0.5, [0.7])
        w = np.sqrt(k2) ** k if k else np.ones_like(k2)
        decayed = np.where(mask, w * np.abs(c), 0.0) * np.exp(-0.5 * k2 * 0.7)
        ref = np.sum(decayed) if r == 1 else np.sqrt(g.box_area * np.sum(decayed**2))
        assert np.isclose(out[0], ref, rtol=1e-13)


def test_heat_region_decay_is_decreasing():
    g = Grid2D(32, 32, 2 * np.pi, 2 * np.pi)
    rng = np.random.default_rng(8)
    c = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    out = heat_region_decay(SpectralField(g, c), "D1", 2, 0, 1.0, [0.0, 0.5, 1.0, 4.0])
    assert np.all(np.diff(out) < 0)


def test_heat_region_decay_rejects_bad_arguments():
    g = Grid2D(16, 16, 2 * np.pi, 2 * np.pi)
    f = SpectralField(g, np.zeros((16, 16), dtype=complex))
    for region in ("D2", "D3", "D41"):
        with pytest.raises(BadRegion):
            heat_region_decay(f, region, 2, 0, 0.5, [1.0])
    with pytest.raises(ValueError):
        heat_region_decay(f, "D1", 3, 0, 0.5, [1.0])
    with pytest.raises(ValueError):
        heat_region_decay(f, "D1", 2, 0, 0.0, [1.0])
