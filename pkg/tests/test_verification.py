"""Tests for the frozen verification suites behind `verify`."""

import numpy as np
import pytest

from mhd2d.regions import BOUND_REGIONS
from mhd2d.verification import (
    BOUND_STABILITY_FACTOR,
    DUHAMEL_TOL,
    ENERGY_RESIDUAL_TOL,
    IDENTITY_TOL,
    INVARIANT_TOL,
    MULTIPLIER_TOL_REL,
    check_bounds,
    check_duhamel,
    check_energy,
    check_identities,
    check_multipliers,
    identity_sweep,
    load_frozen_bound_constants,
    measure_bound_constants,
    multiplier_sweep,
)

FROZEN_KEYS = {f"{region}:{i}" for region in BOUND_REGIONS for i in (1, 2, 3)}


def test_frozen_tolerances():
    # contract numbers: loosening any of these weakens every report
    assert MULTIPLIER_TOL_REL == 1e-9
    assert INVARIANT_TOL == 1e-10
    assert IDENTITY_TOL == 1e-6
    assert DUHAMEL_TOL == 1e-4
    assert ENERGY_RESIDUAL_TOL == 1e-3
    assert BOUND_STABILITY_FACTOR == 1.01


class TestMultiplierSweep:
    def test_sizes(self):
        kx, ky, t = multiplier_sweep(n=500, n_degenerate=50)
        assert kx.shape == ky.shape == t.shape == (500,)

    def test_default_size_is_contract_size(self):
        kx, _, _ = multiplier_sweep()
        assert kx.size == 100_000

    def test_base_block_spans_the_ranges(self):
        kx, ky, t = multiplier_sweep(n=20_000, n_degenerate=1_000)
        r = np.hypot(kx, ky)
        assert r.min() < 2e-3 and r.max() > 7.0
        assert t.min() < 2e-4 and t.max() > 50.0

    def test_degenerate_block_hugs_the_collision_curve(self):
        n, nd = 5_000, 500
        kx, ky, _ = multiplier_sweep(n=n, n_degenerate=nd)
        kx, ky = kx[n - nd :], ky[n - nd :]
        k2 = kx**2 + ky**2
        disc = k2**2 - 4.0 * kx**2
        rel = np.abs(disc) / k2**2
        # 1e-6 multiplicative jitter puts the discriminant at ~2e-6 relative
        assert np.max(rel) < 3e-6

    def test_deterministic_per_seed(self):
        a = multiplier_sweep(n=300, n_degenerate=30, seed=42)
        b = multiplier_sweep(n=300, n_degenerate=30, seed=42)
        c = multiplier_sweep(n=300, n_degenerate=30, seed=43)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)
        assert not np.array_equal(a[0], c[0])


class TestCheckMultipliers:
    def test_passes_at_reduced_size(self):
        out = check_multipliers(n=2_000, n_degenerate=200)
        assert out["passed"]
        assert out["n_samples"] == 2_000
        assert out["first_failure"] == -1
        assert out["max_rel_err"] <= 1e-9
        assert out["max_trace_err"] <= 1e-10
        assert out["max_det_err"] <= 1e-10

    def test_per_sample_arrays_align(self):
        out = check_multipliers(n=500, n_degenerate=50)
        for key in ("kx", "ky", "t", "rel_errs", "trace_errs", "det_errs"):
            assert out[key].shape == (500,)
        assert out["max_rel_err"] == np.max(out["rel_errs"])

    @pytest.mark.parametrize("seed", [1, 99])
    def test_passes_for_other_seeds(self, seed):
        # the tolerance is a property of the evaluator, not of one lucky draw
        assert check_multipliers(n=1_000, n_degenerate=100, seed=seed)["passed"]


class TestCheckIdentities:
    def test_passes_at_default_size(self):
        out = check_identities()
        assert out["passed"]
        assert out["max_residual_m2"] <= 1e-6
        assert out["max_residual_m1"] <= 1e-6
        assert 3.0 <= out["richardson_m2"] <= 5.0
        assert 3.0 <= out["richardson_m1"] <= 5.0

    def test_sweep_deterministic(self):
        a = identity_sweep(n=100)
        b = identity_sweep(n=100)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_halving_h_shrinks_residuals(self):
        out = check_identities(n=200)
        assert np.max(out["residuals_m2_half"]) < out["max_residual_m2"]
        assert np.max(out["residuals_m1_half"]) < out["max_residual_m1"]


class TestFrozenConstants:
    def test_key_set(self):
        frozen = load_frozen_bound_constants()
        assert set(frozen) == FROZEN_KEYS

    def test_values_are_modest_constants(self):
        # the envelopes are near-sharp: every constant is O(1)
        for v in load_frozen_bound_constants().values():
            assert 0.3 < v < 1.3

    def test_spot_values(self):
        frozen = load_frozen_bound_constants()
        assert frozen["D1:1"] == pytest.approx(1.154657, abs=1e-6)
        assert frozen["D2:3"] == pytest.approx(1.0, abs=1e-12)
        assert frozen["D3:1"] == pytest.approx(0.392383, abs=1e-6)
        assert frozen["D4:3"] == pytest.approx(1.136027, abs=1e-6)

    def test_measure_agrees_with_frozen_at_small_size(self):
        frozen = load_frozen_bound_constants()
        measured = measure_bound_constants(n_per_region=500, seed=5)
        assert set(measured) == FROZEN_KEYS
        for key, sup in measured.items():
            # a thin sweep under-attains the sup but never overshoots it much
            assert 0.5 * frozen[key] <= sup <= 1.02 * frozen[key]


class TestCheckBounds:
    def test_passes_at_contract_size(self):
        out = check_bounds()
        assert out["passed"]
        rows = out["rows"]
        assert {(r["region"], r["i"]) for r in rows} == {
            (region, i) for region in BOUND_REGIONS for i in (1, 2, 3)
        }
        for row in rows:
            assert row["stable"] and row["within_frozen"]
            assert row["sup_ratio"] <= BOUND_STABILITY_FACTOR * row["sup_ratio_t10"]
            assert row["n_freqs"] == 10_000
            assert row["n_times"] == 50
            expect_term = row["region"] == "D4" and row["i"] == 3
            assert (row["dominant_term"] is not None) == expect_term

    def test_fails_against_wrong_frozen_values(self):
        frozen = {key: 10.0 for key in FROZEN_KEYS}
        out = check_bounds(n_per_region=300, frozen=frozen)
        assert not out["passed"]
        assert not any(r["within_frozen"] for r in out["rows"])


class TestCheckDuhamel:
    def test_passes_at_contract_settings(self):
        out = check_duhamel()
        assert out["passed"]
        assert out["rel_l2_error"] <= 1e-4
        assert out["n_samples"] == 201

    def test_coarse_sampling_degrades_quadratically(self):
        fine = check_duhamel(T=0.5, n_samples=101)
        coarse = check_duhamel(T=0.5, n_samples=51)
        ratio = coarse["rel_l2_error"] / fine["rel_l2_error"]
        assert 3.0 <= ratio <= 5.0


class TestCheckEnergy:
    def test_passes_at_contract_settings(self):
        out = check_energy()
        assert out["passed"]
        assert out["max_residual"] <= 1e-3
        assert 3.0 <= out["richardson"] <= 5.0
        assert out["max_residual_half_dt"] < out["max_residual"]
