"""Self-contained verification suites behind `verify` and the acceptance gate.

Each check_* function runs a frozen, seeded experiment and returns a plain
dict of measured numbers plus a "passed" flag, so the CLI can emit CSV
reports and tests can assert on the same values without re-specifying the
sweeps.
"""

import json
from importlib import resources

import numpy as np

from .initial import random_band_state
from .nonlinear import duhamel_reconstruct, energy_balance, run
from .propagator import (
    eigenvalues,
    identity_residuals,
    matrix_exponential_oracle_batch,
    multipliers,
)
from .regions import standard_times, verify_bounds
from .spectral import Grid2D

# Frozen sweep seeds: changing any of these invalidates recorded reports.
MULTIPLIER_SWEEP_SEED = 314159
IDENTITY_SWEEP_SEED = 271828
BOUNDS_SWEEP_SEED = 2024
DUHAMEL_SEED = 7
ENERGY_SEED = 11

# Entries below this scale are held to an absolute bound instead of a
# relative one: the scaling-and-squaring oracle carries ~1e-14 absolute
# noise (machine epsilon amplified through the squaring chain), so demanding
# 1e-9 *relative* agreement on entries near that noise floor is meaningless.
# With the 1e-9 relative tolerance this floor puts the absolute bound for
# tiny entries at 1e-13, an order above the oracle's own noise.
REL_FLOOR = 1e-4

MULTIPLIER_TOL_REL = 1e-9
INVARIANT_TOL = 1e-10
IDENTITY_TOL = 1e-6
IDENTITY_STEP = 1e-4
RICHARDSON_BAND = (3.0, 5.0)
BOUND_STABILITY_FACTOR = 1.01
BOUND_REGRESSION_FACTOR = 1.01
DUHAMEL_TOL = 1e-4
ENERGY_RESIDUAL_TOL = 1e-3


def multiplier_sweep(n=100_000, n_degenerate=1_000, seed=MULTIPLIER_SWEEP_SEED):
    """Frozen random sweep of (kx, ky, t): log-uniform radii and times,
    plus points jittered off the eigenvalue-collision curve 4 a^2 = |k|^4."""
    rng = np.random.default_rng(seed)
    n_base = n - n_degenerate
    r = 10.0 ** rng.uniform(-3.0, np.log10(8.0), n_base)
    th = rng.uniform(0.0, 2.0 * np.pi, n_base)
    kx = r * np.cos(th)
    ky = r * np.sin(th)
    t = 10.0 ** rng.uniform(-4.0, 2.0, n_base)

    # Degenerate curve: |a| = |k|^2 / 2, only reachable for |k| <= 2.
    rd = rng.uniform(0.1, 2.0, n_degenerate)
    jitter = 1.0 + 1e-6 * rng.uniform(-1.0, 1.0, n_degenerate)
    kxd = 0.5 * rd**2 * jitter * rng.choice([-1.0, 1.0], n_degenerate)
    kyd = np.sqrt(np.maximum(rd**2 - kxd**2, 0.0)) * rng.choice(
        [-1.0, 1.0], n_degenerate
    )
    td = 10.0 ** rng.uniform(-3.0, 2.0, n_degenerate)

    return (
        np.concatenate([kx, kxd]),
        np.concatenate([ky, kyd]),
        np.concatenate([t, td]),
    )


def check_multipliers(n=100_000, n_degenerate=1_000, seed=MULTIPLIER_SWEEP_SEED):
    """Closed-form multipliers vs the dense matrix-exponential oracle."""
    kx, ky, t = multiplier_sweep(n, n_degenerate, seed)
    M1, M2, M3 = multipliers(kx, ky, t)
    E = matrix_exponential_oracle_batch(kx, ky, t)

    def rel(a, o):
        return np.abs(a - o) / np.maximum(np.abs(o), REL_FLOOR)

    rel_errs = np.max(
        [
            rel(M3, E[:, 0, 0]),
            rel(M1, E[:, 0, 1]),
            rel(M1, E[:, 1, 0]),
            rel(M2, E[:, 1, 1]),
        ],
        axis=0,
    )
    lam_p, lam_m, _ = eigenvalues(kx, ky)
    trace_errs = np.abs((M2 + M3) - (np.exp(lam_p * t) + np.exp(lam_m * t)))
    det_errs = np.abs((M2 * M3 - M1**2) - np.exp(-(kx**2 + ky**2) * t))
    failing = (
        (rel_errs > MULTIPLIER_TOL_REL)
        | (trace_errs > INVARIANT_TOL)
        | (det_errs > INVARIANT_TOL)
    )
    first_fail = int(np.argmax(failing)) if failing.any() else -1
    return {
        "n_samples": int(kx.size),
        "kx": kx,
        "ky": ky,
        "t": t,
        "rel_errs": rel_errs,
        "trace_errs": trace_errs,
        "det_errs": det_errs,
        "max_rel_err": float(np.max(rel_errs)),
        "max_trace_err": float(np.max(trace_errs)),
        "max_det_err": float(np.max(det_errs)),
        "first_failure": first_fail,
        "tol_rel": MULTIPLIER_TOL_REL,
        "tol_invariant": INVARIANT_TOL,
        "passed": not failing.any(),
    }


def identity_sweep(n=400, seed=IDENTITY_SWEEP_SEED):
    rng = np.random.default_rng(seed)
    r = 10.0 ** rng.uniform(np.log10(0.3), np.log10(3.0), n)
    th = rng.uniform(0.0, 2.0 * np.pi, n)
    t = rng.uniform(1.0, 3.0, n)
    return r * np.cos(th), r * np.sin(th), t


def check_identities(n=400, seed=IDENTITY_SWEEP_SEED, h=IDENTITY_STEP):
    """Centered-difference residuals of the derivative relations
    d/dt M2 = -i a M1 and d/dt M1 = -i a M3, with a Richardson halving."""
    kx, ky, t = identity_sweep(n, seed)
    r1, r2 = identity_residuals(kx, ky, t, h)
    r1h, r2h = identity_residuals(kx, ky, t, 0.5 * h)
    max_r1, max_r2 = float(np.max(r1)), float(np.max(r2))
    ratio1 = max_r1 / float(np.max(r1h))
    ratio2 = max_r2 / float(np.max(r2h))
    lo, hi = RICHARDSON_BAND
    return {
        "n_samples": n,
        "h": h,
        "kx": kx,
        "ky": ky,
        "t": t,
        "residuals_m2": r1,
        "residuals_m1": r2,
        "residuals_m2_half": r1h,
        "residuals_m1_half": r2h,
        "max_residual_m2": max_r1,
        "max_residual_m1": max_r2,
        "richardson_m2": ratio1,
        "richardson_m1": ratio2,
        "tol": IDENTITY_TOL,
        "passed": max(max_r1, max_r2) <= IDENTITY_TOL
        and lo <= ratio1 <= hi
        and lo <= ratio2 <= hi,
    }


def load_frozen_bound_constants():
    """Frozen per-(region, i) envelope constants from the dense dev sweep."""
    path = resources.files("mhd2d").joinpath("data/envelope_constants.json")
    with path.open() as fh:
        return json.load(fh)


def measure_bound_constants(n_per_region=100_000, seed=777):
    """Dense-sweep sup-ratio per (region, i); the source of the frozen file.

    The shipped envelope_constants.json is the output of this function at
    its defaults, kept as code so the frozen values can be regenerated and
    audited rather than trusted blindly.
    """
    reports = verify_bounds(
        n_per_region=n_per_region, times=standard_times(), seed=seed
    )
    return {f"{r.region}:{r.i}": r.sup_ratio for r in reports}


def check_bounds(n_per_region=10_000, seed=BOUNDS_SWEEP_SEED, frozen=None):
    """Envelope sup-ratios: stability in time and non-regression vs frozen."""
    reports = verify_bounds(n_per_region=n_per_region, times=standard_times(), seed=seed)
    frozen = load_frozen_bound_constants() if frozen is None else frozen
    rows = []
    passed = True
    for rep in reports:
        key = f"{rep.region}:{rep.i}"
        bound = frozen[key]
        stable = rep.sup_ratio <= BOUND_STABILITY_FACTOR * rep.sup_ratio_t10
        within = (
            bound / BOUND_REGRESSION_FACTOR
            <= rep.sup_ratio
            <= bound * BOUND_REGRESSION_FACTOR
        )
        passed = passed and stable and within
        rows.append(
            {
                "region": rep.region,
                "i": rep.i,
                "sup_ratio": rep.sup_ratio,
                "sup_ratio_t10": rep.sup_ratio_t10,
                "frozen": bound,
                "argmax_kx": rep.argmax_kx,
                "argmax_ky": rep.argmax_ky,
                "argmax_t": rep.argmax_t,
                "n_freqs": rep.n_freqs,
                "n_times": rep.n_times,
                "dominant_term": rep.dominant_term,
                "stable": stable,
                "within_frozen": within,
            }
        )
    return {"rows": rows, "passed": passed}


def duhamel_fixture_grid():
    return Grid2D(64, 64, 2.0 * np.pi, 2.0 * np.pi)


def check_duhamel(seed=DUHAMEL_SEED, amplitude=1e-2, dt=2.5e-3, T=1.0, n_samples=201):
    """Duhamel reconstruction vs the stepped state on a seeded 64^2 run."""
    g = duhamel_fixture_grid()
    state0 = random_band_state(g, seed=seed, amplitude=amplitude, k_min=1.0, k_max=8.0)
    sampler = np.linspace(0.0, T, n_samples)
    traj = run(state0, T, dt, sampler=sampler)
    rec = duhamel_reconstruct(traj, T)
    ref = traj.states[-1]
    num = 0.0
    den = 0.0
    for a, b in zip(rec.fields(), ref.fields()):
        num += float(np.sum(np.abs(a - b) ** 2))
        den += float(np.sum(np.abs(b) ** 2))
    rel = np.sqrt(num / den)
    return {
        "grid": "64x64",
        "amplitude": amplitude,
        "dt": dt,
        "t": T,
        "n_samples": n_samples,
        "rel_l2_error": float(rel),
        "tol": DUHAMEL_TOL,
        "passed": rel <= DUHAMEL_TOL,
    }


def check_energy(seed=ENERGY_SEED, amplitude=1e-2, dt=2e-3, T=1.0):
    """Energy-identity residual plus its Richardson ratio under dt halving.

    The band stops at |k| = 4: the centered-difference truncation scales like
    (2 |k|^2 dt)^2 / 6, so the fastest mode sets the residual floor and k up
    to 8 would park it above the tolerance at this dt.
    """
    g = Grid2D(64, 64, 2.0 * np.pi, 2.0 * np.pi)
    state0 = random_band_state(g, seed=seed, amplitude=amplitude, k_min=1.0, k_max=4.0)
    _, res_a = energy_balance(run(state0, T, dt))
    _, res_b = energy_balance(run(state0, T, 0.5 * dt))
    max_a = float(np.max(res_a))
    max_b = float(np.max(res_b))
    ratio = max_a / max_b if max_b > 0 else np.inf
    lo, hi = RICHARDSON_BAND
    return {
        "dt": dt,
        "max_residual": max_a,
        "max_residual_half_dt": max_b,
        "richardson": ratio,
        "tol": ENERGY_RESIDUAL_TOL,
        "passed": max_a <= ENERGY_RESIDUAL_TOL and lo <= ratio <= hi,
    }
