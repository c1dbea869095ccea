"""Frequency-region decomposition and multiplier envelope certification.

Frequency space splits by the relative size of |a| (the x-wavenumber,
which drives the wave coupling) and |k|^2 (which drives dissipation):

    D1:  |a| >= |k|^2          (strong coupling, heat-like decay)
    D2:  |k|^2/2 <= |a| < |k|^2
    D3:  |k|^2/4 <= |a| < |k|^2/2
    D4:  |a| < |k|^2/4         (weak coupling; split at |k| = 1 into
                                D41 (|k| >= 1) and D42 (|k| < 1))

The zero frequency lands in D1 (0 >= 0).  Each region carries an explicit
envelope that dominates the multipliers with a uniform constant; the
constant is measured once on a dense sweep and frozen as a regression
bound rather than assumed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadRegion, EmptySweep, RegionMismatch
from .propagator import multipliers

REGION_NAMES = ("D1", "D2", "D3", "D41", "D42")
#: The four envelope cases; D4 is certified as one region (the envelope
#: does not depend on the D41/D42 split, and the sup over the union is
#: attained at t <= 10, which the split's small-|k| half alone is not).
BOUND_REGIONS = ("D1", "D2", "D3", "D4")
_CODES = {"D1": 1, "D2": 2, "D3": 3, "D41": 41, "D42": 42}


def classify(kx, ky):
    """Region code per frequency (vectorized); see module docstring.

    Returns integer codes 1, 2, 3, 41, 42 for D1, D2, D3, D41, D42.
    """
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    a = np.abs(kx) + 0.0 * ky
    s = kx**2 + ky**2
    code = np.where(
        a >= s,
        1,
        np.where(
            a >= 0.5 * s,
            2,
            np.where(a >= 0.25 * s, 3, np.where(np.sqrt(s) >= 1.0, 41, 42)),
        ),
    )
    return code


def region_name(code):
    for name, c in _CODES.items():
        if c == code:
            return name
    raise ValueError(f"unknown region code {code}")


def region_mask(grid, region):
    """Boolean mesh selecting a region; region may be 'D4' for D41 u D42."""
    code = classify(grid.kx_mesh, grid.ky_mesh)
    if region == "D4":
        return (code == 41) | (code == 42)
    if region not in _CODES:
        raise ValueError(f"unknown region {region!r}")
    return code == _CODES[region]


def _in_region(code, region):
    if region == "D4":
        return (code == 41) | (code == 42)
    return code == _CODES[region]


def envelope(i, region, kx, ky, t):
    """Dominating envelope (constant 1) for multiplier i on a region.

    D1: e^{-|k|^2 t/2}; D2: e^{-|k|^2 t/4}; D3: e^{-|k|^2 t/32} (all i).
    D4: (|a|/|k|^2) e^{-(a^2/|k|^2) t}        for i = 1,
        e^{-(a^2/|k|^2) t}                    for i = 2,
        e^{-|k|^2 t/2} + (a^2/|k|^4) e^{-(a^2/|k|^2) t}   for i = 3.

    Raises RegionMismatch if any (kx, ky) is not in the stated region.
    """
    if i not in (1, 2, 3):
        raise ValueError("multiplier index must be 1, 2 or 3")
    if region not in _CODES and region != "D4":
        raise ValueError(f"unknown region {region!r}")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    code = classify(kx, ky)
    if not np.all(_in_region(code, region)):
        raise RegionMismatch(f"some frequencies are not in {region}")
    s = kx**2 + ky**2
    if region == "D1":
        return np.exp(-0.5 * s * t)
    if region == "D2":
        return np.exp(-0.25 * s * t)
    if region == "D3":
        return np.exp(-s * t / 32.0)
    # D4 variants: s > 0 there (the origin classifies as D1).
    a2 = kx**2
    wave = np.exp(-(a2 / s) * t)
    if i == 1:
        return np.abs(kx) / s * wave
    if i == 2:
        return wave
    return np.exp(-0.5 * s * t) + a2 / s**2 * wave


@dataclass
class BoundReport:
    """Measured sup of |multiplier| / envelope over a sampled sweep."""

    region: str
    i: int
    sup_ratio: float
    sup_ratio_t10: float  # same sup restricted to t <= 10
    argmax_kx: float
    argmax_ky: float
    argmax_t: float
    n_freqs: int
    n_times: int
    # For the two-term D4, i = 3 envelope only: which term is larger at
    # the argmax sample ("heat" or "wave"); None for single-term envelopes.
    dominant_term: str | None = None


def standard_times(n=50, t_max=100.0):
    """t = 0 plus n-1 log-spaced times up to t_max."""
    return np.concatenate(([0.0], np.geomspace(0.01, t_max, n - 1)))


def sample_region_frequencies(region, n, rng):
    """Draw n frequencies inside a region by rejection.

    Radii are log-uniform in [1e-3, 8] and angles uniform, so both
    |k| < 1 and |k| >= 1 regimes are covered.
    """
    out_kx = np.empty(n)
    out_ky = np.empty(n)
    got = 0
    attempts = 0
    while got < n:
        attempts += 1
        if attempts > 2000:
            raise EmptySweep(f"rejection sampling starved for region {region}")
        m = max(4 * (n - got), 4096)
        r = 10.0 ** rng.uniform(-3.0, np.log10(8.0), m)
        th = rng.uniform(0.0, 2.0 * np.pi, m)
        kx = r * np.cos(th)
        ky = r * np.sin(th)
        keep = _in_region(classify(kx, ky), region)
        take = min(int(np.sum(keep)), n - got)
        if take:
            out_kx[got : got + take] = kx[keep][:take]
            out_ky[got : got + take] = ky[keep][:take]
            got += take
    return out_kx, out_ky


def verify_bounds(n_per_region=10_000, times=None, seed=2024, regions=BOUND_REGIONS):
    """Measure sup |M_i| / envelope per (region, i) over a seeded sweep.

    Returns a list of BoundReport, one per (region, i), sweeping the four
    envelope cases by default.  The reports expose both the full-sweep sup
    and the sup restricted to t <= 10 so callers can check that the
    constant is stable in time (no hidden growth).
    """
    if n_per_region <= 0:
        raise EmptySweep("sweep has no frequency samples")
    times = standard_times() if times is None else np.asarray(times, dtype=float)
    if times.size == 0:
        raise EmptySweep("sweep has no time samples")
    rng = np.random.default_rng(seed)
    reports = []
    for region in regions:
        kx, ky = sample_region_frequencies(region, n_per_region, rng)
        env_region = "D4" if region in ("D41", "D42") else region
        best = {i: (-1.0, 0.0, 0, 0) for i in (1, 2, 3)}
        for j, t in enumerate(times):
            M1, M2, M3 = multipliers(kx, ky, t)
            for i, M in ((1, M1), (2, M2), (3, M3)):
                env = envelope(i, env_region, kx, ky, t)
                ratio = np.abs(M) / env
                idx = int(np.argmax(ratio))
                cur = float(ratio[idx])
                sup, sup10, _, _ = best[i]
                new_sup10 = max(sup10, cur) if t <= 10.0 else sup10
                if cur > sup:
                    best[i] = (cur, new_sup10, idx, j)
                else:
                    best[i] = (sup, new_sup10, best[i][2], best[i][3])
        for i in (1, 2, 3):
            sup, sup10, idx, j = best[i]
            dominant = None
            if env_region == "D4" and i == 3:
                akx, aky, at = float(kx[idx]), float(ky[idx]), float(times[j])
                s = akx**2 + aky**2
                heat = np.exp(-0.5 * s * at)
                wave = akx**2 / s**2 * np.exp(-(akx**2 / s) * at)
                dominant = "heat" if heat >= wave else "wave"
            reports.append(
                BoundReport(
                    region=region,
                    i=i,
                    sup_ratio=sup,
                    sup_ratio_t10=sup10,
                    argmax_kx=float(kx[idx]),
                    argmax_ky=float(ky[idx]),
                    argmax_t=float(times[j]),
                    n_freqs=n_per_region,
                    n_times=int(times.size),
                    dominant_term=dominant,
                )
            )
    return reports


def heat_region_decay(f, region, r, k, c, times):
    """Norm series t -> || |grad|^k e^{c t Lap} f ||_{FL^r(region)}.

    Only the two regions with dedicated heat estimates are exposed: D1 and
    D4 (the union D41 u D42); r = 1 is the coefficient-sum norm, r = 2 the
    Parseval L^2 norm, both restricted to the region mask.
    """
    if region not in ("D1", "D4"):
        raise BadRegion("heat_region_decay supports regions D1 and D4 only")
    if r not in (1, 2):
        raise ValueError("r must be 1 or 2")
    if c <= 0:
        raise ValueError("diffusion constant must be positive")
    g = f.grid
    mask = region_mask(g, region)
    k2 = g.k2_mesh
    weight = np.sqrt(k2) ** k if k else np.ones_like(k2)
    base = np.where(mask, weight * np.abs(f.coeffs), 0.0)
    out = np.empty(len(times))
    for j, t in enumerate(np.asarray(times, dtype=float)):
        decayed = base * np.exp(-c * k2 * t)
        if r == 1:
            out[j] = np.sum(decayed)
        else:
            out[j] = np.sqrt(g.box_area * np.sum(decayed**2))
    return out
