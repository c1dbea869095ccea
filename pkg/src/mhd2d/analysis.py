"""Norm catalogue, decay-exponent table, power-law fitting, validity window.

Norm conventions (continuum-consistent, box-size independent exponents):

* ``L2``-type norms carry the box measure: ``sqrt(Lx Ly sum |c_k|^2)``
  (Parseval-exact for the physical L^2 norm over the box).
* ``FL1``-type norms are plain absolute coefficient sums ``sum |c_k|``,
  i.e. the L^1 norm of the transform under the measure dk/(2pi)^2; with
  this weight ``max |f| <= FL1(f)`` holds with equality for fields with
  nonnegative coefficients.
* ``H^N`` uses Japanese-bracket weights ``(1 + |k|^2)^N``.
* Mixed norms are iterated physical-grid quadratures, inner integral
  first (e.g. L1y_L2x: L^2 in x at each y, then summed over y with dy
  weights).
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveValue, WindowTooSmall
from .spectral import inverse_transform

# Canonical catalogue-norm names, in CSV column order.
NORM_NAMES = (
    "L2_uvec",
    "L2_u",
    "L2_v",
    "L2_b",
    "L2_B",
    "HN_uvec",
    "HN_bvec",
    "L2_dy_u",
    "H2_dx_uvec",
    "FL1_uvec",
    "FL1_dx_u",
    "H1_dx_b",
    "FL1_ninv_jap_b",
    "FL1_R1_jap_b",
    "FL1_B",
    "L2_dx_B",
    "L2_dx_b",
    "L2_dx_uvec",
    "HNm1_dx_bvec",
    "L1y_L2x_u",
    "L1x_L2y_u",
    "L1y_L2x_b",
    "L1x_L2y_b",
)


@dataclass
class NormReport:
    """All catalogue norms of one snapshot."""

    time: float
    N: int
    values: dict


@dataclass
class DecayFit:
    """Power-law fit of a norm series against <t> = sqrt(1 + t^2)."""

    exponent: float
    intercept: float
    r2: float
    t1: float
    t2: float


def theoretical_exponents():
    """Proved decay exponents (powers of <t>) for the table norms."""
    return {
        "L2_uvec": -0.5,
        "L2_dy_u": -0.75,
        "H2_dx_uvec": -1.0,
        "FL1_uvec": -1.0,
        "FL1_dx_u": -1.25,
        "L2_b": -0.25,
        "FL1_ninv_jap_b": -0.5,
        "L2_B": -0.5,
        "H1_dx_b": -0.75,
        "L2_dx_B": -1.0,
        "FL1_B": -1.0,
        "FL1_R1_jap_b": -1.0,
        "L2_dx_uvec": -1.0,
        "L2_dx_b": -0.75,
    }


def _l2(grid, weighted_sq_sum):
    return float(np.sqrt(grid.box_area * weighted_sq_sum))


def compute_norms(state, t, N=8):
    """Evaluate every catalogue norm of a spectral state at time t."""
    if N < 2:
        raise ValueError("regularity index N must be at least 2")
    g = state.grid
    u, v, b, B = state.fields()
    au2 = np.abs(u) ** 2
    av2 = np.abs(v) ** 2
    ab2 = np.abs(b) ** 2
    aB2 = np.abs(B) ** 2
    xi2 = g.kx_mesh**2
    jap2 = 1.0 + g.k2_mesh
    k = np.sqrt(g.k2_mesh)
    inv_k = np.where(k > 0, 1.0 / np.where(k > 0, k, 1.0), 0.0)

    vals = {}
    vals["L2_u"] = _l2(g, np.sum(au2))
    vals["L2_v"] = _l2(g, np.sum(av2))
    vals["L2_b"] = _l2(g, np.sum(ab2))
    vals["L2_B"] = _l2(g, np.sum(aB2))
    vals["L2_uvec"] = _l2(g, np.sum(au2 + av2))
    vals["HN_uvec"] = _l2(g, np.sum(jap2**N * (au2 + av2)))
    vals["HN_bvec"] = _l2(g, np.sum(jap2**N * (ab2 + aB2)))
    vals["L2_dy_u"] = _l2(g, np.sum(g.ky_mesh**2 * au2))
    vals["H2_dx_uvec"] = _l2(g, np.sum(jap2**2 * xi2 * (au2 + av2)))
    vals["FL1_uvec"] = float(np.sum(np.sqrt(au2 + av2)))
    vals["FL1_dx_u"] = float(np.sum(np.abs(g.kx_mesh) * np.abs(u)))
    vals["H1_dx_b"] = _l2(g, np.sum(jap2 * xi2 * ab2))
    jap = np.sqrt(jap2)
    vals["FL1_ninv_jap_b"] = float(np.sum(inv_k * jap * np.abs(b)))
    vals["FL1_R1_jap_b"] = float(np.sum(np.abs(g.kx_mesh) * inv_k * jap * np.abs(b)))
    vals["FL1_B"] = float(np.sum(np.abs(B)))
    vals["L2_dx_B"] = _l2(g, np.sum(xi2 * aB2))
    vals["L2_dx_b"] = _l2(g, np.sum(xi2 * ab2))
    vals["L2_dx_uvec"] = _l2(g, np.sum(xi2 * (au2 + av2)))
    vals["HNm1_dx_bvec"] = _l2(g, np.sum(jap2 ** (N - 1) * xi2 * (ab2 + aB2)))

    for name, coeffs in (("u", u), ("b", b)):
        phys = inverse_transform(state.field(name)).values
        dx = g.Lx / g.nx
        dy = g.Ly / g.ny
        inner_x = np.sqrt(dx * np.sum(phys**2, axis=0))  # L2 in x at each y
        vals[f"L1y_L2x_{name}"] = float(dy * np.sum(inner_x))
        inner_y = np.sqrt(dy * np.sum(phys**2, axis=1))  # L2 in y at each x
        vals[f"L1x_L2y_{name}"] = float(dx * np.sum(inner_y))

    return NormReport(time=float(t), N=int(N), values=vals)


def fit_decay(times, values, window):
    """Least-squares power-law fit log(value) ~ exponent * log<t> on a window.

    Requires at least 8 points inside [t1, t2], all positive values.  A
    constant series fits exponent 0 with r2 reported as 1.
    """
    t1, t2 = float(window[0]), float(window[1])
    if not t1 < t2:
        raise WindowTooSmall("fit window must satisfy t1 < t2")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    sel = (times >= t1) & (times <= t2)
    if int(np.sum(sel)) < 8:
        raise WindowTooSmall("need at least 8 samples inside the fit window")
    tv = times[sel]
    yv = values[sel]
    if np.any(yv <= 0) or not np.all(np.isfinite(yv)):
        raise NonPositiveValue("series must be positive and finite for log fitting")
    x = np.log(np.sqrt(1.0 + tv**2))
    y = np.log(yv)
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(sol[0]), float(sol[1])
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    # constant series leave ss_tot at rounding scale (mean off by ulps),
    # where 1 - ss_res/ss_tot is noise; report the exact-fit value instead
    degenerate = ss_tot <= 1e-24 * max(float(np.sum(y**2)), 1e-300)
    r2 = 1.0 if degenerate else 1.0 - ss_res / ss_tot
    return DecayFit(exponent=slope, intercept=intercept, r2=r2, t1=t1, t2=t2)


def validity_window(grid, t_min=2.0, safety=0.2):
    """Time range where torus decay mimics whole-plane decay.

    Beyond t_max = safety * (L / 2pi)^2 the spectral gap of the lowest
    nonzero mode turns algebraic decay exponential; before t_min the
    transient dominates.
    """
    L = min(grid.Lx, grid.Ly)
    return float(t_min), float(safety * (L / (2.0 * np.pi)) ** 2)
