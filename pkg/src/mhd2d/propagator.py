"""Exact solution operator of the linearized system, frequency by frequency.

At wavenumber (a, e) the linearization couples the pair (u, b) (and
likewise (v, B)) through the matrix

    A = [[-|k|^2, -i a],
         [-i a,       0]],   |k|^2 = a^2 + e^2,

whose exponential has entries built from three scalar multipliers:

    e^{tA} = [[M3, M1],
              [M1, M2]].

With m = -|k|^2 / 2 and delta = sqrt(|k|^4 - 4 a^2) / 2 (complex sqrt),
the eigenvalues are m +/- delta and

    C = e^{mt} cosh(delta t),  S = e^{mt} sinh(delta t) / delta,
    M1 = -i a S,  M2 = C - m S,  M3 = C + m S.

S has a removable singularity at delta = 0 (S -> t e^{mt}); evaluation
switches between a Taylor branch, direct cosh/sinh, and a factored
exponential branch to stay accurate and overflow-free for all |k| and t
(both eigenvalues have non-positive real part, so every exponential here
is bounded by 1).
"""

import numpy as np

from .errors import NegativeTime
from .spectral import StateSpectral

# Regime codes for the discriminant |k|^4 - 4 a^2.
REAL_BRANCH = 1
DEGENERATE = 0
COMPLEX_BRANCH = -1
REGIME_NAMES = {REAL_BRANCH: "real", DEGENERATE: "degenerate", COMPLEX_BRANCH: "complex"}

# Relative discriminant threshold below which the eigenvalues are treated
# as a double root.
DEGENERACY_RTOL = 1e-12

# |delta t| thresholds separating the evaluation branches.
_SMALL_Z = 1e-3
_BIG_Z = 200.0
# Below this m*t the prefactor e^{mt} underflows (or goes subnormal) even
# though slow-mode multipliers ~ e^{(m+delta)t} may still be representable;
# such points use the factored branch, which never forms e^{mt} alone.
_LOG_TINY = -700.0


def eigenvalues(kx, ky):
    """Eigenvalues (lam_plus, lam_minus) of A and the regime classification.

    Returns arrays broadcast like the inputs; regime is +1 where the
    discriminant is safely positive (two real eigenvalues), -1 where it is
    safely negative (conjugate pair), 0 within DEGENERACY_RTOL * |k|^4 of
    the double root.
    """
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    k2 = kx**2 + ky**2
    disc = k2**2 - 4.0 * kx**2
    delta = 0.5 * np.sqrt(disc.astype(complex))
    m = -0.5 * k2
    tau = DEGENERACY_RTOL * k2**2
    regime = np.where(disc > tau, REAL_BRANCH, np.where(disc < -tau, COMPLEX_BRANCH, DEGENERATE))
    return m + delta, m - delta, regime


def multipliers(kx, ky, t):
    """Evaluate (M1, M2, M3) for wavenumbers and times t >= 0 (broadcast).

    Branches on z = delta * t and the discriminant sign:
      |z| < 1e-3     Taylor series of cosh z and sinh(z)/z (degenerate-safe);
      real pair      cosh/sinh scaled by e^{mt} for C, S (positive sums),
                     M3 through a cancellation-free factored form, and fully
                     factored exponentials once |z| >= 200 (cosh overflows
                     even though every multiplier stays bounded);
      complex pair   direct cosh/sinh (bounded oscillation at any |z|).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("propagator time must be nonnegative")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    kx, ky, t = np.broadcast_arrays(kx, ky, t)
    shape = kx.shape
    kx = kx.ravel()
    ky = ky.ravel()
    t = t.ravel()
    k2 = kx**2 + ky**2
    m = -0.5 * k2
    disc = k2**2 - 4.0 * kx**2
    delta = 0.5 * np.sqrt(disc.astype(complex))
    z = delta * t
    az = np.abs(z)

    C = np.empty(z.shape, dtype=complex)
    S = np.empty(z.shape, dtype=complex)
    M3 = np.empty(z.shape, dtype=complex)
    emt = np.exp(m * t)

    small = az < _SMALL_Z
    # Two real eigenvalues: cosh/sinh are fine for C and S (all-positive
    # combinations), but M3 = C + m S cancels catastrophically when the
    # slow mode dominates, so it gets a factored form with the exact
    # rewrite delta + m = -a^2 / (delta - m) (no subtraction of like
    # magnitudes).  Above _BIG_Z, or once e^{mt} itself degrades, the
    # exponentials are factored throughout to dodge cosh overflow and
    # prefactor underflow.  Complex-pair points are bounded oscillations
    # for any |z|, so the direct form serves at every size.
    factored = (az >= _BIG_Z) | (m * t < _LOG_TINY)
    rmid = ~small & (disc > 0) & ~factored
    rbig = ~small & (disc > 0) & factored
    osc = ~small & (disc <= 0)

    if small.any():
        z2 = z[small] ** 2
        C[small] = emt[small] * (1.0 + z2 / 2.0 + z2**2 / 24.0 + z2**3 / 720.0)
        S[small] = t[small] * emt[small] * (1.0 + z2 / 6.0 + z2**2 / 120.0 + z2**3 / 5040.0)
        M3[small] = C[small] + m[small] * S[small]
    if rmid.any():
        d = delta[rmid].real
        zr = z[rmid].real
        w = kx[rmid] ** 2 / (d - m[rmid])
        C[rmid] = emt[rmid] * np.cosh(zr)
        S[rmid] = emt[rmid] * np.sinh(zr) / d
        M3[rmid] = emt[rmid] * (np.exp(-zr) * (d - m[rmid]) - np.exp(zr) * w) / (2.0 * d)
    if rbig.any():
        d = delta[rbig].real
        tb = t[rbig]
        w = kx[rbig] ** 2 / (d - m[rbig])
        ep = np.exp((m[rbig] + d) * tb)
        em = np.exp((m[rbig] - d) * tb)
        C[rbig] = 0.5 * (ep + em)
        S[rbig] = (ep - em) / (2.0 * d)
        M3[rbig] = (em * (d - m[rbig]) - ep * w) / (2.0 * d)
    if osc.any():
        C[osc] = emt[osc] * np.cosh(z[osc])
        S[osc] = emt[osc] * np.sinh(z[osc]) / delta[osc]
        M3[osc] = C[osc] + m[osc] * S[osc]

    M1 = -1j * kx * S
    M2 = C - m * S
    return M1.reshape(shape), M2.reshape(shape), M3.reshape(shape)


def multiplier_meshes(grid, t, half=False):
    """(M1, M2, M3) evaluated on a grid's full or half wavenumber mesh."""
    if half:
        kx = grid.kx[:, None]
        ky = grid.ky_half[None, :]
    else:
        kx = grid.kx_mesh
        ky = grid.ky_mesh
    return multipliers(kx, ky, t)


def matrix_exponential_oracle_batch(kx, ky, t):
    """Dense e^{tA} by scaling-and-squaring Taylor, batched over points.

    Deliberately shares no code with :func:`multipliers`; used as the
    independent reference in tests and the verification commands.
    Accepts arrays (kx, ky, t broadcast together); returns (..., 2, 2).
    """
    kx, ky, t = np.broadcast_arrays(
        np.asarray(kx, dtype=float), np.asarray(ky, dtype=float), np.asarray(t, dtype=float)
    )
    shape = kx.shape
    kx = kx.ravel()
    ky = ky.ravel()
    t = t.ravel()
    n = kx.size
    At = np.zeros((n, 2, 2), dtype=complex)
    At[:, 0, 0] = -(kx**2 + ky**2) * t
    At[:, 0, 1] = -1j * kx * t
    At[:, 1, 0] = -1j * kx * t
    nrm = np.max(np.abs(At), axis=(1, 2))
    s = np.zeros(n, dtype=int)
    pos = nrm > 0
    s[pos] = np.maximum(0, np.ceil(np.log2(nrm[pos])).astype(int) + 1)
    T = At / (2.0 ** s)[:, None, None]
    E = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    term = E.copy()
    # 25 Taylor terms reach double precision for the scaled norm <= 1/2.
    for j in range(1, 26):
        term = np.matmul(term, T) / j
        E = E + term
    for step_i in range(int(s.max()) if n else 0):
        sq = np.matmul(E, E)
        grow = step_i < s
        E[grow] = sq[grow]
    return E.reshape(shape + (2, 2))


def matrix_exponential_oracle(kx, ky, t):
    """Dense e^{tA} at one wavenumber (2x2 array); see the batch variant."""
    return matrix_exponential_oracle_batch(kx, ky, t)


def apply_semigroup(state, t):
    """Propagate a spectral state by the exact linear flow e^{tA}.

    Mixes (u, b) and (v, B) pairs per frequency; incompressibility is
    preserved exactly because both components of each vector see the same
    multipliers.
    """
    if t < 0:
        raise NegativeTime("propagator time must be nonnegative")
    g = state.grid
    M1, M2, M3 = multiplier_meshes(g, t)
    u, v, b, B = state.fields()
    return StateSpectral(
        g,
        M3 * u + M1 * b,
        M3 * v + M1 * B,
        M1 * u + M2 * b,
        M1 * v + M2 * B,
    )


def identity_residuals(kx, ky, t, h):
    """Residuals of the exact derivative relations of the multipliers.

    d/dt M2 = symbol(d/dx) * M1 and d/dt M1 = symbol(d/dx) * M3 with
    symbol(d/dx) = -i a; time derivatives are centered differences with
    step h, so the residuals decay like h^2.  Requires t >= h > 0.
    """
    if h <= 0:
        raise ValueError("difference step must be positive")
    if np.any(np.asarray(t) - h < 0):
        raise NegativeTime("centered difference needs t >= h")
    kx = np.asarray(kx, dtype=float)
    M1p, M2p, _ = multipliers(kx, ky, t + h)
    M1m, M2m, _ = multipliers(kx, ky, t - h)
    M1c, _, M3c = multipliers(kx, ky, t)
    dM2 = (M2p - M2m) / (2.0 * h)
    dM1 = (M1p - M1m) / (2.0 * h)
    r1 = np.abs(dM2 + 1j * kx * M1c)
    r2 = np.abs(dM1 + 1j * kx * M3c)
    return r1, r2
