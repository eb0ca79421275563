"""Compiled phase sweeps over a gap sequence.

A configuration with m atoms is passed as its m + 1 gaps (l_0, ..., l_m)
between consecutive points of {-L/2, x_1, ..., x_m, L/2}.  The Prüfer angle
theta (phi = r sin theta, phi' = r k cos theta) is carried as an integer
branch n and the Riccati variable z = cot(theta - n*pi), with z = +inf for
theta on a multiple of pi.  A delta kick is then z -> z + gamma/k, and free
propagation over a gap is a Möbius rotation of z.
"""

import math

import numba
import numpy as np

PI = math.pi
INV_PI = 1.0 / PI
INF = math.inf

_jit = numba.njit(cache=True, error_model="numpy")


@numba.njit(cache=True, error_model="numpy", inline="always")
def _rotate(n, z, alpha):
    """Advance theta by alpha >= 0."""
    q = math.floor(alpha * INV_PI)
    a = alpha - q * PI
    n += np.int64(q)
    if a > 0.0:
        c = math.cos(a) / math.sin(a)
        if z == INF:
            return n, c
        den = z + c
        if z <= -c:
            n += 1
        if den == 0.0:
            return n, INF
        z = (z * c - 1.0) / den
    return n, z


@_jit
def final_phase(gaps, k, gamma):
    """(branch, z) at the right wall for the solution started at the left wall."""
    g = gamma / k
    n = np.int64(0)
    z = INF
    m = gaps.shape[0] - 1
    for t in range(m):
        n, z = _rotate(n, z, k * gaps[t])
        z += g
    return _rotate(n, z, k * gaps[m])


@_jit
def count_below(gaps, energy, gamma):
    """Number of Dirichlet eigenvalues strictly below ``energy``."""
    if energy <= 0.0:
        return np.int64(0)
    n, z = final_phase(gaps, math.sqrt(energy), gamma)
    if z == INF:
        return n - 1
    return n


@_jit
def count_below_many(gaps, energies, gamma):
    out = np.zeros(energies.shape[0], dtype=np.int64)
    for i in range(energies.shape[0]):
        out[i] = count_below(gaps, energies[i], gamma)
    return out


@_jit
def log_amplitudes(gaps, k, gamma):
    """log r inside every gap for the solution started at the left wall.

    r^2 = phi^2 + (phi'/k)^2 is constant on free intervals and is multiplied
    by (1 + (z + g)^2) / (1 + z^2) at a kick.
    """
    g = gamma / k
    m = gaps.shape[0] - 1
    out = np.zeros(m + 1)
    n = np.int64(0)
    z = INF
    shift = 0.0
    r2 = 1.0
    for t in range(m):
        out[t] = 0.5 * math.log(r2) + shift
        n, z = _rotate(n, z, k * gaps[t])
        zn = z + g
        if abs(z) < 1e150:
            r2 *= (1.0 + zn * zn) / (1.0 + z * z)
            if r2 > 1e200:
                shift += 0.5 * math.log(r2)
                r2 = 1.0
        z = zn
    out[m] = 0.5 * math.log(r2) + shift
    return out


@_jit
def phase_to_midgap(gaps, k, gamma, stop):
    """Angle at the middle of gap ``stop`` and its derivative in energy.

    Returns (branch, z, dtheta/dE).
    """
    g = gamma / k
    dk = 0.5 / k
    dg = -gamma / (2.0 * k * k * k)
    n = np.int64(0)
    z = INF
    d = 0.0
    for t in range(stop):
        n, z = _rotate(n, z, k * gaps[t])
        d += gaps[t] * dk
        zn = z + g
        if abs(z) < 1e150:
            w = 1.0 + zn * zn
            d = d * (1.0 + z * z) / w - dg / w
        z = zn
    half = 0.5 * gaps[stop]
    n, z = _rotate(n, z, k * half)
    d += half * dk
    return n, z, d


@_jit
def matching_phase(gaps, rgaps, energy, gamma, stop):
    """Sum of the left and mirrored right angles at the middle of gap ``stop``.

    ``rgaps`` is ``gaps[::-1]``.  The sum F(E) is continuous and strictly
    increasing in E, and the j-th eigenvalue solves F(E) = j*pi.  Returns
    (branch, fraction, dF/dE) with F = branch*pi + fraction and fraction in
    [0, 2*pi), so F - j*pi can be formed without cancellation.
    """
    k = math.sqrt(energy)
    m = gaps.shape[0] - 1
    nl, zl, dl = phase_to_midgap(gaps, k, gamma, stop)
    nr, zr, dr = phase_to_midgap(rgaps, k, gamma, m - stop)
    return nl + nr, math.atan2(1.0, zl) + math.atan2(1.0, zr), dl + dr


@_jit
def phase_split(gaps, k_lo, k_hi, gamma):
    """First gap where the angles at two energies differ by more than pi/2.

    When one level lies between the energies, the extra node of the upper
    solution appears where that level's state is concentrated.
    """
    g_lo = gamma / k_lo
    g_hi = gamma / k_hi
    n_lo = np.int64(0)
    n_hi = np.int64(0)
    z_lo = INF
    z_hi = INF
    m = gaps.shape[0] - 1
    for t in range(m + 1):
        n_lo, z_lo = _rotate(n_lo, z_lo, k_lo * gaps[t])
        n_hi, z_hi = _rotate(n_hi, z_hi, k_hi * gaps[t])
        diff = (n_hi - n_lo) * PI + math.atan2(1.0, z_hi) - math.atan2(1.0, z_lo)
        if diff > 0.5 * PI:
            return t
        if t < m:
            z_lo += g_lo
            z_hi += g_hi
    return m
