"""Exact Dirichlet spectrum of -d^2/dx^2 + gamma * sum_j delta(x - x_j).

Eigenvalues are counted by Sturm oscillation: the Prüfer angle of the
solution started at the left wall, evaluated at the right wall, has
``theta / pi`` crossings equal to the number of levels below E.  Levels
are isolated by bisection on that count and then refined with a safeguarded
Newton iteration on a two-sided matching phase, which is well conditioned
when the matching point sits where the eigenfunction lives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError, ResourceCapError
from .sampler import ImpurityConfiguration

DEFAULT_LEVEL_CAP = 10**7
# sub-boxes of 2 * WINDOW_START + 1 gaps and up (x8 per retry) are tried
# while they stay below WINDOW_FRACTION of the box
WINDOW_START = 48
WINDOW_FRACTION = 0.5


def _tolerance(energy):
    return max(1e-12, 1e-10 * energy)


# ---------------------------------------------------------------------------
# phase bookkeeping (reference implementation; the sweeps live in _kernels)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseState:
    """Scaled Prüfer angle with its branch index floor(theta / pi)."""

    theta: float
    branch: int

    @classmethod
    def at(cls, theta: float) -> "PhaseState":
        return cls(float(theta), int(math.floor(theta / math.pi)))

    @property
    def local(self) -> float:
        """Angle within the current branch, in [0, pi)."""
        return self.theta - self.branch * math.pi


def propagate_phase_interval(state: PhaseState, k: float, ell: float) -> PhaseState:
    """Free rotation over a gap of length ``ell``: theta increases by k * ell."""
    if k <= 0 or ell < 0:
        raise ParameterError("need k > 0 and ell >= 0")
    alpha = k * ell
    crossed = math.floor((state.local + alpha) / math.pi)
    return PhaseState(state.theta + alpha, state.branch + int(crossed))


def apply_delta_kick(state: PhaseState, k: float, gamma: float) -> PhaseState:
    """Derivative jump phi'(x+) - phi'(x-) = gamma * phi(x) at an atom.

    In the angle this is cot(theta) -> cot(theta) + gamma / k inside the same
    branch; a node at the atom is left untouched.
    """
    if k <= 0 or gamma <= 0:
        raise ParameterError("need k > 0 and gamma > 0")
    psi = state.local
    if psi == 0.0:
        return state
    s = math.sin(psi)
    new = math.atan2(s, math.cos(psi) + (gamma / k) * s)
    return PhaseState(state.branch * math.pi + new, state.branch)


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _gaps(config: ImpurityConfiguration) -> np.ndarray:
    return np.ascontiguousarray(config.gaps, dtype=float)


def count_eigenvalues_below(config: ImpurityConfiguration, gamma: float, energy: float) -> int:
    """|{j : E_j < energy}|."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    return int(_kernels.count_below(_gaps(config), float(energy), float(gamma)))


def count_profile(config: ImpurityConfiguration, gamma: float, energies) -> np.ndarray:
    """Counts at several energies (one full sweep per energy)."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    energies = np.ascontiguousarray(energies, dtype=float)
    return _kernels.count_below_many(_gaps(config), energies, float(gamma))


# ---------------------------------------------------------------------------
# closed-form oracles
# ---------------------------------------------------------------------------

def free_spectrum_oracle(length: float, count: int) -> np.ndarray:
    """Dirichlet Laplacian levels (j pi / L)^2, j = 1..count."""
    j = np.arange(1, int(count) + 1, dtype=float)
    return (j * math.pi / length) ** 2


def _dirichlet_count(gaps, energy):
    # levels <= energy of the decoupled Dirichlet intervals
    return int(np.floor(gaps * math.sqrt(energy) / math.pi).sum())


def _dirichlet_threshold(gaps, count):
    """Smallest energy (up to bisection) with at least ``count`` decoupled levels."""
    hi = (count * math.pi / gaps.max()) ** 2
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _dirichlet_count(gaps, mid) >= count:
            hi = mid
        else:
            lo = mid
    return hi


def dirichlet_union_oracle(config: ImpurityConfiguration, count: int) -> np.ndarray:
    """Lowest ``count`` levels of the decoupled intervals (infinite-gamma model)."""
    if count < 1:
        raise ParameterError("count must be >= 1")
    gaps = _gaps(config)
    gaps = gaps[gaps > 0]
    top = _dirichlet_threshold(gaps, count) * (1 + 1e-12)
    per_gap = np.floor(gaps * math.sqrt(top) / math.pi).astype(np.int64)
    owner = np.repeat(gaps, per_gap)
    # k = 1..per_gap for each gap
    starts = np.cumsum(per_gap) - per_gap
    k = np.arange(per_gap.sum()) - np.repeat(starts, per_gap) + 1
    levels = np.sort((k * math.pi / owner) ** 2)
    return levels[:count]


def single_delta_oracle(length: float, gamma: float, count: int) -> np.ndarray:
    """Levels for one atom at the centre of (-L/2, L/2).

    Odd states (2 n pi / L)^2 do not feel the atom.  Even states solve
    tan(k L / 2) = -2 k / gamma with k L / 2 in ((n - 1/2) pi, n pi).
    """
    levels = []
    n = 1
    while len(levels) < count:
        a = (n - 0.5) * math.pi * 2.0 / length
        b = n * math.pi * 2.0 / length

        def h(k):
            return gamma * math.sin(0.5 * k * length) + 2.0 * k * math.cos(0.5 * k * length)

        ha = h(a)
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            hm = h(mid)
            if hm == 0.0:
                a = b = mid
                break
            if (hm > 0) == (ha > 0):
                a, ha = mid, hm
            else:
                b = mid
        levels.append((0.5 * (a + b)) ** 2)
        levels.append((2.0 * n * math.pi / length) ** 2)
        n += 1
    return np.array(levels[:count])


# ---------------------------------------------------------------------------
# eigenvalue extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted eigenvalues of one realization.

    Every level strictly below ``energy_cutoff`` is listed when
    ``complete_below_cutoff`` is true.  Optionally the count function is also
    known on ``grid`` (energies >= cutoff, ``grid_counts[i]`` levels strictly
    below ``grid[i]``), which thermodynamic sums use above the cutoff.
    """

    eigenvalues: np.ndarray
    energy_cutoff: float
    complete_below_cutoff: bool
    box_length: float
    grid: np.ndarray | None = None
    grid_counts: np.ndarray | None = None

    def __len__(self):
        return self.eigenvalues.size

    @property
    def coverage(self) -> float:
        """Energy up to which the level count is known exactly."""
        if self.grid is not None and self.grid.size:
            return float(self.grid[-1])
        return float(self.energy_cutoff)

    @property
    def count_at_coverage(self) -> int:
        if self.grid is not None and self.grid.size:
            return int(self.grid_counts[-1])
        return int(self.eigenvalues.size)


class _Samples:
    """Monotone table of (energy, count) pairs shared by all target levels."""

    def __init__(self, gaps, gamma):
        self.gaps = gaps
        self.gamma = gamma
        self.energies = np.array([0.0])
        self.counts = np.array([0], dtype=np.int64)

    def add(self, energies):
        energies = np.unique(np.asarray(energies, dtype=float))
        counts = _kernels.count_below_many(self.gaps, energies, self.gamma)
        e = np.concatenate((self.energies, energies))
        c = np.concatenate((self.counts, counts))
        order = np.argsort(e, kind="stable")
        self.energies = e[order]
        self.counts = np.maximum.accumulate(c[order])
        return counts

    def brackets(self, js):
        idx = np.searchsorted(self.counts, js, side="left")
        return (self.energies[idx - 1], self.energies[idx],
                self.counts[idx - 1], self.counts[idx])


def _upper_energy(gaps, gamma, j_max, samples):
    top = _dirichlet_threshold(gaps, j_max) * (1 + 1e-9) + 1e-300
    while samples.add([top])[0] < j_max:
        top *= 2.0
    return top


def _amplitude_profile(gaps, rgaps, energy, gamma):
    k = math.sqrt(energy)
    left = _kernels.log_amplitudes(gaps, k, gamma)
    right = _kernels.log_amplitudes(rgaps, k, gamma)[::-1]
    return left, right


def _matching_gap(gaps, rgaps, energy, gamma):
    left, right = _amplitude_profile(gaps, rgaps, energy, gamma)
    return int(np.argmax(left + right))


def _newton(gaps, rgaps, gamma, j, lo, hi, stop, tol_scale=1.0, energy=None):
    """Safeguarded Newton on the matching phase F(E) - j pi over [lo, hi]."""
    tol = tol_scale * _tolerance(lo)
    if hi - lo <= tol:
        return lo, hi
    if energy is None:
        energy = 0.5 * (lo + hi)
    last_width = hi - lo
    since_restart = 0
    for _ in range(400):
        n, frac, slope = _kernels.matching_phase(gaps, rgaps, energy, gamma, stop)
        g = (n - j) * math.pi + frac
        if g < 0:
            lo = energy
        elif g > 0:
            hi = energy
        else:
            return energy, energy
        tol = tol_scale * _tolerance(lo)
        if hi - lo <= tol:
            break
        step = -g / slope if slope > 0 else math.inf
        candidate = energy + step
        if abs(step) < 0.5 * tol:
            # converged from one side; probe just across the root
            candidate = energy + math.copysign(0.25 * tol, step) + step
        since_restart += 1
        if not (lo < candidate < hi) or (since_restart > 3 and hi - lo > 0.5 * last_width):
            candidate = 0.5 * (lo + hi)
            last_width = hi - lo
            since_restart = 0
        if since_restart == 0 and hi - lo < 1e-3 * last_width:
            stop = _matching_gap(gaps, rgaps, candidate, gamma)
        energy = candidate
    return lo, hi


def _refine_windowed(gaps, gamma, j, lo, hi, a, b, stop):
    """Refine on the sub-box of gaps a..b, then check the result globally.

    Returns None when the sub-box does not hold exactly one level in the
    bracket or the result fails the global count check.
    """
    sub = np.ascontiguousarray(gaps[a:b + 1])
    rsub = np.ascontiguousarray(sub[::-1])
    local = stop - a
    n_lo, f_lo, _ = _kernels.matching_phase(sub, rsub, lo, gamma, local)
    n_hi, f_hi, _ = _kernels.matching_phase(sub, rsub, hi, gamma, local)
    first = math.floor((n_lo * math.pi + f_lo) / math.pi) + 1
    last = math.ceil((n_hi * math.pi + f_hi) / math.pi) - 1
    if first != last:
        return None
    lo2, hi2 = _newton(sub, rsub, gamma, first, lo, hi, local, tol_scale=0.5)
    pad = 0.25 * _tolerance(lo2)
    lo2, hi2 = max(lo, lo2 - pad), min(hi, hi2 + pad)
    counts = _kernels.count_below_many(gaps, np.array([lo2, hi2]), gamma)
    if counts[0] != j - 1 or counts[1] != j:
        return None
    return lo2, hi2


def _refine(gaps, rgaps, gamma, j, lo, hi):
    """Shrink an isolating bracket of level j to the target width.

    The level's state is located from where the angles at lo and hi split;
    growing sub-boxes around that gap are tried before the matching phase
    over the whole box.  Every sub-box result is certified by global counts.
    """
    if hi - lo <= _tolerance(lo):
        return lo, hi
    m = gaps.size - 1
    centre = int(_kernels.phase_split(gaps, math.sqrt(lo), math.sqrt(hi), gamma))
    half = WINDOW_START
    k = math.sqrt(0.5 * (lo + hi))
    while 2 * half + 1 <= WINDOW_FRACTION * gaps.size:
        a, b = max(0, centre - half), min(m, centre + half)
        sub = np.ascontiguousarray(gaps[a:b + 1])
        left = _kernels.log_amplitudes(sub, k, gamma)
        right = _kernels.log_amplitudes(np.ascontiguousarray(sub[::-1]), k, gamma)[::-1]
        stop = a + int(np.argmax(left + right))
        found = _refine_windowed(gaps, gamma, j, lo, hi, a, b, stop)
        if found is not None:
            return found
        half *= 8
    return _newton(gaps, rgaps, gamma, j, lo, hi, _matching_gap(gaps, rgaps, 0.5 * (lo + hi), gamma))


def _levels(config, gamma, js, upper=None):
    """Eigenvalues E_j for the sorted 1-based indices ``js``.

    Returns (values, lower brackets, upper brackets).
    """
    gaps = _gaps(config)
    rgaps = np.ascontiguousarray(gaps[::-1])
    js = np.asarray(js, dtype=np.int64)
    samples = _Samples(gaps, float(gamma))
    if upper is None:
        _upper_energy(gaps, float(gamma), int(js.max()), samples)
    else:
        samples.add([upper])
    while True:
        lo, hi, clo, chi = samples.brackets(js)
        width_ok = (hi - lo) <= np.maximum(1e-12, 1e-10 * lo)
        isolated = (clo == js - 1) & (chi == js)
        todo = ~(isolated | width_ok)
        if not todo.any():
            break
        samples.add(0.5 * (lo[todo] + hi[todo]))
    out_lo = lo.copy()
    out_hi = hi.copy()
    for i, j in enumerate(js):
        if isolated[i] and not width_ok[i]:
            out_lo[i], out_hi[i] = _refine(gaps, rgaps, float(gamma), int(j), lo[i], hi[i])
    return 0.5 * (out_lo + out_hi), out_lo, out_hi


def eigenvalue_indices(config: ImpurityConfiguration, gamma: float, indices) -> np.ndarray:
    """E_j for selected 1-based level indices, without computing the others."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        return np.zeros(0)
    if indices.min() < 1:
        raise ParameterError("level indices start at 1")
    uniq, inverse = np.unique(indices, return_inverse=True)
    values, _, _ = _levels(config, gamma, uniq)
    return values[inverse]


def eigenvalues(config: ImpurityConfiguration, gamma: float, n_levels: int | None = None,
                energy_cutoff: float | None = None,
                level_cap: int = DEFAULT_LEVEL_CAP) -> Spectrum:
    """First ``n_levels`` levels, or all levels below ``energy_cutoff``."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    if (n_levels is None) == (energy_cutoff is None):
        raise ParameterError("give exactly one of n_levels and energy_cutoff")
    if energy_cutoff is not None:
        if energy_cutoff <= 0:
            raise ParameterError("energy_cutoff must be positive")
        total = count_eigenvalues_below(config, gamma, energy_cutoff)
        if total > level_cap:
            raise ResourceCapError(f"{total} levels below {energy_cutoff} exceed the cap {level_cap}")
        if total == 0:
            return Spectrum(np.zeros(0), float(energy_cutoff), True, config.box_length)
        values, _, _ = _levels(config, gamma, np.arange(1, total + 1), upper=energy_cutoff)
        return Spectrum(values, float(energy_cutoff), True, config.box_length)
    if n_levels < 1:
        raise ParameterError("n_levels must be >= 1")
    if n_levels > level_cap:
        raise ResourceCapError(f"{n_levels} levels exceed the cap {level_cap}")
    values, _, hi = _levels(config, gamma, np.arange(1, n_levels + 1))
    # the refined bracket edge can sit within rounding of E_J; step outward
    # until the count confirms that nothing is missing
    offset = _tolerance(hi[-1])
    complete = False
    for _ in range(8):
        cutoff = float(hi[-1] + offset)
        found = count_eigenvalues_below(config, gamma, cutoff)
        if found == n_levels:
            complete = True
            break
        if found > n_levels:
            break
        offset *= 4.0
    return Spectrum(values, cutoff, complete, config.box_length)
