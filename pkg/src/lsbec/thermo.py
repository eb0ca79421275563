"""Grand-canonical ideal Bose gas on one realization's spectrum.

Level sums sum_j f(E_j) for decreasing f are split into three parts:

* exact levels below ``spectrum.energy_cutoff``;
* grid cells above the cutoff, where only the count function is known.
  A cell holding dC levels in [e_i, e_{i+1}) contributes dC times a Simpson
  average s of f.  The true contribution lies between dC f(e_{i+1}) and
  dC f(e_i), so the error is at most dC max(f(e_i) - s, s - f(e_{i+1}));
* levels above the last grid energy, bounded with the free levels
  (j pi / L)^2 <= E_j.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import DomainError, InsufficientSpectrumError, ParameterError
from .sampler import ImpurityConfiguration
from .spectrum import Spectrum, count_eigenvalues_below, count_profile, eigenvalues

SUM_RULE_TOL = 1e-10
TAIL_TOL = 1e-10


def bose(energy, beta):
    """(exp(beta E) - 1)^-1 for E > 0 and 0 otherwise."""
    if beta <= 0:
        raise ParameterError("beta must be positive")
    e = np.asarray(energy, dtype=float)
    x = beta * e
    out = np.zeros_like(x)
    pos = x > 0
    small = pos & (x < 1e-8)
    big = pos & ~small
    out[big] = 1.0 / np.expm1(x[big])
    xs = x[small]
    out[small] = 1.0 / xs - 0.5 + xs / 12.0
    if np.ndim(energy) == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# level sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSum:
    exact: float
    cells: float
    cells_bound: float  # half-width of the rigorous interval for ``cells``
    tail_bound: float

    @property
    def value(self) -> float:
        return self.exact + self.cells + self.tail_bound

    @property
    def error(self) -> float:
        return self.cells_bound + self.tail_bound


def _cells(spectrum: Spectrum, f):
    if spectrum.grid is None or spectrum.grid.size < 2:
        return 0.0, 0.0
    e = spectrum.grid
    dc = np.diff(spectrum.grid_counts).astype(float)
    keep = dc > 0
    a, b, dc = e[:-1][keep], e[1:][keep], dc[keep]
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    s = (fa + 4.0 * fm + fb) / 6.0
    return float(np.sum(dc * s)), float(np.sum(dc * np.maximum(fa - s, s - fb)))


def _free_tail(spectrum: Spectrum, beta: float, mu: float) -> float:
    """Bound on sum of B(E_j - mu) over levels above the covered range.

    B(y) <= exp(-beta y) / (1 - exp(-beta y_min)) for y >= y_min.
    """
    y_min = spectrum.coverage - mu
    if y_min <= 0:
        return math.inf
    return math.exp(beta * mu) * _exp_tail(spectrum, beta) / (-math.expm1(-beta * y_min))


def _exp_tail(spectrum: Spectrum, beta: float) -> float:
    """Bound on sum of exp(-beta E_j) over levels above the covered range.

    Every level j above the count known at E_top satisfies
    E_j >= max(E_top, (j pi / L)^2).
    """
    top = spectrum.coverage
    known = spectrum.count_at_coverage
    length = spectrum.box_length
    free_below = max(0, math.ceil(length * math.sqrt(top) / math.pi) - 1)
    flat = max(0, free_below - known) * math.exp(-beta * top)
    q0 = max(free_below, known) * math.pi / length
    return flat + (length / math.pi) * 0.5 * math.sqrt(math.pi / beta) * erfc(math.sqrt(beta) * q0)


def bose_level_sum(spectrum: Spectrum, beta: float, mu: float) -> LevelSum:
    """sum_j B(E_j - mu) split into exact, grid and tail parts."""
    exact = float(np.sum(bose(spectrum.eigenvalues - mu, beta)))

    def f(e):
        return bose(e - mu, beta)

    cells, bound = _cells(spectrum, f)
    return LevelSum(exact, cells, bound, _free_tail(spectrum, beta, mu))


# ---------------------------------------------------------------------------
# chemical potential and occupations
# ---------------------------------------------------------------------------

def _check_spectrum(spectrum: Spectrum):
    if len(spectrum) == 0:
        raise InsufficientSpectrumError("spectrum has no levels")
    if not spectrum.complete_below_cutoff:
        raise InsufficientSpectrumError("spectrum is not complete below its cutoff")


def solve_chemical_potential(spectrum: Spectrum, beta: float, particle_number: float,
                             box_length: float | None = None) -> float:
    """Unique mu < E_1 with sum_j B(E_j - mu) + tail(mu) = N.

    Bisection on d = E_1 - mu in log scale; the modeled sum is strictly
    decreasing in d.
    """
    if beta <= 0:
        raise ParameterError("beta must be positive")
    if particle_number <= 0:
        raise ParameterError("particle_number must be positive")
    if box_length is not None and not math.isclose(box_length, spectrum.box_length):
        raise ParameterError("box_length does not match the spectrum")
    _check_spectrum(spectrum)
    n = float(particle_number)
    levels = spectrum.eigenvalues
    e1 = float(levels[0])
    if _free_tail(spectrum, beta, e1) > TAIL_TOL * n:
        raise InsufficientSpectrumError(
            f"levels above {spectrum.coverage:.6g} are not bounded to {TAIL_TOL:g} N")
    rel = levels - e1
    if spectrum.grid is not None and spectrum.grid.size > 1:
        grid_rel = spectrum.grid - e1
        dc = np.diff(spectrum.grid_counts).astype(float)
        keep = dc > 0
        ga, gb, dc = grid_rel[:-1][keep], grid_rel[1:][keep], dc[keep]
    else:
        ga = gb = dc = np.zeros(0)

    def total(d):
        s = float(np.sum(bose(rel + d, beta)))
        if dc.size:
            fa, fb, fm = bose(ga + d, beta), bose(gb + d, beta), bose(0.5 * (ga + gb) + d, beta)
            s += float(np.sum(dc * (fa + 4.0 * fm + fb) / 6.0))
        return s + _free_tail(spectrum, beta, e1 - d)

    lo = math.log1p(1.0 / n) / beta  # ground level alone holds N
    hi = max(2.0 * lo, 1.0 / beta)
    while total(hi) >= n:
        hi *= 2.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        s = total(mid)
        if abs(s - n) <= 1e-13 * n:
            lo = hi = mid
            break
        if s > n:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.spacing(hi):
            break
    d = math.sqrt(lo * hi)
    mu = e1 - d
    if mu >= e1:
        mu = float(np.nextafter(e1, -math.inf))
    return mu


def occupations(spectrum, mu: float, beta: float) -> np.ndarray:
    """n_j = B(E_j - mu) for the listed levels."""
    levels = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else np.asarray(spectrum, float)
    if levels.size and mu >= levels[0]:
        raise DomainError(f"mu = {mu!r} is not below the ground level {levels[0]!r}")
    return bose(levels - mu, beta)


def condensate_profile(spectrum, occ, particle_number: float, epsilons, levels=()) -> dict:
    """Fraction (1/N) sum_{E_j - E_1 <= eps} n_j for each eps.

    Only listed levels enter, so eps should stay below
    ``spectrum.energy_cutoff - E_1``.  Returns {"profile": {eps: fraction},
    "ground": n_1/N, "levels": {j: n_j/N}}.
    """
    energies = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else np.asarray(spectrum, float)
    occ = np.asarray(occ, dtype=float)
    n = float(particle_number)
    rel = energies - energies[0]
    cum = np.cumsum(occ)
    profile = {}
    for eps in epsilons:
        if eps < 0:
            raise ParameterError("epsilons must be nonnegative")
        idx = int(np.searchsorted(rel, eps, side="right"))
        profile[float(eps)] = float(cum[idx - 1] / n) if idx else 0.0
    chosen = {int(j): float(occ[j - 1] / n) for j in levels if 1 <= j <= occ.size}
    return {"profile": profile, "ground": float(occ[0] / n), "levels": chosen}


def window_occupation(spectrum: Spectrum, beta: float, mu: float, width: float) -> float:
    """Mean number of particles in levels with E_j - E_1 <= width.

    Listed levels count exactly.  Above the exact cutoff the grid cells are
    used, a straddling cell contributing in proportion to its overlap.
    """
    levels = spectrum.eigenvalues
    upper = float(levels[0]) + width
    total = float(np.sum(bose(levels[levels <= upper] - mu, beta)))
    if upper < spectrum.energy_cutoff or spectrum.grid is None or spectrum.grid.size < 2:
        return total
    e = spectrum.grid
    dc = np.diff(spectrum.grid_counts).astype(float)
    for a, b, n in zip(e[:-1], e[1:], dc):
        if a >= upper:
            break
        if n == 0:
            continue
        hi = min(b, upper)
        mid = 0.5 * (a + hi)
        avg = (bose(a - mu, beta) + 4.0 * bose(mid - mu, beta) + bose(hi - mu, beta)) / 6.0
        total += n * (hi - a) / (b - a) * float(avg)
    return total


def default_epsilons(ground_energy: float) -> list:
    """Geometric window widths 1e-4 ... 1 times the ground energy."""
    return [float(ground_energy * f) for f in np.geomspace(1e-4, 1.0, 9)]


@dataclass(frozen=True)
class HeatTrace:
    value: float
    error: float


def heat_trace(spectrum: Spectrum, beta: float, box_length: float | None = None) -> HeatTrace:
    """L^-1 sum_j exp(-beta E_j); the free-level tail bound goes into ``error``."""
    if beta <= 0:
        raise ParameterError("beta must be positive")
    if box_length is not None and not math.isclose(box_length, spectrum.box_length):
        raise ParameterError("box_length does not match the spectrum")
    if not spectrum.complete_below_cutoff:
        raise InsufficientSpectrumError("spectrum is not complete below its cutoff")
    exact = float(np.sum(np.exp(-beta * spectrum.eigenvalues)))
    cells, bound = _cells(spectrum, lambda e: np.exp(-beta * e))
    tail = _exp_tail(spectrum, beta)
    total = exact + cells
    if tail > 1e-12 * max(total, 1e-300):
        raise InsufficientSpectrumError(
            f"tail above {spectrum.coverage:.6g} is {tail:.3g}, more than 1e-12 of the trace")
    length = spectrum.box_length
    return HeatTrace(total / length, float(bound + tail) / length)


def trace_spectrum(config: ImpurityConfiguration, gamma: float, beta: float,
                   step: float = 0.05, top: float | None = None) -> Spectrum:
    """Eight exact levels plus a count grid of spacing ``step / beta`` up to ``top``.

    Enough for :func:`heat_trace`; the default top puts the free tail
    far below 1e-12 of the trace.
    """
    low = eigenvalues(config, gamma, n_levels=8)
    if top is None:
        top = low.energy_cutoff + 40.0 / beta
    grid = np.arange(low.energy_cutoff, top + step / beta, step / beta)
    counts = count_profile(config, gamma, grid)
    return Spectrum(low.eigenvalues, low.energy_cutoff, True, config.box_length, grid, counts)


# ---------------------------------------------------------------------------
# realization-level driver
# ---------------------------------------------------------------------------

def count_grid(ground: float, cutoff: float, beta: float, top: float,
               fine: float = 0.2) -> np.ndarray:
    """Energies from ``cutoff`` to ``top``, denser where B(E - E_1) is steep.

    Steps are ``fine * (E - E_1)`` below E_1 + 1/beta, then 0.5/beta up to
    E_1 + 8/beta and 2/beta beyond.
    """
    pts = [cutoff]
    while pts[-1] < top:
        x = pts[-1] - ground
        if x < 1.0 / beta:
            step = fine * x
        elif x < 8.0 / beta:
            step = 0.5 / beta
        else:
            step = 2.0 / beta
        pts.append(min(pts[-1] + max(step, 1e-12), top))
    return np.array(pts)


def _grid_top(ground, beta, box_length, particle_number):
    top = ground + 8.0 / beta
    while True:
        free_below = box_length * math.sqrt(top) / math.pi
        y = top - ground
        flat = free_below * math.exp(-beta * y) / (-math.expm1(-beta * y))
        if flat < 1e-3 * TAIL_TOL * particle_number and flat < 1e-14 * box_length:
            return top
        top += 2.0 / beta


def thermal_spectrum(config: ImpurityConfiguration, gamma: float, beta: float,
                     particle_number: float, exact_factor: float = 1.25,
                     min_levels: int = 8, max_levels: int = 32,
                     refine_tol: float = 1e-6, refine_budget: int = 48,
                     fine: float = 0.3) -> Spectrum:
    """Exact low levels plus a count grid reaching far into the free tail.

    Levels below ``exact_factor * E_1`` are computed exactly (at least
    ``min_levels``, at most ``max_levels``).  Grid cells whose rigorous
    uncertainty in the Bose sum is largest are then split, using at most
    ``refine_budget`` extra count sweeps, until the total uncertainty is
    below ``refine_tol * N``.
    """
    low = eigenvalues(config, gamma, n_levels=min_levels)
    ground = float(low.eigenvalues[0])
    if max_levels > min_levels and low.eigenvalues[-1] < exact_factor * ground:
        wanted = min(count_eigenvalues_below(config, gamma, exact_factor * ground), max_levels)
        if wanted > min_levels:
            low = eigenvalues(config, gamma, n_levels=wanted)
    if not low.complete_below_cutoff:
        raise InsufficientSpectrumError("could not confirm completeness of the exact levels")
    top = _grid_top(ground, beta, config.box_length, particle_number)
    grid = count_grid(ground, low.energy_cutoff, beta, max(top, low.energy_cutoff * 1.01), fine)
    counts = count_profile(config, gamma, grid)
    if counts[0] != len(low):
        raise InsufficientSpectrumError("count at the exact cutoff disagrees with the level list")
    spec = Spectrum(low.eigenvalues, low.energy_cutoff, True, config.box_length, grid, counts)
    used = 0
    while used < refine_budget:
        mu = solve_chemical_potential(spec, beta, particle_number)
        e, c = spec.grid, spec.grid_counts
        dc = np.diff(c).astype(float)
        # full cell width: never smaller than the Simpson error bound
        bound = dc * (bose(e[:-1] - mu, beta) - bose(e[1:] - mu, beta))
        limit = refine_tol * particle_number
        if bound.sum() <= limit:
            break
        order = np.argsort(-bound, kind="stable")
        pick = [i for i in order[:min(16, refine_budget - used)] if bound[i] > limit / 16]
        if not pick:
            break
        mids = np.array([0.5 * (e[i] + e[i + 1]) for i in pick])
        new_counts = count_profile(config, gamma, mids)
        used += len(pick)
        grid = np.concatenate((e, mids))
        order = np.argsort(grid, kind="stable")
        counts = np.concatenate((c, new_counts))[order]
        spec = Spectrum(low.eigenvalues, low.energy_cutoff, True, config.box_length,
                        grid[order], counts)
    return spec


@dataclass
class ThermoState:
    mu: float
    occupations: np.ndarray
    total: float
    condensate_fraction_eps: dict = field(default_factory=dict)
    ground_fraction: float = 0.0
    level_fractions: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "mu": repr_float(self.mu),
            "occupations": [repr_float(v) for v in self.occupations],
            "total": repr_float(self.total),
            "condensate_fraction_eps": {repr_float(k): repr_float(v)
                                        for k, v in self.condensate_fraction_eps.items()},
            "ground_fraction": repr_float(self.ground_fraction),
            "level_fractions": {str(k): repr_float(v) for k, v in self.level_fractions.items()},
        })


def repr_float(x: float) -> float:
    """Round-trip a float through 17 significant digits."""
    return float(f"{x:.17g}")


def thermo_state(spectrum: Spectrum, beta: float, particle_number: float,
                 epsilons=None, levels=()) -> ThermoState:
    mu = solve_chemical_potential(spectrum, beta, particle_number)
    occ = occupations(spectrum, mu, beta)
    total = bose_level_sum(spectrum, beta, mu).value
    if epsilons is None:
        epsilons = default_epsilons(float(spectrum.eigenvalues[0]))
    prof = condensate_profile(spectrum, occ, particle_number, epsilons, levels)
    return ThermoState(mu, occ, total, prof["profile"], prof["ground"], prof["levels"])
