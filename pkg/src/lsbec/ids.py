"""Integrated density of states, Lifshitz tails and the critical density.

All integrals against the limiting density of states are written through
integration by parts, so only the counting function N(E) is ever needed:

    int B(E - mu) dN(E) = int N(E) * (-d/dE) B(E - mu) dE,
    -d/dE B(y) = beta * exp(-beta y) / (1 - exp(-beta y))^2.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from ._parallel import ordered_map
from .errors import DomainError, FitError, InsufficientSpectrumError, ParameterError, ValidationError
from .sampler import ModelParameters, sample_configuration
from .spectrum import Spectrum, count_profile

# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IdsCurve:
    """States per unit length below each grid energy, with standard errors."""

    energies: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    realizations_used: int

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        s = np.asarray(self.stderr, dtype=float)
        if not (e.shape == v.shape == s.shape and e.ndim == 1):
            raise ValidationError("energies, values and stderr must be 1-d arrays of equal length")
        if e.size and (np.any(e <= 0) or np.any(np.diff(e) <= 0)):
            raise ValidationError("energies must be positive and strictly increasing")
        if np.any(v < 0) or np.any(s < 0):
            raise ValidationError("values and stderr must be nonnegative")
        if self.realizations_used < 1:
            raise ValidationError("realizations_used must be positive")
        for name, arr in (("energies", e), ("values", v), ("stderr", s)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def free_bound_violations(self) -> int:
        return int(np.sum(self.values > np.sqrt(self.energies) / math.pi))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("E,mean,stderr,n_realizations\n")
        for e, v, s in zip(self.energies, self.values, self.stderr):
            buf.write(f"{e:.17g},{v:.17g},{s:.17g},{self.realizations_used}\n")
        return buf.getvalue()


def finite_ids(spectrum: Spectrum, box_length: float, energy_grid) -> IdsCurve:
    """|{j : E_j < E}| / L on one realization (left-continuous)."""
    grid = np.asarray(energy_grid, dtype=float)
    if grid.size and grid.max() > spectrum.energy_cutoff:
        raise InsufficientSpectrumError(
            f"grid reaches {grid.max():.6g} but levels are known only below {spectrum.energy_cutoff:.6g}")
    if not spectrum.complete_below_cutoff:
        raise InsufficientSpectrumError("spectrum is not complete below its cutoff")
    counts = np.searchsorted(spectrum.eigenvalues, grid, side="left")
    return IdsCurve(grid, counts / float(box_length), np.zeros(grid.size), 1)


def _ids_counts(args):
    length, intensity, gamma, seed, index, grid = args
    config = sample_configuration(length, intensity, seed, index)
    return count_profile(config, gamma, grid)


def ensemble_ids(params: ModelParameters, energy_grid, R: int, seed: int,
                 box_length: float | None = None, workers: int | None = 1) -> IdsCurve:
    """Pointwise mean and standard error of the finite-volume IDS over R boxes.

    The box length defaults to ``params.box_length``; realization i uses the
    stream (seed, i).
    """
    if R < 2:
        raise ParameterError("R must be at least 2")
    grid = np.asarray(energy_grid, dtype=float)
    length = float(params.box_length if box_length is None else box_length)
    jobs = [(length, params.intensity, params.strength, int(seed), i, grid) for i in range(R)]
    counts = np.vstack(ordered_map(_ids_counts, jobs, workers)).astype(float)
    values = counts / length
    mean = values.mean(axis=0)
    err = values.std(axis=0, ddof=1) / math.sqrt(R)
    return IdsCurve(grid, mean, err, R)


# ---------------------------------------------------------------------------
# references for the limiting IDS
# ---------------------------------------------------------------------------


def limiting_ids_infinite_gamma(energy, intensity: float):
    """nu x / (1 - x) with x = exp(-nu pi / sqrt(E)); zero for E <= 0.

    Poisson gaps of length l carry the Dirichlet levels (k pi / l)^2, and
    summing P(l > k pi / sqrt(E)) over k gives the geometric series.
    """
    e = np.asarray(energy, dtype=float)
    out = np.zeros_like(e)
    pos = e > 0
    a = intensity * math.pi / np.sqrt(e[pos])
    out[pos] = intensity * np.exp(-a) / -np.expm1(-a)
    if np.ndim(energy) == 0:
        return float(out)
    return out


class InfiniteGammaReference:
    """Closed-form IDS of the decoupled-interval model."""

    name = "infinite_gamma"
    breakpoints: tuple = ()

    def __init__(self, intensity: float):
        if intensity <= 0:
            raise ParameterError("intensity must be positive")
        self.intensity = float(intensity)

    def __call__(self, energy):
        return limiting_ids_infinite_gamma(energy, self.intensity)


class EnsembleReference:
    """Limiting IDS estimated from an ensemble curve.

    Between well-resolved grid points ln N is interpolated linearly in
    E^{-1/2}.  Below the first resolved point a Lifshitz form
    exp(-s E^{-1/2}) fitted to the low end is attached; above the grid N
    grows like sqrt(E).
    """

    name = "ensemble"

    def __init__(self, curve: IdsCurve, max_rel_err: float = 0.2, tail_max: float = 1e-2,
                 min_tail_points: int = 4):
        v, s, e = curve.values, curve.stderr, curve.energies
        ok = (v > 0) & (s <= max_rel_err * v)
        if ok.sum() < min_tail_points:
            raise FitError("too few resolved points to build an ensemble reference")
        first = int(np.argmax(ok))
        # keep the resolved run upward from the first resolved point
        keep = np.zeros_like(ok)
        keep[first:] = v[first:] > 0
        self.energies = e[keep]
        self.values = v[keep]
        tail = self.values <= tail_max
        if tail.sum() < min_tail_points:
            tail = np.zeros_like(tail)
            tail[:min_tail_points] = True
        u = -1.0 / np.sqrt(self.energies[tail])
        fit = stats.linregress(u, np.log(self.values[tail]))
        if not fit.slope > 0:
            raise FitError("low-energy end of the ensemble curve does not decay")
        self.tail_slope = float(fit.slope)
        self.curve = curve
        self.breakpoints = tuple(float(x) for x in self.energies)
        self._x = -1.0 / np.sqrt(self.energies)
        self._y = np.log(self.values)

    def __call__(self, energy):
        e = np.asarray(energy, dtype=float)
        out = np.zeros_like(e)
        pos = e > 0
        ep = e[pos]
        x = -1.0 / np.sqrt(ep)
        y = np.interp(x, self._x, self._y)
        low = ep < self.energies[0]
        y[low] = self._y[0] + self.tail_slope * (x[low] - self._x[0])
        high = ep > self.energies[-1]
        y[high] = self._y[-1] + 0.5 * np.log(ep[high] / self.energies[-1])
        out[pos] = np.exp(y)
        if np.ndim(energy) == 0:
            return float(out)
        return out


def free_reference(energy):
    """sqrt(E) / pi, the IDS of the free Laplacian."""
    e = np.asarray(energy, dtype=float)
    return np.sqrt(np.clip(e, 0.0, None)) / math.pi


# ---------------------------------------------------------------------------
# Lifshitz fit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LifshitzFit:
    slope: float
    intercept: float
    r2: float
    slope_stderr: float
    n_points: int
    window: tuple

    @property
    def reliable(self) -> bool:
        return self.r2 >= 0.5

    def confidence_interval(self, z: float = 1.96) -> tuple:
        return (self.slope - z * self.slope_stderr, self.slope + z * self.slope_stderr)

    def to_dict(self) -> dict:
        lo, hi = self.confidence_interval()
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                "slope_stderr": self.slope_stderr, "slope_ci95": [lo, hi],
                "n_points": self.n_points, "window": list(self.window),
                "reliable": self.reliable}


def value_window(curve: IdsCurve, lo: float, hi: float) -> tuple:
    """Energy interval spanned by grid points whose value lies in [lo, hi]."""
    inside = (curve.values >= lo) & (curve.values <= hi)
    if not inside.any():
        raise FitError(f"no grid value inside [{lo:g}, {hi:g}]")
    e = curve.energies[inside]
    return float(e.min()), float(e.max())


def lifshitz_fit(curve: IdsCurve, window) -> LifshitzFit:
    """Least squares of ln N against -E^{-1/2} on grid points inside ``window``.

    The slope estimates pi * nu.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ParameterError("window must be an increasing interval")
    e, v = curve.energies, curve.values
    sel = (e >= lo) & (e <= hi) & (v > 0)
    if sel.sum() < 5:
        raise FitError(f"{int(sel.sum())} positive points in the window, need at least 5")
    x = -1.0 / np.sqrt(e[sel])
    y = np.log(v[sel])
    if np.ptp(y) == 0.0:
        return LifshitzFit(0.0, float(y[0]), 0.0, 0.0, int(sel.sum()), (lo, hi))
    fit = stats.linregress(x, y)
    return LifshitzFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2),
                       float(fit.stderr), int(sel.sum()), (lo, hi))


# ---------------------------------------------------------------------------
# Bose integrals against a reference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoseIntegral:
    value: float
    error: float
    divergent: bool
    method: str


def _kernel(energy, beta, mu):
    """-d/dE B(E - mu), written to stay finite for small E - mu."""
    y = beta * (np.asarray(energy, dtype=float) - mu)
    return beta * np.exp(-y) / np.expm1(-y) ** 2


def _check_reference(reference, beta):
    probe = np.geomspace(1e-8, 1e3, 400) / beta
    values = np.asarray(reference(probe), dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values < 0):
        raise ValidationError("reference IDS must be finite and nonnegative")
    if np.any(values > np.sqrt(probe) / math.pi * (1 + 1e-9)):
        raise ValidationError("reference IDS exceeds the free bound sqrt(E)/pi")


def _segment(f, a, b, breaks):
    inner = [x for x in breaks if a < x < b]
    total = err = 0.0
    for lo, hi in zip([a] + inner, inner + [b]):
        val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
        err += e
    return total, err


_MAX_HALVINGS = 400
_RISING_RUN = 24
_UPPER_WIDTHS = 60


def _adaptive(reference, beta, mu):
    def f(e):
        return float(reference(e)) * float(_kernel(e, beta, mu))

    e0 = 1.0 / beta
    breaks = tuple(getattr(reference, "breakpoints", ()))
    upper, err = 0.0, 0.0
    for i in range(_UPPER_WIDTHS):
        val, e = _segment(f, e0 + i / beta, e0 + (i + 1) / beta, breaks)
        upper += val
        err += e
    end = e0 + _UPPER_WIDTHS / beta
    # beyond ``end``: N(E) <= sqrt(E)/pi and the kernel decays like exp(-beta E)
    err += math.sqrt(end) / math.pi * float(_kernel(end, beta, mu)) / beta * 2.0
    lower = 0.0
    pieces = []
    hi = e0
    rising = 0
    for _ in range(_MAX_HALVINGS):
        lo = 0.5 * hi
        val, e = _segment(f, lo, hi, breaks)
        lower += val
        err += e
        if pieces and val >= pieces[-1] > 0:
            rising += 1
        else:
            rising = 0
        pieces.append(val)
        if rising >= _RISING_RUN:
            return BoseIntegral(math.inf, math.inf, True, "adaptive")
        total = upper + lower
        if len(pieces) >= 3 and pieces[-1] <= pieces[-2] <= pieces[-3] \
                and pieces[-1] <= 1e-17 * max(total, 1e-300):
            # pieces shrink at least geometrically from here on
            err += pieces[-1]
            return BoseIntegral(total, err, False, "adaptive")
        if total == 0.0 and lo < 1e-300:
            break
        hi = lo
    if pieces and pieces[-1] > 1e-17 * max(upper + lower, 1e-300):
        return BoseIntegral(math.inf, math.inf, True, "adaptive")
    return BoseIntegral(upper + lower, err, False, "adaptive")


def _log_grid(reference, beta, mu, points=10_000):
    lo = 1e-8 / beta
    hi = (1.0 + _UPPER_WIDTHS) / beta
    t = np.linspace(math.log(lo), math.log(hi), points)
    e = np.exp(t)
    g = np.asarray(reference(e), dtype=float) * _kernel(e, beta, mu) * e
    value = float(integrate.trapezoid(g, t))
    # the bottom cell bounds what lies below the grid when g rises from 0
    below = float(g[0]) * 2.0
    divergent = bool(g[0] > 1e-12 * max(value, 1e-300) and g[0] >= g[1])
    if divergent:
        return BoseIntegral(math.inf, math.inf, True, "log_grid")
    return BoseIntegral(value, below, False, "log_grid")


def bose_integral(reference, beta: float, mu: float, method: str = "adaptive") -> BoseIntegral:
    """int B(E - mu) dN(E) for mu <= 0 by the integration-by-parts form."""
    if beta <= 0:
        raise ParameterError("beta must be positive")
    if mu > 0:
        raise DomainError("mu must be <= 0")
    if method == "adaptive":
        return _adaptive(reference, beta, mu)
    if method == "log_grid":
        return _log_grid(reference, beta, mu)
    raise ParameterError(f"unknown method {method!r}")


def critical_density(reference, beta: float, method: str = "adaptive") -> BoseIntegral:
    """rho_c(beta) = int N(E) beta e^{beta E} B(E)^2 dE.

    The integral is split at beta E = 1.  Below, dyadic pieces are summed
    until they are negligible; if they keep growing the reference has no
    Lifshitz-type thinning and the result is reported divergent.
    """
    _check_reference(reference, beta)
    return bose_integral(reference, beta, 0.0, method)


def solve_mu_hat(rho: float, beta: float, reference, rtol: float = 1e-10) -> float:
    """Unique mu < 0 with int B(E - mu) dN(E) = rho, by bisection in mu."""
    if rho <= 0:
        raise ParameterError("rho must be positive")
    crit = critical_density(reference, beta)
    if not crit.divergent and rho >= crit.value:
        raise DomainError(f"rho = {rho:g} is not below rho_c = {crit.value:g}")

    def density(mu):
        return bose_integral(reference, beta, mu).value

    hi = 0.0
    lo = -1.0 / beta
    while density(lo) > rho:
        hi = lo
        lo *= 2.0
    mid = 0.5 * (lo + hi)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        s = density(mid)
        if abs(s - rho) <= rtol * rho:
            return mid
        if s > rho:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4 * np.spacing(abs(lo)):
            break
    return mid


def reference_grid(beta: float, points: int = 96) -> np.ndarray:
    """Energies covering the Lifshitz region up to where e^{-beta E} is negligible."""
    return np.geomspace(0.01, 64.0 / beta, points)


def build_reference(params: ModelParameters, kind: str = "ensemble", box_length: float = 1e5,
                    R: int = 64, seed: int = 0, grid=None, workers: int | None = 1):
    """Limiting-IDS reference for the model in ``params``.

    ``kind`` is "infinite_gamma" (closed form, ignores the strength) or
    "ensemble" (finite-volume IDS averaged over R boxes of ``box_length``).
    """
    if kind == "infinite_gamma":
        return InfiniteGammaReference(params.intensity)
    if kind != "ensemble":
        raise ParameterError(f"unknown reference kind {kind!r}")
    if grid is None:
        grid = reference_grid(params.inverse_temperature)
    curve = ensemble_ids(params, grid, R, seed, box_length=box_length, workers=workers)
    return EnsembleReference(curve)
