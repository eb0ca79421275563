"""Ensemble harnesses over growing system sizes.

Every harness draws realization i of size N from the stream (seed, i) with
box length L_N = N / rho, evaluates one realization per task (optionally in
worker processes) and reduces the results in index order.  A report holds
rows (N, L, statistic, value, stderr, R) plus metadata.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._parallel import ordered_map
from .errors import DomainError, ParameterError
from .ids import (IdsCurve, build_reference, critical_density, ensemble_ids, lifshitz_fit,
                  solve_mu_hat, value_window)
from .sampler import ModelParameters, sample_configuration
from .spectrum import count_profile, eigenvalue_indices
from .thermo import (bose, bose_level_sum, occupations, solve_chemical_potential,
                     thermal_spectrum, window_occupation)

SUM_RULE_LIMIT = 1e-8

# ---------------------------------------------------------------------------
# constants and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoremConstants:
    """eta in (0, 2), c2 > 2, M > 0 and kappa > 2."""

    eta: float = 0.5
    c2: float = 4.0
    M: float = 1.0
    kappa: float = 3.0

    def __post_init__(self):
        if not 0 < self.eta < 2:
            raise ParameterError(f"eta must lie in (0, 2), got {self.eta!r}")
        if not self.c2 > 2:
            raise ParameterError(f"c2 must be > 2, got {self.c2!r}")
        if not self.M > 0:
            raise ParameterError(f"M must be positive, got {self.M!r}")
        if not self.kappa > 2:
            raise ParameterError(f"kappa must be > 2, got {self.kappa!r}")

    def c1(self, intensity: float) -> float:
        return -intensity / (4.0 * math.log(self.eta / 2.0))

    def c3(self, intensity: float, M: float | None = None) -> int:
        M = self.M if M is None else M
        return int(math.ceil(4.0 * M * self.c2 / (self.eta * self.c1(intensity)))) + 1


@dataclass(frozen=True)
class Row:
    N: int
    L: float
    statistic: str
    value: float
    stderr: float
    R: int


COLUMNS = ("N", "L", "statistic", "value", "stderr", "R")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


@dataclass
class ExperimentReport:
    experiment: str
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def add(self, N, L, statistic, value, stderr=0.0, R=1):
        self.rows.append(Row(int(N), float(L), str(statistic), float(value), float(stderr), int(R)))

    def value(self, statistic: str, N: int | None = None) -> float:
        hits = [r for r in self.rows if r.statistic == statistic and (N is None or r.N == N)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {statistic!r} at N={N}")
        return hits[0].value

    def row(self, statistic: str, N: int | None = None) -> Row:
        hits = [r for r in self.rows if r.statistic == statistic and (N is None or r.N == N)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {statistic!r} at N={N}")
        return hits[0]

    def csv_body(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.N), _fmt(r.L), r.statistic, _fmt(r.value), _fmt(r.stderr), _fmt(r.R)])
        return buf.getvalue()

    def to_csv(self) -> str:
        """Metadata as '#' comment lines, then the fixed-column body."""
        head = "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n"
                       for k, v in sorted(self.metadata.items()))
        return head + self.csv_body()

    def to_json(self) -> str:
        return json.dumps({"experiment": self.experiment, "metadata": self.metadata,
                           "rows": [asdict(r) for r in self.rows], "extras": self.extras},
                          sort_keys=True, indent=1)


def _base_metadata(name, params, seed, sizes=None, R=None, **extra):
    meta = {"experiment": name, "version": __version__, "seed": int(seed),
            "params": {"intensity": params.intensity, "strength": params.strength,
                       "inverse_temperature": params.inverse_temperature,
                       "density": params.density}}
    if sizes is not None:
        meta["sizes"] = [int(n) for n in sizes]
    if R is not None:
        meta["R"] = int(R)
    meta.update(extra)
    return meta


def _mean_err(values):
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def _freq(events):
    e = np.asarray(events, dtype=float)
    p = float(e.mean())
    return p, math.sqrt(p * (1.0 - p) / e.size)


def _quantile_err(values, q, seed, resamples=200):
    """Bootstrap standard error of a sample quantile, with a fixed stream."""
    v = np.asarray(values, dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 104729]))
    idx = rng.integers(0, v.size, size=(resamples, v.size))
    return float(np.std(np.quantile(v[idx], q, axis=1), ddof=1))


def _check_sizes(sizes):
    sizes = [int(n) for n in sizes]
    if not sizes or min(sizes) < 1:
        raise ParameterError("sizes must be positive integers")
    return sizes


# ---------------------------------------------------------------------------
# one realization of the thermal pipeline
# ---------------------------------------------------------------------------


def _thermo_task(task):
    (nu, gamma, beta, N, L, seed, index, epsilons, levels, saturation, min_levels) = task
    config = sample_configuration(L, nu, seed, index)
    spec = thermal_spectrum(config, gamma, beta, N, min_levels=min_levels)
    mu = solve_chemical_potential(spec, beta, N)
    total = bose_level_sum(spec, beta, mu).value
    occ = occupations(spec, mu, beta)
    e1 = float(spec.eigenvalues[0])
    out = {"index": index, "E1": e1, "mu": mu, "n1": float(occ[0]) / N,
           "residual": abs(total - N) / N, "n_exact": len(spec)}
    out["profile"] = [window_occupation(spec, beta, mu, eps) / N for eps in epsilons]
    if levels:
        js = sorted(set(int(j) for j in levels))
        energies = {}
        missing = [j for j in js if j > len(spec)]
        for j in js:
            if j <= len(spec):
                energies[j] = float(spec.eigenvalues[j - 1])
        if missing:
            for j, e in zip(missing, eigenvalue_indices(config, gamma, missing)):
                energies[j] = float(e)
        out["levels"] = {j: float(bose(energies[j] - mu, beta)) / N for j in js}
        out["level_energies"] = energies
    if saturation:
        # mu -> E_1: the most the other levels can hold
        out["rho_sat"] = bose_level_sum(spec, beta, e1).value / L
    return out


def _run_thermo(params, N, R, seed, epsilons=(), levels=(), saturation=False, workers=1,
                min_levels=8):
    L = N / params.density
    tasks = [(params.intensity, params.strength, params.inverse_temperature, float(N), L,
              int(seed), i, tuple(epsilons), tuple(levels), saturation, min_levels)
             for i in range(R)]
    return L, ordered_map(_thermo_task, tasks, workers)


def _size_seed(seed, N):
    # different sizes use unrelated streams
    return int(np.random.SeedSequence([int(seed), int(N)]).generate_state(1)[0])


# ---------------------------------------------------------------------------
# energy gap (ground state low, c3-th level high)
# ---------------------------------------------------------------------------


def _gap_task(task):
    nu, gamma, L, seed, index, energies = task
    config = sample_configuration(L, nu, seed, index)
    return count_profile(config, gamma, np.asarray(energies))


def run_gap_experiment(params: ModelParameters, constants: TheoremConstants, sizes, R: int,
                       seed: int = 0, M_values=(0.5, 1.0, 2.0), workers: int | None = 1) -> ExperimentReport:
    """Frequencies of E^1 <= (pi nu / ln(c1 L))^2, E^{c3} >= E~_N and both.

    Events are decided by exact eigenvalue counts at the thresholds.
    """
    sizes = _check_sizes(sizes)
    nu = params.intensity
    c1 = constants.c1(nu)
    report = ExperimentReport("gap", metadata=_base_metadata(
        "gap", params, seed, sizes, R, constants=asdict(constants), c1=c1,
        c3=constants.c3(nu), M_values=list(M_values)))
    eta = constants.eta
    for N in sizes:
        L = N / params.density
        log_c1l = math.log(c1 * L)
        shift = math.log(constants.c2 / 2.0)
        if not log_c1l > shift:
            raise DomainError(f"ln(c1 L) = {log_c1l:.4g} must exceed ln(c2/2) = {shift:.4g}")
        x_ground = (math.pi * nu / log_c1l) ** 2
        x_tilde = (math.pi * nu / (log_c1l - shift)) ** 2
        x_kappa = (math.pi * nu / (constants.kappa * math.log(L))) ** 2
        energies = (float(np.nextafter(x_ground, math.inf)), x_tilde, x_kappa)
        s = _size_seed(seed, N)
        tasks = [(nu, params.strength, L, s, i, energies) for i in range(R)]
        counts = np.vstack(ordered_map(_gap_task, tasks, workers))
        ground_low = counts[:, 0] >= 1
        ground_high = counts[:, 2] == 0
        report.add(N, L, "E1_threshold", x_ground, 0.0, R)
        report.add(N, L, "Etilde", x_tilde, 0.0, R)
        report.add(N, L, "c3", constants.c3(nu), 0.0, R)
        p, e = _freq(ground_low)
        report.add(N, L, "P[E1<=threshold]", p, e, R)
        report.add(N, L, "bound[1-eta/2]", 1 - eta / 2, 0.0, R)
        report.add(N, L, "flag[E1<=threshold]", float(p < 1 - eta / 2), 0.0, R)
        for M in M_values:
            c3 = constants.c3(nu, M)
            high = counts[:, 1] <= c3 - 1
            tag = "" if M == constants.M else f"|M={M:g}"
            p_hi, e_hi = _freq(high)
            p_om, e_om = _freq(high & ground_low)
            report.add(N, L, f"P[E_c3>=Etilde{tag}]", p_hi, e_hi, R)
            report.add(N, L, f"P[Omega2{tag}]", p_om, e_om, R)
            if not tag:
                report.add(N, L, "bound[1-5eta/8]", 1 - 5 * eta / 8, 0.0, R)
                report.add(N, L, "flag[Omega2]", float(p_om < 1 - 5 * eta / 8), 0.0, R)
        m, e = _mean_err(counts[:, 1])
        report.add(N, L, "mean_count_below_Etilde", m, e, R)
        report.add(N, L, "bound[M*c2/(2*c1)]", constants.M * constants.c2 / (2 * c1), 0.0, R)
        p, e = _freq(ground_high)
        report.add(N, L, "P[E1>=kappa_threshold]", p, e, R)
    return report


# ---------------------------------------------------------------------------
# condensation
# ---------------------------------------------------------------------------


def default_epsilons(beta: float) -> list:
    """Window widths 1e-5 ... 1e-1 in units of 1/beta."""
    return [float(x) / beta for x in np.geomspace(1e-5, 1e-1, 9)]


def resolve_critical_density(params: ModelParameters, reference="ensemble", seed: int = 0,
                             workers: int | None = 1, **reference_kw) -> tuple:
    """(rho_c, error, reference object) for the model in ``params``."""
    if isinstance(reference, str):
        ref = build_reference(params, reference, seed=seed, workers=workers, **reference_kw)
    else:
        ref = reference
    crit = critical_density(ref, params.inverse_temperature)
    return crit.value, crit.error, ref


def _profile_rows(report, N, L, R, params, eps, results, rho_c):
    rho = params.density
    prof = np.array([r["profile"] for r in results])
    for k, e in enumerate(eps):
        m, s = _mean_err(prof[:, k])
        report.add(N, L, f"fraction_eps={e:.6g}", m, s, R)
    first = prof[:, 0] * rho
    m, s = _mean_err(first)
    report.add(N, L, "rho0_smallest_eps", m, s, R)
    if len(eps) >= 2:
        e1, e2 = eps[0], eps[1]
        rich = rho * (prof[:, 0] - e1 * (prof[:, 1] - prof[:, 0]) / (e2 - e1))
        m, s = _mean_err(rich)
        report.add(N, L, "rho0_richardson", m, s, R)
    if rho_c is not None:
        report.add(N, L, "rho0_predicted", max(rho - rho_c, 0.0), 0.0, R)
        report.add(N, L, "fraction_predicted", max(rho - rho_c, 0.0) / rho, 0.0, R)


def run_bec_experiment(params: ModelParameters, sizes, R: int, epsilons=None, seed: int = 0,
                       rho_c: float | None = None, reference="ensemble",
                       constants: TheoremConstants | None = None, eta_prime: float | None = None,
                       expect_supercritical: bool | None = None,
                       workers: int | None = 1) -> ExperimentReport:
    """Condensate statistics per size: n^1/N distribution, window profile, rho_0.

    With ``constants`` the threshold event of the macroscopic-occupation
    bound is reported; with ``eta_prime`` the excited-state rows of
    :func:`run_excited_state_check` are added from the same realizations.
    """
    sizes = _check_sizes(sizes)
    beta = params.inverse_temperature
    eps = list(default_epsilons(beta) if epsilons is None else epsilons)
    if not eps or min(eps) <= 0:
        raise ParameterError("epsilons must be positive")
    eps = sorted(eps)
    rho_c_err = 0.0
    if rho_c is None:
        rho_c, rho_c_err, _ = resolve_critical_density(params, reference, seed, workers)
    rho = params.density
    meta = _base_metadata("bec", params, seed, sizes, R, epsilons=eps, rho_c=rho_c,
                          rho_c_error=rho_c_err, reference=reference if isinstance(reference, str)
                          else getattr(reference, "name", "custom"))
    warn = None
    if expect_supercritical and rho <= rho_c:
        warn = f"rho = {rho:g} is not above rho_c = {rho_c:g}; run proceeds as subcritical"
        warnings.warn(warn, stacklevel=2)
        meta["warning"] = warn
    levels = ()
    if constants is not None:
        meta["constants"] = asdict(constants)
        c3 = constants.c3(params.intensity)
        meta["c3"] = c3
        if eta_prime is not None:
            levels = (2, c3, 2 * c3)
            meta["eta_prime"] = eta_prime
    report = ExperimentReport("bec", metadata=meta)
    per_size = {}
    for N in sizes:
        L, results = _run_thermo(params, N, R, _size_seed(seed, N), eps, levels, workers=workers)
        per_size[N] = results
        _bec_rows(report, N, L, R, params, eps, results, rho_c, constants)
        if levels:
            _excited_rows(report, N, L, R, params, constants, eta_prime, results)
    report.extras["realizations"] = {str(N): [_public(r) for r in res] for N, res in per_size.items()}
    return report


def _public(r):
    out = {"index": r["index"], "E1": r["E1"], "mu": r["mu"], "n1_over_N": r["n1"],
           "sum_rule_residual": r["residual"]}
    if "levels" in r:
        out["level_fractions"] = {str(j): v for j, v in r["levels"].items()}
    return out


def _bec_rows(report, N, L, R, params, eps, results, rho_c, constants):
    rho = params.density
    n1 = np.array([r["n1"] for r in results])
    seed = report.metadata["seed"]
    m, s = _mean_err(n1)
    report.add(N, L, "n1_over_N_mean", m, s, R)
    for q, name in ((0.5, "median"), (0.1, "q10"), (0.25, "q25"), (0.75, "q75"), (0.9, "q90")):
        report.add(N, L, f"n1_over_N_{name}", float(np.quantile(n1, q)),
                   _quantile_err(n1, q, seed + N), R)
    m, s = _mean_err([r["mu"] for r in results])
    report.add(N, L, "mu_mean", m, s, R)
    m, s = _mean_err([r["E1"] for r in results])
    report.add(N, L, "E1_mean", m, s, R)
    residual = max(r["residual"] for r in results)
    report.add(N, L, "sum_rule_max_rel_residual", residual, 0.0, R)
    report.add(N, L, "sum_rule_violations",
               sum(r["residual"] > SUM_RULE_LIMIT for r in results), 0.0, R)
    _profile_rows(report, N, L, R, params, eps, results, rho_c)
    if constants is not None and rho_c is not None and rho > rho_c:
        eta = constants.eta
        rho0 = rho - rho_c
        c3 = constants.c3(params.intensity)
        threshold = (1 - math.sqrt(eta)) * (1 - eta) * rho0 / (c3 * rho)
        bound = 1 - 4 * ((rho0 + rho + 1) / rho0) * math.sqrt(eta) - 6 * eta / 8
        p, e = _freq(n1 >= threshold)
        report.add(N, L, "n1_threshold", threshold, 0.0, R)
        report.add(N, L, "P[n1/N>=threshold]", p, e, R)
        report.add(N, L, "bound[occupation]", bound, 0.0, R)


def _excited_rows(report, N, L, R, params, constants, eta_prime, results):
    c3 = constants.c3(params.intensity)
    eta = constants.eta
    for j in (2, c3, 2 * c3):
        m, s = _mean_err([r["levels"][j] for r in results])
        report.add(N, L, f"n{j}_over_N_mean", m, s, R)
    p, e = _freq([r["levels"][c3] < eta_prime for r in results])
    report.add(N, L, "P[n_c3/N<eta_prime]", p, e, R)
    report.add(N, L, "bound[1-5eta/8]", 1 - 5 * eta / 8, 0.0, R)
    bad = 0
    for r in results:
        seq = [r["n1"]] + [r["levels"][j] for j in (2, c3, 2 * c3)]
        bad += any(b > a for a, b in zip(seq, seq[1:]))
    report.add(N, L, "monotone_violations", bad, 0.0, R)


def run_excited_state_check(params: ModelParameters, constants: TheoremConstants, sizes, R: int,
                            eta_prime: float = 0.01, seed: int = 0,
                            workers: int | None = 1) -> ExperimentReport:
    """n^j / N for j in {2, c3, 2 c3} and the frequency of n^{c3}/N < eta'."""
    sizes = _check_sizes(sizes)
    c3 = constants.c3(params.intensity)
    report = ExperimentReport("excited", metadata=_base_metadata(
        "excited", params, seed, sizes, R, constants=asdict(constants), c3=c3,
        eta_prime=eta_prime))
    for N in sizes:
        L, results = _run_thermo(params, N, R, _size_seed(seed, N), (), (2, c3, 2 * c3),
                                 workers=workers)
        _excited_rows(report, N, L, R, params, constants, eta_prime, results)
        residual = max(r["residual"] for r in results)
        report.add(N, L, "sum_rule_max_rel_residual", residual, 0.0, R)
    return report


# ---------------------------------------------------------------------------
# chemical potential
# ---------------------------------------------------------------------------


def run_mu_convergence(params: ModelParameters, sizes, R: int, seed: int = 0,
                       reference="ensemble", rho_c: float | None = None, mu_hat: float | None = None,
                       workers: int | None = 1, min_levels: int = 8) -> ExperimentReport:
    """Mean and spread of mu_N per size, and the distance to the subcritical limit."""
    sizes = _check_sizes(sizes)
    beta = params.inverse_temperature
    ref = None
    rho_c_err = 0.0
    if rho_c is None or (mu_hat is None and params.density < rho_c):
        rho_c, rho_c_err, ref = resolve_critical_density(params, reference, seed, workers)
    sub = params.density < rho_c
    if sub and mu_hat is None:
        mu_hat = solve_mu_hat(params.density, beta, ref)
    report = ExperimentReport("mu", metadata=_base_metadata(
        "mu", params, seed, sizes, R, rho_c=rho_c, rho_c_error=rho_c_err,
        regime="subcritical" if sub else "supercritical",
        mu_hat=mu_hat if sub else None))
    per_size = {}
    for N in sizes:
        L, results = _run_thermo(params, N, R, _size_seed(seed, N), workers=workers,
                                 min_levels=min_levels)
        per_size[N] = results
        mu = np.array([r["mu"] for r in results])
        e1 = np.array([r["E1"] for r in results])
        m, s = _mean_err(mu)
        report.add(N, L, "mu_mean", m, s, R)
        report.add(N, L, "mu_sd", float(mu.std(ddof=1)) if R > 1 else 0.0, 0.0, R)
        report.add(N, L, "mu_min", float(mu.min()), 0.0, R)
        report.add(N, L, "mu_max", float(mu.max()), 0.0, R)
        report.add(N, L, "abs_mu_mean", abs(m), s, R)
        p, e = _freq(mu < e1)
        report.add(N, L, "P[mu<E1]", p, e, R)
        m1, s1 = _mean_err(e1)
        report.add(N, L, "E1_mean", m1, s1, R)
        n1 = np.array([r["n1"] for r in results])
        report.add(N, L, "n1_over_N_median", float(np.median(n1)),
                   _quantile_err(n1, 0.5, seed + N), R)
        report.add(N, L, "sum_rule_max_rel_residual", max(r["residual"] for r in results), 0.0, R)
        report.add(N, L, "sum_rule_violations",
                   sum(r["residual"] > SUM_RULE_LIMIT for r in results), 0.0, R)
        if sub:
            report.add(N, L, "mu_hat", mu_hat, 0.0, R)
            report.add(N, L, "abs(mu_mean-mu_hat)", abs(m - mu_hat), s, R)
    report.extras["realizations"] = {str(N): [_public(r) for r in res] for N, res in per_size.items()}
    return report


# ---------------------------------------------------------------------------
# finite-volume critical density
# ---------------------------------------------------------------------------


def finite_volume_critical_density(params: ModelParameters, R: int, seed: int = 0,
                                   workers: int | None = 1) -> tuple:
    """Mean and stderr over R boxes of L^-1 sum_{j >= 2} B(E_j - E_1).

    This is the largest density the excited levels of a box of length
    N / rho can hold, i.e. the finite-volume counterpart of rho_c.
    """
    N = params.particle_number
    _, results = _run_thermo(params, N, R, _size_seed(seed, N), saturation=True, workers=workers)
    return _mean_err([r["rho_sat"] for r in results])


def self_consistent_density(params: ModelParameters, factor: float, R: int, seed: int = 0,
                            start: float | None = None, iterations: int = 2,
                            workers: int | None = 1) -> dict:
    """Fixed point rho = factor * rho_c(N / rho) of the finite-volume critical density.

    Returns the iterates and the final (rho, rho_c, stderr).
    """
    rho = params.density if start is None else float(start)
    history = []
    rc, err = math.nan, math.nan
    for it in range(iterations):
        p = ModelParameters(params.intensity, params.strength, params.inverse_temperature,
                            rho, params.particle_number)
        rc, err = finite_volume_critical_density(p, R, seed + 7919 * (it + 1), workers)
        history.append({"rho": rho, "rho_c": rc, "stderr": err})
        rho = factor * rc
    return {"rho": rho, "rho_c": rc, "stderr": err, "history": history}


# ---------------------------------------------------------------------------
# Lifshitz tail
# ---------------------------------------------------------------------------


def lifshitz_grid(intensity: float, points: int = 64, lo: float = 1e-7, hi: float = 0.3) -> np.ndarray:
    """Energies spaced evenly in E^{-1/2} over the IDS range [lo, hi] of the
    infinite-strength reference (a guess at the tail; the fit window is
    chosen on the measured curve)."""
    u_hi = -math.log(lo / intensity) / (intensity * math.pi)
    u_lo = -math.log(hi / intensity) / (intensity * math.pi)
    u_lo = max(u_lo, 0.2)
    u = np.linspace(u_hi * 1.15, u_lo * 0.6, points)
    return np.sort(1.0 / u ** 2)


def run_lifshitz_experiment(params: ModelParameters, L: float, R: int, grid=None, window=None,
                            value_range=(1e-4, 1e-2), seed: int = 0,
                            workers: int | None = 1) -> ExperimentReport:
    """Ensemble IDS and a fit of ln N against -E^{-1/2}.

    ``window`` is an energy interval; when omitted the grid points whose
    ensemble value lies in ``value_range`` are used.
    """
    if grid is None:
        grid = lifshitz_grid(params.intensity)
    curve = ensemble_ids(params, grid, R, seed, box_length=L, workers=workers)
    if window is None:
        window = value_window(curve, *value_range)
    fit = lifshitz_fit(curve, window)
    nu = params.intensity
    N = int(round(params.density * L))
    report = ExperimentReport("lifshitz", metadata=_base_metadata(
        "lifshitz", params, seed, None, R, box_length=L, window=list(window),
        value_range=list(value_range)))
    report.add(N, L, "slope", fit.slope, fit.slope_stderr, R)
    report.add(N, L, "slope_over_pi_nu", fit.slope / (math.pi * nu), fit.slope_stderr / (math.pi * nu), R)
    report.add(N, L, "intercept", fit.intercept, 0.0, R)
    report.add(N, L, "r2", fit.r2, 0.0, R)
    report.add(N, L, "n_points", fit.n_points, 0.0, R)
    report.add(N, L, "free_bound_violations", curve.free_bound_violations(), 0.0, R)
    report.extras["fit"] = fit.to_dict()
    report.extras["curve"] = {"energies": curve.energies.tolist(), "values": curve.values.tolist(),
                              "stderr": curve.stderr.tolist(), "realizations": R}
    return report


def curve_from_report(report: ExperimentReport) -> IdsCurve:
    c = report.extras["curve"]
    return IdsCurve(np.array(c["energies"]), np.array(c["values"]), np.array(c["stderr"]),
                    int(c["realizations"]))
