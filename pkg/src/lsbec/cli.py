"""Command-line entry point.

    lsbec <experiment> [--config run.json] [--key value ...] --output-dir DIR

A run is configured by one JSON document whose keys are listed in
``DEFAULTS``; command-line flags override file values.  Exit codes:

    0  success
    2  invalid configuration (unknown key, bad value)
    3  numerical failure (spectrum insufficient, no subcritical solution, failed fit)
    4  resource cap exceeded
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (DomainError, FitError, InsufficientSpectrumError, LSModelError,
                     ParameterError, ResourceCapError)

EXPERIMENTS = ("spectrum", "ids", "thermo", "gap", "bec", "excited", "mu", "lifshitz")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_RESOURCE = 4

# key -> default; None means "derived" (see RunConfig docs)
DEFAULTS = {
    "experiment": None,
    "nu": 1.0,
    "gamma": 5.0,
    "beta": 1.0,
    "rho": 1.0,
    "sizes": [1000],
    "R": 10,
    "seed": 0,
    "eta": 0.5,
    "c2": 4.0,
    "M": 1.0,
    "kappa": 3.0,
    "eta_prime": 0.01,
    "output_dir": "lsbec-out",
    "formats": ["csv", "json"],
    "workers": 0,
    "L": None,
    "index": 0,
    "n_levels": 100,
    "energy_cutoff": None,
    "level_cap": 10**7,
    "grid": None,
    "window": None,
    "value_range": [1e-4, 1e-2],
    "epsilons": None,
    "rho_c": None,
    "reference": "ensemble",
    "expect_supercritical": None,
}


class ConfigError(Exception):
    def __init__(self, key, message):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


@dataclass
class RunConfig:
    """Validated run configuration.

    ``L`` is the box length for spectrum / ids / lifshitz runs (default
    sizes[0] / rho); ``workers`` = 0 means one per logical core.
    """

    experiment: str
    nu: float = 1.0
    gamma: float = 5.0
    beta: float = 1.0
    rho: float = 1.0
    sizes: list = field(default_factory=lambda: [1000])
    R: int = 10
    seed: int = 0
    eta: float = 0.5
    c2: float = 4.0
    M: float = 1.0
    kappa: float = 3.0
    eta_prime: float = 0.01
    output_dir: str = "lsbec-out"
    formats: list = field(default_factory=lambda: ["csv", "json"])
    workers: int = 0
    L: float | None = None
    index: int = 0
    n_levels: int | None = 100
    energy_cutoff: float | None = None
    level_cap: int = 10**7
    grid: list | None = None
    window: list | None = None
    value_range: list = field(default_factory=lambda: [1e-4, 1e-2])
    epsilons: list | None = None
    rho_c: float | None = None
    reference: str = "ensemble"
    expect_supercritical: bool | None = None

    def params(self, N=None):
        from .sampler import ModelParameters
        return ModelParameters(self.nu, self.gamma, self.beta, self.rho,
                               int(self.sizes[0] if N is None else N))

    def constants(self):
        from .experiments import TheoremConstants
        return TheoremConstants(self.eta, self.c2, self.M, self.kappa)

    def box_length(self):
        return float(self.L) if self.L is not None else self.sizes[0] / self.rho


def _positive(key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if not (math.isfinite(value) and value > 0):
        raise ConfigError(key, f"must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _number_list(key, value, integer=False, min_len=1):
    if not isinstance(value, list) or len(value) < min_len:
        raise ConfigError(key, f"expected a list of at least {min_len} numbers")
    return [_positive(key, v, integer) for v in value]


def validate(raw: dict) -> RunConfig:
    """Check a raw mapping and build a RunConfig; raises ConfigError."""
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    cfg = dict(DEFAULTS)
    cfg.update({k: v for k, v in raw.items() if v is not None or k in ("experiment",)})
    exp = cfg["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}, got {exp!r}")
    for key in ("nu", "gamma", "beta", "rho", "M"):
        cfg[key] = _positive(key, cfg[key])
    cfg["sizes"] = _number_list("sizes", cfg["sizes"], integer=True)
    cfg["R"] = _positive("R", cfg["R"], integer=True)
    if isinstance(cfg["seed"], bool) or not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed", f"expected a nonnegative integer, got {cfg['seed']!r}")
    eta = _positive("eta", cfg["eta"])
    if not eta < 2:
        raise ConfigError("eta", f"must lie in (0, 2), got {eta!r}")
    c2 = cfg["c2"]
    if isinstance(c2, bool) or not isinstance(c2, (int, float)) or not c2 > 2:
        raise ConfigError("c2", f"must be > 2, got {c2!r}")
    kappa = cfg["kappa"]
    if isinstance(kappa, bool) or not isinstance(kappa, (int, float)) or not kappa > 2:
        raise ConfigError("kappa", f"must be > 2, got {kappa!r}")
    eta_prime = _positive("eta_prime", cfg["eta_prime"])
    if not eta_prime < 1:
        raise ConfigError("eta_prime", f"must lie in (0, 1), got {eta_prime!r}")
    if not isinstance(cfg["output_dir"], str) or not cfg["output_dir"]:
        raise ConfigError("output_dir", "expected a nonempty path")
    formats = cfg["formats"]
    if not isinstance(formats, list) or not formats or set(formats) - {"csv", "json"}:
        raise ConfigError("formats", f"expected a nonempty subset of ['csv', 'json'], got {formats!r}")
    workers = cfg["workers"]
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 0:
        raise ConfigError("workers", f"expected a nonnegative integer, got {workers!r}")
    if cfg["L"] is not None:
        cfg["L"] = _positive("L", cfg["L"])
    if isinstance(cfg["index"], bool) or not isinstance(cfg["index"], int) or cfg["index"] < 0:
        raise ConfigError("index", f"expected a nonnegative integer, got {cfg['index']!r}")
    if cfg["energy_cutoff"] is not None:
        cfg["energy_cutoff"] = _positive("energy_cutoff", cfg["energy_cutoff"])
        cfg["n_levels"] = None
    else:
        cfg["n_levels"] = _positive("n_levels", cfg["n_levels"], integer=True)
    cfg["level_cap"] = _positive("level_cap", cfg["level_cap"], integer=True)
    if cfg["grid"] is not None:
        cfg["grid"] = _number_list("grid", cfg["grid"])
        if any(b <= a for a, b in zip(cfg["grid"], cfg["grid"][1:])):
            raise ConfigError("grid", "energies must be strictly increasing")
    if cfg["window"] is not None:
        w = _number_list("window", cfg["window"], min_len=2)
        if len(w) != 2 or not w[0] < w[1]:
            raise ConfigError("window", "expected [E_lo, E_hi] with E_lo < E_hi")
        cfg["window"] = w
    vr = _number_list("value_range", cfg["value_range"], min_len=2)
    if len(vr) != 2 or not vr[0] < vr[1]:
        raise ConfigError("value_range", "expected [lo, hi] with lo < hi")
    cfg["value_range"] = vr
    if cfg["epsilons"] is not None:
        cfg["epsilons"] = _number_list("epsilons", cfg["epsilons"])
    if cfg["rho_c"] is not None:
        cfg["rho_c"] = _positive("rho_c", cfg["rho_c"])
    if cfg["reference"] not in ("ensemble", "infinite_gamma"):
        raise ConfigError("reference", "must be 'ensemble' or 'infinite_gamma'")
    if cfg["expect_supercritical"] not in (None, True, False):
        raise ConfigError("expect_supercritical", "expected true, false or null")
    if exp in ("bec", "excited", "mu", "thermo") and exp != "thermo" and cfg["R"] < 1:
        raise ConfigError("R", "must be positive")
    if exp in ("ids", "lifshitz") and cfg["R"] < 2:
        raise ConfigError("R", "ensemble curves need R >= 2")
    return RunConfig(**cfg)


def parse_config(argv=None) -> tuple:
    """(RunConfig, raw mapping) from argv; raises ConfigError on schema problems."""
    parser = build_parser()
    args = parser.parse_args(argv)
    raw = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError("config", f"file {str(path)!r} does not exist")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be a JSON object")
    file_exp = raw.get("experiment")
    if file_exp is not None and file_exp != args.experiment:
        raise ConfigError("experiment", f"file says {file_exp!r} but the command is {args.experiment!r}")
    raw = dict(raw)
    raw["experiment"] = args.experiment
    for key in DEFAULTS:
        if key == "experiment":
            continue
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    return validate(raw), raw


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsbec", description=__doc__.split("\n")[0])
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON run configuration")
    for key in ("nu", "gamma", "beta", "rho", "eta", "c2", "M", "kappa", "eta_prime", "L",
                "energy_cutoff", "rho_c"):
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
    for key in ("R", "seed", "workers", "index", "n_levels", "level_cap"):
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    parser.add_argument("--sizes", type=int, nargs="+")
    parser.add_argument("--grid", type=float, nargs="+")
    parser.add_argument("--window", type=float, nargs=2)
    parser.add_argument("--value-range", dest="value_range", type=float, nargs=2)
    parser.add_argument("--epsilons", type=float, nargs="+")
    parser.add_argument("--formats", nargs="+")
    parser.add_argument("--reference", choices=("ensemble", "infinite_gamma"))
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--expect-supercritical", dest="expect_supercritical",
                        action="store_true", default=None)
    return parser


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _write(out: Path, name: str, text: str):
    (out / name).write_text(text)


def _run_spectrum(cfg, out):
    from .sampler import sample_configuration
    from .spectrum import eigenvalues
    L = cfg.box_length()
    config = sample_configuration(L, cfg.nu, cfg.seed, cfg.index)
    spec = eigenvalues(config, cfg.gamma, n_levels=cfg.n_levels, energy_cutoff=cfg.energy_cutoff,
                       level_cap=cfg.level_cap)
    lines = ["j,E_j\n"] + [f"{j},{e:.17g}\n" for j, e in enumerate(spec.eigenvalues, start=1)]
    if "csv" in cfg.formats:
        _write(out, "spectrum.csv", "".join(lines))
    if "json" in cfg.formats:
        _write(out, "spectrum.json", json.dumps({
            "box_length": L, "atoms": len(config), "energy_cutoff": spec.energy_cutoff,
            "complete_below_cutoff": spec.complete_below_cutoff,
            "eigenvalues": spec.eigenvalues.tolist()}, indent=1))
    return None


def _run_ids(cfg, out):
    from .experiments import ExperimentReport, _base_metadata
    from .ids import ensemble_ids, reference_grid
    L = cfg.box_length()
    grid = np.array(cfg.grid) if cfg.grid is not None else reference_grid(cfg.beta)
    curve = ensemble_ids(cfg.params(), grid, cfg.R, cfg.seed, box_length=L, workers=cfg.workers)
    report = ExperimentReport("ids", metadata=_base_metadata("ids", cfg.params(), cfg.seed, None,
                                                             cfg.R, box_length=L))
    N = int(round(cfg.rho * L))
    for e, v, s in zip(curve.energies, curve.values, curve.stderr):
        report.add(N, L, f"ids(E={e:.17g})", v, s, cfg.R)
    report.add(N, L, "free_bound_violations", curve.free_bound_violations(), 0.0, cfg.R)
    if "csv" in cfg.formats:
        _write(out, "curve.csv", curve.to_csv())
    return report


def _run_thermo(cfg, out):
    from .experiments import ExperimentReport, _base_metadata
    from .sampler import sample_configuration
    from .thermo import heat_trace, thermal_spectrum, thermo_state
    N = cfg.sizes[0]
    L = N / cfg.rho
    config = sample_configuration(L, cfg.nu, cfg.seed, cfg.index)
    spec = thermal_spectrum(config, cfg.gamma, cfg.beta, N)
    eps = cfg.epsilons if cfg.epsilons is not None else None
    state = thermo_state(spec, cfg.beta, N, epsilons=eps, levels=(1, 2))
    trace = heat_trace(spec, cfg.beta)
    report = ExperimentReport("thermo", metadata=_base_metadata("thermo", cfg.params(), cfg.seed,
                                                                [N], 1, index=cfg.index))
    report.add(N, L, "mu", state.mu)
    report.add(N, L, "E1", float(spec.eigenvalues[0]))
    report.add(N, L, "n1_over_N", state.ground_fraction)
    report.add(N, L, "total_over_N", state.total / N)
    report.add(N, L, "heat_trace", trace.value, trace.error)
    if "json" in cfg.formats:
        _write(out, "thermo.json", state.to_json())
    return report


def _run_experiment(cfg, out):
    from . import experiments as ex
    params = cfg.params()
    if cfg.experiment == "gap":
        return ex.run_gap_experiment(params, cfg.constants(), cfg.sizes, cfg.R, cfg.seed,
                                     workers=cfg.workers)
    if cfg.experiment == "bec":
        return ex.run_bec_experiment(params, cfg.sizes, cfg.R, cfg.epsilons, cfg.seed,
                                     rho_c=cfg.rho_c, reference=cfg.reference,
                                     constants=cfg.constants(),
                                     expect_supercritical=cfg.expect_supercritical,
                                     workers=cfg.workers)
    if cfg.experiment == "excited":
        return ex.run_excited_state_check(params, cfg.constants(), cfg.sizes, cfg.R,
                                          cfg.eta_prime, cfg.seed, workers=cfg.workers)
    if cfg.experiment == "mu":
        return ex.run_mu_convergence(params, cfg.sizes, cfg.R, cfg.seed, reference=cfg.reference,
                                     rho_c=cfg.rho_c, workers=cfg.workers)
    if cfg.experiment == "lifshitz":
        report = ex.run_lifshitz_experiment(params, cfg.box_length(), cfg.R, cfg.grid, cfg.window,
                                            tuple(cfg.value_range), cfg.seed, workers=cfg.workers)
        if "csv" in cfg.formats:
            _write(out, "curve.csv", ex.curve_from_report(report).to_csv())
        _write(out, "fit.json", json.dumps(report.extras["fit"], indent=1, sort_keys=True))
        return report
    raise AssertionError(cfg.experiment)


_RUNNERS = {"spectrum": _run_spectrum, "ids": _run_ids, "thermo": _run_thermo}


def run(cfg: RunConfig, raw: dict | None = None) -> int:
    """Execute a validated configuration and write its artifacts."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    status = EXIT_OK
    error = None
    try:
        runner = _RUNNERS.get(cfg.experiment, _run_experiment)
        report = runner(cfg, out)
        if report is not None:
            if "csv" in cfg.formats:
                _write(out, "report.csv", report.to_csv())
            if "json" in cfg.formats:
                _write(out, "report.json", report.to_json())
    except ResourceCapError as exc:
        status, error = EXIT_RESOURCE, str(exc)
    except (InsufficientSpectrumError, DomainError, FitError) as exc:
        status, error = EXIT_NUMERIC, str(exc)
    except ParameterError as exc:
        status, error = EXIT_CONFIG, str(exc)
    manifest = {
        "config": asdict(cfg),
        "raw_config": raw,
        "exit_status": status,
        "error": error,
        "wall_time_s": time.perf_counter() - start,
        "versions": _versions(),
    }
    _write(out, "manifest.json", json.dumps(manifest, indent=1, sort_keys=True, default=str))
    if error:
        print(f"lsbec: {error}", file=sys.stderr)
    return status


def _versions():
    import numba
    import scipy
    return {"lsbec": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def main(argv=None) -> int:
    try:
        cfg, raw = parse_config(argv)
    except ConfigError as exc:
        print(f"lsbec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LSModelError as exc:
        print(f"lsbec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, raw)


if __name__ == "__main__":
    sys.exit(main())
