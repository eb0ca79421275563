import math

import numpy as np
import pytest

from lsbec.errors import DomainError, ParameterError
from lsbec.experiments import (ExperimentReport, TheoremConstants, run_bec_experiment,
                               run_excited_state_check, run_gap_experiment,
                               run_lifshitz_experiment, run_mu_convergence,
                               self_consistent_density)
from lsbec.ids import InfiniteGammaReference, critical_density
from lsbec.sampler import ModelParameters

RHO_C_INF = critical_density(InfiniteGammaReference(1.0), 1.0).value


def probability_rows(report):
    return [r for r in report.rows if r.statistic.startswith("P[")]


def test_constants():
    c = TheoremConstants()
    assert c.c1(1.0) == pytest.approx(-1 / (4 * math.log(0.25)))
    assert c.c3(1.0) == 179
    assert c.c3(1.0, M=2.0) > c.c3(1.0) > c.c3(1.0, M=0.5)
    for bad in ({"eta": 3.0}, {"eta": 0.0}, {"c2": 2.0}, {"kappa": 2.0}, {"M": 0.0}):
        with pytest.raises(ParameterError):
            TheoremConstants(**bad)


def test_gap_report():
    p = ModelParameters(1.0, 1e8, 1.0, 1.0, 10_000)
    rep = run_gap_experiment(p, TheoremConstants(), [10_000], 20, seed=1)
    assert rep.value("P[Omega2]") >= 0
    for row in probability_rows(rep):
        assert 0.0 <= row.value <= 1.0
        assert row.stderr == pytest.approx(math.sqrt(row.value * (1 - row.value) / 20))
    assert rep.value("P[E1<=threshold]") >= 1 - 0.5 / 2
    assert "P[Omega2|M=2]" in {r.statistic for r in rep.rows}
    with pytest.raises(DomainError):
        run_gap_experiment(p, TheoremConstants(), [2], 2)


def test_subcritical_bec_is_empty():
    p = ModelParameters(1.0, 5.0, 1.0, RHO_C_INF / 2, 2000)
    rep = run_bec_experiment(p, [2000], 6, seed=3, rho_c=RHO_C_INF)
    assert rep.value("n1_over_N_median") < 0.05
    assert rep.value("sum_rule_violations") == 0
    assert rep.value("fraction_predicted") == 0.0
    fractions = [r.value for r in rep.rows if r.statistic.startswith("fraction_eps=")]
    assert np.all(np.diff(fractions) >= 0)


def test_supercritical_bec_occupies_ground_state():
    p = ModelParameters(1.0, 5.0, 1.0, 4 * RHO_C_INF, 2000)
    rep = run_bec_experiment(p, [2000], 6, seed=3, rho_c=RHO_C_INF, constants=TheoremConstants(),
                             eta_prime=0.01)
    assert rep.value("n1_over_N_mean") > 0.2
    assert rep.value("P[n1/N>=threshold]") == 1.0
    assert rep.value("monotone_violations") == 0
    assert rep.value("rho0_predicted") == pytest.approx(3 * RHO_C_INF)
    assert len(rep.extras["realizations"]["2000"]) == 6


def test_supercritical_warning():
    p = ModelParameters(1.0, 5.0, 1.0, RHO_C_INF / 2, 500)
    with pytest.warns(UserWarning):
        rep = run_bec_experiment(p, [500], 2, rho_c=RHO_C_INF, expect_supercritical=True)
    assert "warning" in rep.metadata


def test_excited_levels_are_monotone():
    p = ModelParameters(1.0, 5.0, 1.0, 0.5, 1000)
    rep = run_excited_state_check(p, TheoremConstants(), [1000], 5, eta_prime=0.01, seed=2)
    assert rep.value("monotone_violations") == 0
    assert 0 <= rep.value("P[n_c3/N<eta_prime]") <= 1


def test_mu_stays_below_ground_level():
    p = ModelParameters(1.0, 5.0, 1.0, 2 * RHO_C_INF, 1000)
    rep = run_mu_convergence(p, [500, 2000], 5, seed=4, rho_c=RHO_C_INF)
    assert rep.value("P[mu<E1]", 500) == rep.value("P[mu<E1]", 2000) == 1.0
    assert rep.metadata["regime"] == "supercritical"


def test_mu_subcritical_reports_distance():
    p = ModelParameters(1.0, 5.0, 1.0, RHO_C_INF / 2, 500)
    rep = run_mu_convergence(p, [500], 4, seed=4, rho_c=RHO_C_INF, mu_hat=-0.637)
    assert rep.value("mu_hat") == -0.637
    assert rep.value("abs(mu_mean-mu_hat)") == pytest.approx(abs(rep.value("mu_mean") + 0.637))


def test_self_consistent_density_iterates():
    p = ModelParameters(1.0, 5.0, 1.0, 0.3, 1000)
    out = self_consistent_density(p, 2.0, 4, seed=1, iterations=2)
    assert len(out["history"]) == 2
    assert out["rho"] == pytest.approx(2 * out["rho_c"])


def test_lifshitz_doubles_with_intensity():
    slopes = {}
    for nu in (1.0, 2.0):
        p = ModelParameters(nu, 5.0, 1.0, 1.0, 1000)
        rep = run_lifshitz_experiment(p, 3000.0, 60, seed=5)
        slopes[nu] = rep.value("slope")
        assert rep.value("free_bound_violations") == 0
    assert slopes[2.0] / slopes[1.0] == pytest.approx(2.0, rel=0.35)


def test_report_csv_is_stable():
    rep = ExperimentReport("x", metadata={"seed": 1})
    rep.add(10, 2.5, "a", 0.1, 0.0, 3)
    rep.add(10, 2.5, "b", 1 / 3, 1e-20, 3)
    body = rep.csv_body()
    assert body.splitlines()[0] == "N,L,statistic,value,stderr,R"
    assert "0.33333333333333331" in body
    assert rep.to_csv().startswith("# seed: 1")
    with pytest.raises(KeyError):
        rep.value("missing")


def test_reruns_are_identical_across_workers():
    p = ModelParameters(1.0, 5.0, 1.0, 0.5, 300)
    a = run_bec_experiment(p, [300, 600], 4, seed=8, rho_c=RHO_C_INF, workers=1)
    b = run_bec_experiment(p, [300, 600], 4, seed=8, rho_c=RHO_C_INF, workers=2)
    assert a.csv_body() == b.csv_body()
    g1 = run_gap_experiment(p, TheoremConstants(), [1000], 6, seed=2, workers=1)
    g2 = run_gap_experiment(p, TheoremConstants(), [1000], 6, seed=2, workers=3)
    assert g1.csv_body() == g2.csv_body()
