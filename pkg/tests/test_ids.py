import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsbec.errors import DomainError, FitError, ValidationError
from lsbec.ids import (EnsembleReference, IdsCurve, InfiniteGammaReference, bose_integral,
                       build_reference, critical_density, ensemble_ids, finite_ids,
                       free_reference, lifshitz_fit, limiting_ids_infinite_gamma, solve_mu_hat,
                       value_window)
from lsbec.sampler import ModelParameters, configuration_from_points, sample_configuration
from lsbec.spectrum import eigenvalues


def exact_curve(energies, nu=1.0):
    e = np.asarray(energies, dtype=float)
    return IdsCurve(e, limiting_ids_infinite_gamma(e, nu), np.zeros(e.size), 1)


def test_finite_ids_examples():
    empty = configuration_from_points([], math.pi)
    spec = eigenvalues(empty, 1.0, energy_cutoff=10.0)
    curve = finite_ids(spec, math.pi, [4.5])
    assert curve.values[0] == pytest.approx(2 / math.pi)
    c = sample_configuration(30.0, 1.0, 2)
    spec = eigenvalues(c, 5.0, energy_cutoff=5.0)
    assert finite_ids(spec, 30.0, [spec.eigenvalues[0]]).values[0] == 0.0


def test_closed_form_values():
    x = math.exp(-1)
    assert limiting_ids_infinite_gamma(math.pi ** 2, 1.0) == pytest.approx(x / (1 - x))
    x = math.exp(-0.5)
    high = limiting_ids_infinite_gamma(4 * math.pi ** 2, 1.0)
    assert high == pytest.approx(x / (1 - x))
    assert high >= limiting_ids_infinite_gamma(math.pi ** 2, 1.0)
    assert limiting_ids_infinite_gamma(0.0, 1.0) == 0.0


@given(st.floats(0.01, 100.0), st.floats(0.2, 3.0))
def test_closed_form_matches_partial_sums(energy, nu):
    k = np.arange(1, 20_000)
    partial = nu * np.exp(-nu * k * math.pi / math.sqrt(energy)).sum()
    assert limiting_ids_infinite_gamma(energy, nu) == pytest.approx(partial, rel=1e-10, abs=1e-300)
    assert limiting_ids_infinite_gamma(energy, nu) <= math.sqrt(energy) / math.pi


def test_curve_validation():
    with pytest.raises(ValidationError):
        IdsCurve(np.array([1.0, 0.5]), np.zeros(2), np.zeros(2), 1)
    with pytest.raises(ValidationError):
        IdsCurve(np.array([1.0]), np.array([-1.0]), np.zeros(1), 1)


def test_ensemble_is_deterministic():
    p = ModelParameters(1.0, 5.0, 1.0, 1.0, 200)
    grid = np.linspace(0.1, 3.0, 12)
    a = ensemble_ids(p, grid, 2, seed=4)
    b = ensemble_ids(p, grid, 2, seed=4)
    assert a.to_csv() == b.to_csv()
    assert a.free_bound_violations() == 0


def test_weak_coupling_is_nearly_free():
    p = ModelParameters(1.0, 1e-12, 1.0, 1.0, 500)
    grid = np.array([0.5, 1.0, 2.0, 4.0])
    curve = ensemble_ids(p, grid, 4, seed=1)
    free = np.sqrt(grid) / math.pi
    assert np.all(curve.values <= free)
    assert np.all(free - curve.values <= 2.0 / 500 + 2 * curve.stderr)


def test_strong_coupling_matches_closed_form():
    p = ModelParameters(1.0, 1e8, 1.0, 1.0, 2000)
    curve = ensemble_ids(p, [0.5], 100, seed=3)
    ref = limiting_ids_infinite_gamma(0.5, 1.0)
    assert abs(curve.values[0] - ref) <= 3 * curve.stderr[0] + 2.0 / 2000


def test_fit_on_exact_tail():
    # pi nu / sqrt(E) >= 5 keeps the geometric correction below e^-5
    grid = (math.pi / np.linspace(5, 12, 20)) ** 2
    fit = lifshitz_fit(exact_curve(np.sort(grid)), (grid.min(), grid.max()))
    assert fit.slope == pytest.approx(math.pi, rel=0.02)
    assert fit.reliable


def test_fit_flags_bad_models():
    e = np.linspace(0.1, 1.0, 10)
    const = lifshitz_fit(IdsCurve(e, np.full(10, 0.3), np.zeros(10), 1), (0.1, 1.0))
    assert not const.reliable
    free = lifshitz_fit(IdsCurve(e, free_reference(e), np.zeros(10), 1), (0.1, 1.0))
    assert free.slope < 1.0
    with pytest.raises(FitError):
        lifshitz_fit(exact_curve(e[:3]), (0.1, 1.0))
    with pytest.raises(FitError):
        value_window(exact_curve(e), 10.0, 20.0)


def test_critical_density_examples():
    zero = critical_density(lambda e: np.zeros_like(np.asarray(e, float)), 1.0)
    assert zero.value == 0.0 and not zero.divergent
    assert critical_density(free_reference, 1.0).divergent
    assert critical_density(free_reference, 1.0, "log_grid").divergent
    ref = InfiniteGammaReference(1.0)
    a = critical_density(ref, 1.0)
    b = critical_density(ref, 1.0, "log_grid")
    assert a.value > 0 and not a.divergent
    assert abs(a.value - b.value) <= 1e-5 * a.value
    values = [critical_density(ref, beta).value for beta in (0.5, 1.0, 2.0, 4.0)]
    assert np.all(np.diff(values) < 0)


def test_mu_hat():
    ref = InfiniteGammaReference(1.0)
    rho_c = critical_density(ref, 1.0).value
    mu = solve_mu_hat(rho_c / 2, 1.0, ref)
    assert mu < 0
    assert abs(bose_integral(ref, 1.0, mu).value - rho_c / 2) < 1e-10 * rho_c / 2
    assert solve_mu_hat(1e-6 * rho_c, 1.0, ref) < -1.0
    near = solve_mu_hat(rho_c * (1 - 1e-4), 1.0, ref)
    assert -0.05 < near < 0
    with pytest.raises(DomainError):
        solve_mu_hat(2 * rho_c, 1.0, ref)


def test_ensemble_reference_is_usable():
    p = ModelParameters(1.0, 5.0, 1.0, 1.0, 100)
    ref = build_reference(p, "ensemble", box_length=5000.0, R=8, seed=2)
    assert isinstance(ref, EnsembleReference)
    rho_c = critical_density(ref, 1.0)
    assert 0 < rho_c.value < 1 and not rho_c.divergent
    e = np.geomspace(1e-6, 100, 50)
    assert np.all(ref(e) <= np.sqrt(e) / math.pi * (1 + 1e-9))
