import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from lsbec.errors import DomainError, InsufficientSpectrumError, ParameterError
from lsbec.sampler import configuration_from_points, sample_configuration
from lsbec.spectrum import Spectrum, eigenvalues
from lsbec.thermo import (bose, bose_level_sum, condensate_profile, heat_trace, occupations,
                          solve_chemical_potential, thermal_spectrum, thermo_state, trace_spectrum,
                          window_occupation)


def levels(*values, cutoff=None):
    e = np.array(values, dtype=float)
    # a huge box keeps the free-level tail bound out of the way
    return Spectrum(e, cutoff if cutoff is not None else 1e6, True, 1e-3)


def test_bose_values():
    assert bose(math.log(2), 1.0) == pytest.approx(1.0)
    assert bose(-5.0, 1.0) == 0.0
    assert bose(math.log(1.5), 1.0) == pytest.approx(2.0)
    assert bose(0.0, 1.0) == 0.0


def test_single_level_mu():
    mu = solve_chemical_potential(levels(1.0), 2.0, 1)
    assert mu == pytest.approx(1.0 - math.log(2) / 2.0, abs=1e-12)


def test_two_level_mu_matches_bisection():
    mu = solve_chemical_potential(levels(1.0, 2.0), 1.0, 1)
    ref = brentq(lambda m: 1 / math.expm1(1 - m) + 1 / math.expm1(2 - m) - 1, -10, 1 - 1e-12,
                 xtol=1e-15)
    assert mu == pytest.approx(ref, abs=1e-12)


def test_ground_level_absorbs_large_n():
    n = 10**6
    mu = solve_chemical_potential(levels(1.0, 2.0), 1.0, n)
    assert mu < 1.0
    assert 1.0 - mu == pytest.approx(math.log1p(1.0 / n), rel=1e-5)


def test_occupation_examples():
    assert occupations(levels(1.0), 1 - math.log(2), 1.0)[0] == pytest.approx(1.0)
    occ = occupations(levels(1.0, 2.0), 0.0, 1.0)
    np.testing.assert_allclose(occ, [1 / math.expm1(1), 1 / math.expm1(2)])
    assert np.all(np.diff(occupations(levels(1.0, 2.0, 3.0), 0.3, 1.0)) < 0)
    with pytest.raises(DomainError):
        occupations(levels(1.0, 2.0), 1.0, 1.0)


def test_profile_examples():
    prof = condensate_profile(levels(1.0, 2.0), [3.0, 1.0], 4, [0.0, 0.5, 1.0])
    assert prof["profile"][0.5] == 0.75
    assert prof["profile"][0.0] == prof["ground"] == 0.75
    assert prof["profile"][1.0] == 1.0


@given(st.integers(0, 10_000), st.sampled_from([0.5, 1.0, 3.0]), st.integers(10, 400))
@settings(max_examples=25, deadline=None)
def test_sum_rule_holds(seed, beta, n):
    c = sample_configuration(n / 0.7, 1.0, seed)
    spec = thermal_spectrum(c, 5.0, beta, n)
    mu = solve_chemical_potential(spec, beta, n)
    assert mu < spec.eigenvalues[0]
    total = bose_level_sum(spec, beta, mu)
    assert abs(total.value - n) <= 1e-8 * n
    occ = occupations(spec, mu, beta)
    assert np.all(np.diff(occ) <= 0)


def test_grid_pipeline_matches_full_spectrum():
    # reference: every level up to where B is negligible, no grid at all
    n, beta = 300, 1.0
    c = sample_configuration(n / 0.5, 1.0, 4)
    full = eigenvalues(c, 5.0, energy_cutoff=60.0)
    mu_full = solve_chemical_potential(full, beta, n)
    spec = thermal_spectrum(c, 5.0, beta, n)
    mu = solve_chemical_potential(spec, beta, n)
    assert mu == pytest.approx(mu_full, abs=5e-3)
    n1 = occupations(spec, mu, beta)[0]
    assert n1 / n == pytest.approx(occupations(full, mu_full, beta)[0] / n, abs=5e-3)


def test_window_occupation_is_monotone():
    n, beta = 2000, 1.0
    c = sample_configuration(n / 0.3, 1.0, 2)
    spec = thermal_spectrum(c, 5.0, beta, n)
    mu = solve_chemical_potential(spec, beta, n)
    widths = [0.0, 1e-3, 1e-2, 0.1, 1.0, 100.0]
    occ = [window_occupation(spec, beta, mu, w) for w in widths]
    assert np.all(np.diff(occ) >= -1e-9)
    assert occ[0] == pytest.approx(occupations(spec, mu, beta)[0])
    assert occ[-1] == pytest.approx(n, rel=1e-6)


def test_heat_trace_free_box():
    empty = configuration_from_points([], math.pi)
    trace = heat_trace(trace_spectrum(empty, 1.0, 1.0), 1.0)
    ref = sum(math.exp(-j * j) for j in range(1, 50)) / math.pi
    assert trace.value == pytest.approx(ref, abs=trace.error + 1e-12)
    assert ref == pytest.approx(0.12297, abs=1e-5)


def test_heat_trace_cold_limit():
    c = sample_configuration(50.0, 1.0, 6)
    spec = trace_spectrum(c, 5.0, 100.0)
    trace = heat_trace(spec, 100.0)
    e1 = spec.eigenvalues[0]
    ground = math.exp(-100 * e1) / 50.0
    assert trace.value >= ground
    assert trace.value == pytest.approx(ground, rel=0.5)


def test_heat_trace_below_free_value():
    for i in range(5):
        c = sample_configuration(100.0, 1.0, 9, i)
        t = heat_trace(trace_spectrum(c, 5.0, 1.0), 1.0)
        assert t.value + t.error <= 1 / math.sqrt(4 * math.pi)


def test_insufficient_spectrum_is_reported():
    c = sample_configuration(100.0, 1.0, 1)
    short = eigenvalues(c, 5.0, n_levels=3)
    with pytest.raises(InsufficientSpectrumError):
        heat_trace(short, 1.0)
    with pytest.raises(InsufficientSpectrumError):
        solve_chemical_potential(short, 1.0, 1000)
    with pytest.raises(ParameterError):
        solve_chemical_potential(short, -1.0, 10)


def test_thermo_state_serializes():
    c = sample_configuration(400.0, 1.0, 3)
    spec = thermal_spectrum(c, 5.0, 1.0, 400)
    state = thermo_state(spec, 1.0, 400, levels=(1, 2))
    assert state.mu < spec.eigenvalues[0]
    assert state.total == pytest.approx(400, rel=1e-8)
    assert state.level_fractions[1] == state.ground_fraction
    assert '"mu"' in state.to_json()
