import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsbec.errors import ParameterError, ValidationError
from lsbec.sampler import (ImpurityConfiguration, ModelParameters, configuration_from_points,
                           realization_rng, sample_configuration)


def test_empty_fraction_matches_poisson():
    # P(no atom in a unit box at unit intensity) = 1/e
    n = 20_000
    empty = sum(len(sample_configuration(1.0, 1.0, 11, i)) == 0 for i in range(n))
    p = math.exp(-1)
    assert abs(empty / n - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_mean_atom_count():
    n = 5_000
    counts = np.array([len(sample_configuration(10.0, 2.0, 3, i)) for i in range(n)])
    assert abs(counts.mean() - 20.0) < 3 * math.sqrt(20.0 / n)


@given(st.integers(0, 2**32), st.integers(0, 1000),
       st.floats(0.1, 50.0), st.floats(0.1, 5.0))
@settings(max_examples=60, deadline=None)
def test_same_seed_same_atoms(seed, index, length, nu):
    a = sample_configuration(length, nu, seed, index)
    b = sample_configuration(length, nu, seed, index)
    assert a == b
    assert np.array_equal(a.atoms, b.atoms)
    half = length / 2
    if len(a):
        assert a.atoms[0] > -half and a.atoms[-1] < half
        assert np.all(np.diff(a.atoms) > 0)
    assert a.gaps.sum() == pytest.approx(length, rel=1e-12)


def test_streams_do_not_depend_on_order():
    late = sample_configuration(30.0, 1.0, 5, 17)
    for i in range(17):
        sample_configuration(30.0, 1.0, 5, i)
    assert sample_configuration(30.0, 1.0, 5, 17) == late
    assert realization_rng(5, 1).random() != realization_rng(5, 2).random()


def test_from_points_sorts():
    c = configuration_from_points([0.3, -0.2], 1.0)
    assert c.atoms.tolist() == [-0.2, 0.3]


@pytest.mark.parametrize("points", [[0.5], [-0.5], [0.1, 0.1], [float("nan")]])
def test_from_points_rejects(points):
    with pytest.raises(ValidationError):
        configuration_from_points(points, 1.0)


def test_empty_configuration_has_one_gap():
    c = configuration_from_points([], 2.0)
    assert c.gaps.tolist() == [2.0]


def test_json_round_trip():
    c = sample_configuration(12.0, 1.5, 4, 2)
    assert ImpurityConfiguration.from_json(c.to_json()) == c


def test_parameters_validate():
    p = ModelParameters(1.0, 5.0, 1.0, 0.5, 1000)
    assert p.box_length == 2000.0
    assert p.with_size(10).box_length == 20.0
    with pytest.raises(ParameterError):
        ModelParameters(1.0, -5.0, 1.0, 0.5, 1000)
    with pytest.raises(ParameterError):
        ModelParameters(1.0, 5.0, 1.0, 0.5, 0)
    with pytest.raises(ParameterError):
        sample_configuration(-1.0, 1.0, 0)
