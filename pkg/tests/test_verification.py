import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from twophoton import ConfigurationError, InvalidParameterError, make_params
from twophoton import verification as vf


@pytest.fixture
def p():
    return make_params(0.0, 1.0)


def test_smearing_spec_validation():
    with pytest.raises(InvalidParameterError):
        vf.SmearingSpec("X", 0.0, 0.25)
    with pytest.raises(InvalidParameterError):
        vf.SmearingSpec("B", 0.0, -0.1)
    with pytest.raises(InvalidParameterError):
        vf.SmearingSpec("W", 0.0, 0.25, -0.5, 0.25)


def test_w_self_overlap(p):
    spec = vf.SmearingSpec("W", 0.0, 0.25, -2.0, 0.25)
    num, ana, na, _ = vf.smeared_overlap(p, spec, spec)
    assert_allclose(num.real, ana, rtol=1e-3)
    assert_allclose(na, ana, rtol=1e-3)
    assert vf.orthonormality_check(p, spec, spec) < 1e-3


def test_w_shifted_overlap(p):
    a = vf.SmearingSpec("W", 0.0, 0.25, -2.0, 0.25)
    b = vf.SmearingSpec("W", 0.2, 0.25, -2.15, 0.2)
    num, ana, _, _ = vf.smeared_overlap(p, a, b)
    assert 0 < ana < 0.9 * vf.smeared_overlap(p, a, a)[1]
    assert abs(num - ana) < 1e-3 * ana


def test_b_self_and_separated(p):
    b = vf.SmearingSpec("B", 0.0, 0.25)
    assert vf.orthonormality_check(p, b, b) < 1e-3
    far = vf.SmearingSpec("B", 10 * 0.25, 0.25)
    num, ana, na, nb = vf.smeared_overlap(p, b, far)
    assert abs(num) / math.sqrt(na * nb) < 1e-6
    assert_allclose(ana / math.sqrt(na * nb), math.exp(-25.0), rtol=1e-6)


def test_w_b_cross(p):
    w = vf.SmearingSpec("W", 0.0, 0.25, -2.0, 0.25)
    b = vf.SmearingSpec("B", 0.0, 0.25)
    num, ana, na, nb = vf.smeared_overlap(p, w, b)
    assert ana == 0.0
    assert abs(num) / math.sqrt(na * nb) < 1e-3


def test_box_too_small(p):
    w = vf.SmearingSpec("W", 0.0, 0.25, -2.0, 0.25)
    with pytest.raises(ConfigurationError):
        vf.orthonormality_check(p, w, w, box_half_width=10.0)


def test_completeness_default_and_monotone(p):
    fam = vf.seeded_test_family(p, seed=0)
    errs = [vf.completeness_reconstruct(p, fam, vf.default_cutoffs(p, k)).l2_error_relative for k in (10, 20, 40, 80)]
    assert errs[2] < 1e-2
    assert all(a > b for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_completeness_other_seeds(p, seed):
    rep = vf.completeness_reconstruct(p, vf.seeded_test_family(p, seed=seed))
    assert rep.l2_error_relative < 1e-2
    assert rep.w_fraction + rep.b_fraction <= 1 + 1e-6


def test_bound_state_function(p):
    fn = vf.bound_state_test_function(p)
    rep = vf.completeness_reconstruct(p, fn)
    assert rep.b_fraction > 0.99
    assert rep.l2_error_relative < 1e-6
    assert vf.completeness_reconstruct(p, fn, include_b=False).l2_error_relative > 0.5


def test_broad_relative_width_is_w_dominated(p):
    term = vf.GaussianTerm(1.0 + 0j, 0.0, 2.0, 0.0, 6.0, 2.0)
    rep = vf.completeness_reconstruct(p, vf.TestFunction((term,)))
    assert rep.w_fraction > 0.9
    assert rep.l2_error_relative < 1e-2


def test_zero_function(p):
    rep = vf.completeness_reconstruct(p, vf.TestFunction(()))
    assert rep.l2_error_relative == 0.0
    zero = vf.TestFunction((vf.GaussianTerm(0j, 0.0, 2.0, 0.0, 2.0, 0.0),))
    assert vf.completeness_reconstruct(p, zero).l2_error_relative == 0.0


def test_asymmetric_function_rejected(p):
    class Lopsided(vf.GaussianTerm):
        def rel(self, params, x):
            return np.exp(-0.5 * (np.asarray(x) - 1.0) ** 2)

    with pytest.raises(InvalidParameterError):
        vf.completeness_reconstruct(p, vf.TestFunction((Lopsided(1.0, 0.0, 2.0, 0.0, 2.0, 0.0),)))


def test_coarse_grids_rejected(p):
    fam = vf.seeded_test_family(p, seed=0)
    with pytest.raises(ConfigurationError):
        vf.completeness_reconstruct(p, fam, vf.Cutoffs(40.0, 0.05, 0.5))
    with pytest.raises(ConfigurationError):
        vf.completeness_reconstruct(p, fam, vf.Cutoffs(40.0, 0.5, 0.05))


def test_b_fraction_cross_validation(p):
    for seed in (0, 4):
        fam = vf.seeded_test_family(p, seed=seed)
        rep = vf.completeness_reconstruct(p, fam)
        assert abs(rep.b_fraction - vf.b_fraction_closed_form(p, fam)) < 1e-4


@pytest.mark.parametrize("sigma", [0.01, 0.1, 1.0])
def test_unitarity_over_widths(p, sigma):
    pk = vf.gaussian_spectral_packet(p, 0.0, -12 * sigma - 0.5, sigma, sigma, 0.3)
    assert_allclose(pk.norm(), 1.0, rtol=1e-12)
    assert vf.unitarity_check(p, pk) < 1e-10


def test_unitarity_requires_normalised(p):
    pk = vf.gaussian_spectral_packet(p, 0.0, -1.0, 0.2, 0.2)
    pk.w *= 2
    with pytest.raises(ConfigurationError):
        vf.unitarity_check(p, pk)
