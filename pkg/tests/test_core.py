import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twophoton import (InvalidParameterError, PairKinematics, even_odd_coupling, from_bar,
                       kinematics_from_momenta, make_params, to_bar)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("omega, gamma, v", [(0.0, 1.0, 1.0), (5.0, 4.0, 2.0)])
def test_make_params_coupling(omega, gamma, v):
    p = make_params(omega, gamma)
    assert p.coupling_v == v
    assert p.coupling_v ** 2 == pytest.approx(p.gamma, rel=1e-15)


@pytest.mark.parametrize("gamma", [-1.0, 0.0, float("nan"), float("inf")])
def test_make_params_rejects_bad_gamma(gamma):
    with pytest.raises(InvalidParameterError):
        make_params(0.0, gamma)


def test_make_params_rejects_bad_omega():
    with pytest.raises(InvalidParameterError):
        make_params(float("nan"), 1.0)


def test_params_are_immutable(unit_params):
    with pytest.raises(AttributeError):
        unit_params.gamma = 2.0


@pytest.mark.parametrize("v_bar, expected", [(1.0, math.sqrt(2.0)), (0.5, math.sqrt(2.0) / 2), (math.sqrt(2.0), 2.0)])
def test_even_odd_coupling(v_bar, expected):
    assert even_odd_coupling(v_bar) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("v_bar", [0.0, -1.0])
def test_even_odd_coupling_rejects_non_positive(v_bar):
    with pytest.raises(InvalidParameterError):
        even_odd_coupling(v_bar)


def test_kinematics_examples():
    kin = kinematics_from_momenta(2, 0)
    assert (kin.k, kin.p, kin.e_total, kin.delta) == (0.0, 2.0, 2.0, -1.0)
    kin = kinematics_from_momenta(1, 1)
    assert (kin.k, kin.p, kin.e_total, kin.delta) == (1.0, 1.0, 2.0, 0.0)
    kin = kinematics_from_momenta(-1, 3)
    assert (kin.e_total, kin.delta) == (2.0, -2.0)


def test_pair_kinematics_rejects_unsorted():
    with pytest.raises(InvalidParameterError):
        PairKinematics(2.0, 1.0)


@given(finite, finite)
def test_kinematics_swap_invariant_and_consistent(k, p):
    a, b = kinematics_from_momenta(k, p), kinematics_from_momenta(p, k)
    assert a == b
    assert a.delta <= 0
    assert a.e_total == pytest.approx(a.k + a.p, abs=1e-12)
    back = PairKinematics.from_energy(a.e_total, a.delta)
    assert back.k == pytest.approx(a.k, abs=1e-12)
    assert back.p == pytest.approx(a.p, abs=1e-12)


def test_from_energy_folds_positive_delta():
    assert PairKinematics.from_energy(2.0, 1.0) == PairKinematics.from_energy(2.0, -1.0)


@pytest.mark.parametrize("quantity, value, expected", [
    ("energy", 4.0, 2.0),
    ("detuning", -1.0, -1.0),
    ("length", 3.0, 3.0),
    ("amplitude", 2.0, 2.0),
])
def test_to_bar_examples(quantity, value, expected):
    p = make_params(1.0, 2.0)
    assert to_bar(p, quantity, value) == pytest.approx(expected)


def test_to_bar_gamma_scaling():
    p = make_params(0.5, 4.0)
    assert to_bar(p, "energy", 3.0) == pytest.approx(1.0)
    assert to_bar(p, "detuning", 1.0) == pytest.approx(0.5)
    assert to_bar(p, "length", 1.0) == pytest.approx(2.0)


def test_to_bar_unknown_quantity(unit_params):
    with pytest.raises(ValueError):
        to_bar(unit_params, "momentum", 1.0)
    with pytest.raises(ValueError):
        from_bar(unit_params, "momentum", 1.0)


@given(finite, positive, st.sampled_from(["energy", "detuning", "length", "amplitude"]), finite)
def test_bar_round_trip(omega, gamma, quantity, value):
    p = make_params(omega, gamma)
    back = from_bar(p, quantity, to_bar(p, quantity, value))
    assert back == pytest.approx(value, rel=1e-12, abs=1e-12 * (1.0 + abs(omega)))


def test_bar_vectorised(shifted_params):
    e = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(from_bar(shifted_params, "energy", to_bar(shifted_params, "energy", e)), e, atol=1e-14)
