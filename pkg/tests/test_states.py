import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import pure, rotation
from qcutoff.kernel import GroupFamily, cheb_u, q_param
from qcutoff.states import (
    AngleMixture,
    CentralState,
    Haar,
    PureCharacter,
    RandomTransposition,
    RotationAngle,
    conv_eval,
    eval_irrep,
    l2_operator_distance,
    mean_var_chi1,
    phi_array,
    rotation_trace,
)

states = st.one_of(
    st.builds(lambda N, f: pure(N, -N + 2 * N * f), st.integers(3, 60), st.floats(0, 1)),
    st.builds(lambda N, f: pure(N, N * f, "splus"), st.integers(4, 60), st.floats(0, 1)),
    st.builds(lambda N, th: rotation(N, th), st.integers(3, 60), st.floats(0.01, math.pi)),
    st.builds(lambda N, th: rotation(N, th, "aut"), st.integers(2, 30), st.floats(0.01, math.pi)),
    st.builds(lambda N: CentralState(GroupFamily("splus", N), RandomTransposition()), st.integers(4, 60)),
)


def test_rotation_values():
    s = rotation(10, math.pi)
    assert rotation_trace(10, math.pi) == pytest.approx(6.0)
    assert eval_irrep(s, 1) == pytest.approx(0.6, rel=1e-14)
    assert eval_irrep(s, 2) == pytest.approx(35 / 99, rel=1e-14)
    m = mean_var_chi1(s, 3)
    assert m.mean == pytest.approx(2.16, rel=1e-13)
    assert m.variance == pytest.approx(0.7089536169778594, rel=1e-12)


def test_angle_reduction():
    assert RotationAngle(3 * math.pi).theta == pytest.approx(math.pi)
    assert RotationAngle(-math.pi / 2).theta == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        RotationAngle(2 * math.pi)


def test_state_validation():
    with pytest.raises(ValueError):
        pure(10, 11)
    with pytest.raises(ValueError):
        pure(10, -1, "splus")
    with pytest.raises(ValueError):
        CentralState(GroupFamily("oplus", 10), RandomTransposition())
    with pytest.raises(ValueError):
        CentralState(GroupFamily("splus", 10), RotationAngle(1.0))
    with pytest.raises(ValueError):
        AngleMixture(((5.0, 1.0),))


def test_haar_and_counit():
    h = CentralState(GroupFamily("oplus", 6), Haar())
    assert eval_irrep(h, 3) == 0.0 and eval_irrep(h, 0) == 1.0
    c = pure(6, 6)
    assert c.is_counit
    assert eval_irrep(c, 7) == pytest.approx(1.0)


def test_transposition_l2_closed_form():
    s = CentralState(GroupFamily("splus", 10), RandomTransposition())
    for k in (1, 5, 50, 200):
        val, n, cert = l2_operator_distance(s, k)
        assert val == pytest.approx(0.8**k, rel=1e-12)
        assert n == 1 and cert


def test_aut_rotation_is_even_restriction():
    N, th = 7, 1.1
    s_aut, s_o = rotation(N, th, "aut"), rotation(N, th)
    for n in range(1, 30):
        assert eval_irrep(s_aut, n) == pytest.approx(eval_irrep(s_o, 2 * n), rel=1e-10, abs=1e-300)


@given(states, st.integers(0, 500))
def test_phi_bounded(s, n):
    assert abs(eval_irrep(s, n)) <= 1 + 1e-12


@given(states, st.integers(1, 20), st.integers(1, 20), st.integers(1, 200))
def test_convolution_homomorphism(s, j, k, n):
    a, b, c = conv_eval(s, j, n), conv_eval(s, k, n), conv_eval(s, j + k, n)
    assert c == pytest.approx(a * b, rel=1e-9, abs=1e-300)


@given(st.integers(5, 60), st.floats(0.05, 4.0))
def test_mixture_degeneracy(N, tau):
    theta = 2 * math.asin(math.sqrt(tau) / 2)
    mix = CentralState(GroupFamily("oplus", N), AngleMixture(((tau, 1.0),)))
    rot = rotation(N, theta)
    a, b = phi_array(mix, 100), phi_array(rot, 100)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=0)


@given(states)
def test_phi_array_matches_pointwise(s):
    arr = phi_array(s, 40)
    for n in (0, 1, 7, 40):
        assert arr[n] == pytest.approx(eval_irrep(s, n), rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("N", list(range(4, 101)))
def test_ratio_monotone(N):
    r = phi_array(pure(N, N - 2, "splus"), 500)[1:]
    if N >= 6:
        assert np.all(np.diff(r) < 0)
    else:
        # N - 2 < 4 puts the argument in the oscillating range; only |r| decreases
        assert np.all(np.diff(np.abs(r)) < 0)
    assert np.argmax(np.abs(r)) == 0


@given(st.floats(2.0, 10.0), st.integers(1, 199))
def test_successive_ratio_bounds(t, n):
    # corrected bracket 1/q(t) <= u_{n+1}(t)/u_n(t) <= t
    a = cheb_u(n + 1, t) / cheb_u(n, t)
    assert 1 / q_param(t) * (1 - 1e-12) <= a <= t * (1 + 1e-12)


def test_literal_ratio_lower_bound_is_false():
    t = 3.0
    a2 = cheb_u(3, t) / cheb_u(2, t)
    assert a2 < t - 1 / t
