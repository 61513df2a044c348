import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import FROZEN_TV, FROZEN_TV_SPLUS, pure, rotation
from qcutoff.bounds import char_lower, dsh_upper, kac_window_lower, kac_window_upper, window_k
from qcutoff.kernel import GroupFamily, NumericContext, min_admissible_N, tau_from_theta, threshold_k0, threshold_k1
from qcutoff.oracle import (
    FREE_POISSON,
    SEMICIRCLE,
    density_coeffs,
    exact_tv,
    orthonormality_check,
    spectral_measure,
)
from qcutoff.states import CentralState, Haar, RandomTransposition


@pytest.mark.parametrize("key", sorted(FROZEN_TV))
def test_exact_tv_frozen(key):
    N, t, k = key
    r = exact_tv(pure(N, t), k)
    assert r.status == "ok"
    assert abs(r.value - FROZEN_TV[key]) <= max(r.error_bar, 1e-13) + 1e-13


@pytest.mark.parametrize("key", sorted(FROZEN_TV_SPLUS))
def test_exact_tv_frozen_splus(key):
    N, t, k = key
    r = exact_tv(pure(N, t, "splus"), k)
    tol = 1e-13 if key == (10, 8, 20) else 1e-9
    assert abs(r.value - FROZEN_TV_SPLUS[key]) <= r.error_bar + tol


def test_divergent_cases():
    assert exact_tv(pure(10, 10), 3).divergent
    assert exact_tv(CentralState(GroupFamily("splus", 10), RandomTransposition()), 5).divergent
    assert exact_tv(pure(10, 8), 10).divergent
    # a single step of a pure state inside the bulk is a point mass in x
    assert exact_tv(pure(10, 1), 1).divergent


def test_haar_is_zero():
    r = exact_tv(CentralState(GroupFamily("oplus", 5), Haar()), 3)
    assert r.value == 0.0 and r.status == "ok"


def test_density_tail_bound():
    d = density_coeffs(pure(10, 6), 20)
    assert d.convergent and d.tail_bound <= 1e-13
    assert not density_coeffs(pure(10, 6), 4).convergent


@pytest.mark.parametrize("kind", ["oplus", "splus"])
def test_orthonormality(kind):
    rep = orthonormality_check(GroupFamily(kind, 10), max_n=30)
    assert rep.passed
    assert rep.detail["max_deviation"] <= 1e-10


def test_spectral_moments():
    sc = spectral_measure(GroupFamily("oplus", 5))
    fp = spectral_measure(GroupFamily("splus", 5))
    assert sc.kind == SEMICIRCLE and fp.kind == FREE_POISSON
    assert [round(sc.moment(j), 12) for j in range(5)] == [1, 0, 1, 0, 2]
    assert [round(fp.moment(j), 12) for j in range(4)] == [1, 1, 2, 5]


def test_quad_order_does_not_move_value():
    a = exact_tv(pure(10, 6), 8)
    b = exact_tv(pure(10, 6), 8, NumericContext(quad_order=32))
    assert abs(a.value - b.value) <= a.error_bar + b.error_bar


bounded_pure = st.builds(lambda N, f: (N, 2.05 + f * (N - 2.1)), st.integers(5, 14), st.floats(0, 1))


@given(bounded_pure, st.integers(0, 15))
def test_exact_tv_in_unit_interval_and_monotone(Nt, j):
    N, t = Nt
    s = pure(N, t)
    k = threshold_k0(GroupFamily("oplus", N), t) + j
    a, b = exact_tv(s, k), exact_tv(s, k + 1)
    for r in (a, b):
        assert r.status == "ok"
        assert -r.error_bar <= r.value <= 1 + r.error_bar
    assert b.value <= a.value + a.error_bar + b.error_bar


@given(bounded_pure, st.integers(0, 15))
def test_sandwich(Nt, j):
    N, t = Nt
    s = pure(N, t)
    k = threshold_k0(GroupFamily("oplus", N), t) + j
    r, up, lo = exact_tv(s, k), dsh_upper(s, k), char_lower(s, k)
    if up.finite:
        assert r.value <= up.value + r.error_bar
    assert lo.value <= r.value + r.error_bar


@pytest.mark.parametrize("N,theta", [(8, math.pi), (10, math.pi), (10, math.pi / 2), (12, math.pi / 3)])
@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_window_consistency(N, theta, c):
    tau = tau_from_theta(theta)
    if N < min_admissible_N(tau):
        pytest.skip("inadmissible size")
    s = rotation(N, theta)
    k1 = threshold_k1(N, tau)
    r = exact_tv(s, window_k(k1, c, N, "upper"))
    assert r.value <= kac_window_upper(N, theta, c, c, tau=tau).value + r.error_bar
    kl = window_k(k1, c, N, "lower")
    if kl >= 1:
        low = exact_tv(s, kl)
        # below the boundedness threshold there is no density to compare
        if not low.divergent:
            assert low.value >= kac_window_lower(N, theta, c, tau=tau).value - low.error_bar
