import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import jn_zeros

from spindir.encoding import minimal_m, parallel_state, product_state
from spindir.fidelity import (
    BESSEL_J0_FIRST_ZERO,
    asymptote,
    average_fidelity,
    build_kernel,
    closed_form,
    deficit,
    dense_kernel,
    f_antiparallel,
    f_antiparallel_even,
    f_dim,
    f_general,
    f_optimal,
    f_parallel,
    kernel_fidelity,
    product_fidelity_by_m,
    strategy_report,
)
from spindir.specfun import HalfInteger, wigner_small_d_sum

HALF = Fraction(1, 2)


def test_kernel_one_spin():
    k = build_kernel(1, HALF)
    assert k.size == 1
    assert k.matrix.diag[0] == pytest.approx(2 / 3, abs=1e-15)
    assert average_fidelity(parallel_state(1), k) == pytest.approx(2 / 3, abs=1e-15)


def test_kernel_two_spins():
    assert build_kernel(2, 1).matrix.diag[0] == pytest.approx(0.75, abs=1e-15)
    k = build_kernel(2, 0)
    # exact: [[1/2, sqrt(3)/6], [sqrt(3)/6, 1/2]]
    np.testing.assert_allclose(k.matrix.to_dense(), [[0.5, 3 ** 0.5 / 6], [3 ** 0.5 / 6, 0.5]],
                               atol=1e-15)
    assert k.max_eigenvalue() == pytest.approx(0.7887, abs=5e-5)


def test_kernel_three_spins_exact():
    # exact 2x2 kernel for N=3, m=1/2 from hand-derived d-functions
    k = build_kernel(3, HALF).matrix.to_dense()
    np.testing.assert_allclose(k, [[2 / 3, 2 ** 0.5 / 6], [2 ** 0.5 / 6, 8 / 15]], atol=1e-15)
    assert f_antiparallel(3) == pytest.approx(38 / 45, abs=1e-15)
    assert f_optimal(3) == pytest.approx(0.6 + 6 ** 0.5 / 10, abs=1e-14)


@pytest.mark.parametrize("n, m2", [(2, 0), (3, 1), (4, 0), (5, 1), (5, 3), (6, 2)])
def test_kernel_entries_against_adaptive_quadrature(n, m2):
    # independent route: factorial-sum d-functions integrated adaptively in beta
    m = Fraction(m2, 2)
    js = [Fraction(j2, 2) for j2 in range(m2, n + 1, 2)]
    dense = dense_kernel(n, m)
    for a, ja in enumerate(js):
        for b, jb in enumerate(js):
            integrand = lambda beta: (math.sin(beta) / 2 * (1 + math.cos(beta)) / 2  # noqa: E731
                                      * wigner_small_d_sum(ja, m, m, beta)
                                      * wigner_small_d_sum(jb, m, m, beta))
            ref = math.sqrt((2 * ja + 1) * (2 * jb + 1)) * quad(integrand, 0, math.pi, epsabs=1e-14)[0]
            assert dense[a, b] == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 41))
def test_kernel_invariants(n):
    for m in {minimal_m(n), HalfInteger(n)}:
        dense = dense_kernel(n, m)
        assert np.allclose(dense, dense.T, atol=1e-14)
        idx = np.arange(dense.shape[0])
        off = np.abs(np.subtract.outer(idx, idx)) > 1
        assert np.all(np.abs(dense[off]) < 1e-12)
        k = build_kernel(n, m)
        assert np.all(k.matrix.diag >= -1e-14) and np.all(k.matrix.offdiag >= -1e-14)
        assert k.max_eigenvalue() <= 1 + 1e-12


def test_average_fidelity_examples():
    assert average_fidelity(parallel_state(3), build_kernel(3, HalfInteger(3))) == pytest.approx(0.8, abs=1e-14)
    assert average_fidelity(product_state(2, 0), build_kernel(2, 0)) == pytest.approx(
        (3 + 3 ** 0.5) / 6, abs=1e-14)
    assert average_fidelity(product_state(6, 0), build_kernel(6, 0)) == pytest.approx(0.9235, abs=5e-5)
    with pytest.raises(ValueError):
        average_fidelity(product_state(2, 0), build_kernel(2, 1))


@pytest.mark.parametrize("n", range(1, 41))
def test_parallel_consistency(n):
    k = build_kernel(n, HalfInteger(n))
    assert average_fidelity(parallel_state(n), k) == pytest.approx((n + 1) / (n + 2), abs=1e-12)


def test_closed_forms():
    assert f_parallel(2) == 0.75
    assert f_parallel(1) == pytest.approx(2 / 3)
    assert f_parallel(7) == pytest.approx(0.8889, abs=5e-5)
    assert f_antiparallel_even(2) == pytest.approx(0.7887, abs=5e-5)
    assert f_antiparallel_even(4) == pytest.approx(0.8848, abs=5e-5)
    assert f_antiparallel_even(6) == pytest.approx(0.9235, abs=5e-5)
    assert f_antiparallel(3) == pytest.approx(0.8444, abs=5e-5)
    assert f_antiparallel(5) == pytest.approx(0.9069, abs=5e-5)
    assert f_antiparallel(7) == pytest.approx(0.9342, abs=5e-5)
    assert f_optimal(2) == pytest.approx(0.7887, abs=5e-5)
    assert f_optimal(5) == pytest.approx(0.9114, abs=5e-5)
    assert f_optimal(7) == pytest.approx(0.9429, abs=5e-5)
    assert f_general(2) == pytest.approx(0.8)
    assert f_general(4) == pytest.approx(0.9412, abs=5e-5)
    assert f_general(6) == pytest.approx(0.9846, abs=5e-5)
    assert f_dim(4) == pytest.approx(0.8)


def test_closed_form_guards():
    with pytest.raises(ValueError):
        f_antiparallel_even(3)
    with pytest.raises(ValueError):
        f_antiparallel(1)
    with pytest.raises(ValueError):
        f_general(63)


def test_asymptote_formulas():
    assert asymptote("P", 100) == pytest.approx(0.99)
    assert asymptote("A", 10) == pytest.approx(0.95)
    assert asymptote("G", 10) == 1 - 2.0 ** -10
    assert asymptote("O", 10) == pytest.approx(1 - BESSEL_J0_FIRST_ZERO ** 2 / 100)
    assert BESSEL_J0_FIRST_ZERO == pytest.approx(jn_zeros(0, 1)[0], abs=1e-15)


def test_optimal_deficit_approaches_bessel_zero():
    # leading behaviour xi^2/N^2; with the (N+3) shift of the largest Legendre
    # root the scaled deficit is already within 0.1% at N = 100
    xi2 = BESSEL_J0_FIRST_ZERO ** 2
    assert (100 + 3) ** 2 * deficit("O", 100) == pytest.approx(xi2, rel=1e-3)
    scaled = [n * n * deficit("O", n) for n in range(20, 121, 10)]
    assert np.all(np.diff(scaled) > 0) and scaled[-1] < xi2
    assert 120 ** 2 * deficit("O", 120) == pytest.approx(xi2, rel=0.05)


def test_antiparallel_deficit_scaling():
    assert 100 * deficit("A", 100) == pytest.approx(0.5, rel=0.05)
    assert 100 * deficit("P", 100) == pytest.approx(100 / 102)


@pytest.mark.parametrize("n", range(1, 41))
def test_route_agreement_optimal(n):
    assert abs(f_optimal(n) - kernel_fidelity("O", n)) < 1e-10


@pytest.mark.parametrize("n", range(2, 41, 2))
def test_route_agreement_antiparallel(n):
    assert abs(f_antiparallel_even(n) - f_antiparallel(n)) < 1e-12


@pytest.mark.parametrize("n", range(2, 41))
def test_strategy_ordering(n):
    p, a, o, g = (closed_form(s, n) for s in "PAOG")
    assert p < a <= o < g
    if n == 2:
        assert abs(a - o) < 1e-12
    else:
        assert o - a > 1e-6


@pytest.mark.parametrize("strategy", "PAOG")
def test_monotone_and_bounded(strategy):
    ns = range(2, 41) if strategy != "G" else range(2, 40)
    values = [closed_form(strategy, n) for n in ns]
    assert np.all(np.diff(values) > 0)
    assert max(values) < 1


@pytest.mark.parametrize("n", range(2, 11))
def test_minimal_m_is_best_product(n):
    by_m = product_fidelity_by_m(n)
    best = max(by_m, key=by_m.get)
    assert best == minimal_m(n)
    others = [v for m, v in by_m.items() if m != best]
    assert all(v < by_m[best] for v in others)


def test_strategy_report():
    rep = strategy_report("O", 5)
    assert rep.f_closed == pytest.approx(0.9114, abs=5e-5)
    assert rep.kernel_gap < 1e-10
    rep = strategy_report("G", 7)
    assert rep.f_closed == pytest.approx(0.9922, abs=5e-5)
    assert rep.kernel_gap < 1e-12
    assert strategy_report("G", 20).f_kernel is None
