import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from circlewalk.configs import CircleConfig, StateSpace, ground_state, xi
from circlewalk.symmetric import (DegenerateEvaluation, cycle_type_coefficients, elementary,
                                  elementary_all, elementary_ground, elementary_via_newton,
                                  newton_head, pieri_check, power_sum, q_binomial_check, schur,
                                  schur_at_ground, stationary_weight, vandermonde_abs_sq)

from conftest import configs


def brute_elementary(x, ell):
    return sum(np.prod(c) for c in itertools.combinations(x, ell)) if ell else 1.0


def jacobi_trudi(I: CircleConfig, x):
    """Schur function from complete homogeneous polynomials (independent of the bialternant)."""
    k = len(x)
    lam = [I.positions[i] - (k - 1 - i) for i in range(k)]
    top = lam[0] + k
    # h_m = coefficients of prod 1/(1 - x_j z)
    h = np.zeros(top + 1, complex)
    h[0] = 1
    for xj in x:
        for m in range(1, top + 1):
            h[m] += xj * h[m - 1]
    M = np.zeros((k, k), complex)
    for i in range(k):
        for j in range(k):
            idx = lam[i] - i + j
            M[i, j] = h[idx] if 0 <= idx <= top else 0
    return np.linalg.det(M)


@given(st.integers(1, 9), st.integers(0, 2 ** 32 - 1))
def test_elementary_matches_brute_force(k, seed):
    x = np.exp(2j * np.pi * np.random.default_rng(seed).random(k))
    e = elementary_all(x)
    for ell in range(k + 1):
        assert abs(e[ell] - brute_elementary(x, ell)) <= 1e-12 * max(1, math.comb(k, ell))


def test_elementary_examples():
    assert elementary([0.3 + 0.1j, 1j], 0) == 1
    assert elementary(xi(ground_state(4, 2)), 1) == pytest.approx(math.sqrt(2), abs=1e-15)
    with pytest.raises(ValueError):
        elementary([1, 1j], 3)


@pytest.mark.parametrize("n,k", [(7, 3), (12, 5), (20, 9)])
def test_elementary_ground_sine_form(n, k):
    x = xi(ground_state(n, k))
    for ell in range(k + 1):
        want = math.prod(math.sin((k - j + 1) * math.pi / n) / math.sin(j * math.pi / n)
                         for j in range(1, ell + 1))
        got = elementary(x, ell)
        assert got.real > 0
        assert abs(got - want) <= 1e-12 * want
        assert elementary_ground(n, k, ell) == pytest.approx(want, rel=1e-12)


def test_power_sums():
    for n, k in [(10, 4), (17, 6)]:
        p1 = power_sum(xi(ground_state(n, k)), 1)
        assert p1 == pytest.approx(math.sin(k * math.pi / n) / math.sin(math.pi / n), abs=1e-13)
    assert abs(power_sum(xi(ground_state(4, 2)), 2)) < 1e-15
    assert power_sum([1j], 3) == pytest.approx(-1j)
    with pytest.raises(ValueError):
        power_sum([1j], 0)


@given(st.integers(1, 64), st.integers(0, 2 ** 32 - 1))
def test_newton_agrees_with_product(k, seed):
    x = np.exp(2j * np.pi * np.random.default_rng(seed).random(k))
    e = elementary_all(x)
    scale = np.abs(e).max()
    for ell in range(min(k, 12) + 1):
        assert abs(elementary_via_newton(x, ell) - e[ell]) <= 1e-10 * k * scale


def test_newton_small_cases(rng):
    x = np.exp(2j * np.pi * rng.random(8))
    p1, p2 = power_sum(x, 1), power_sum(x, 2)
    assert elementary_via_newton(x, 1) == pytest.approx(p1)
    assert elementary_via_newton(x, 2) == pytest.approx((p1 * p1 - p2) / 2)
    e5 = elementary(x, 5)
    assert abs(elementary_via_newton(x, 5) - e5) <= 1e-11 * abs(e5)


@given(st.integers(2, 40), st.data())
def test_conjugation_closed_is_real(n, data):
    k = data.draw(st.integers(1, min(n, 40)))
    e = elementary_all(xi(ground_state(n, k)))
    assert np.abs(e.imag).max() <= 1e-11 * k * max(1.0, np.abs(e).max())


def test_schur_ground_is_one(rng):
    for k in (1, 3, 6):
        x = np.exp(2j * np.pi * rng.random(k))
        assert schur(ground_state(10, k), x) == pytest.approx(1.0, abs=1e-10)


def test_schur_against_jacobi_trudi(rng):
    for cfg in StateSpace(8, 3).configs():
        x = np.exp(2j * np.pi * rng.random(3))
        assert abs(schur(cfg, x) - jacobi_trudi(cfg, x)) <= 1e-9 * max(1, abs(jacobi_trudi(cfg, x)))


def test_schur_degenerate():
    with pytest.raises(DegenerateEvaluation):
        schur(CircleConfig(5, (2, 0)), [1j, 1j])


def test_schur_on_b25_positive():
    x0 = xi(ground_state(5, 2))
    for cfg in StateSpace(5, 2).configs():
        s = schur(cfg, x0)
        assert abs(s.imag) < 1e-12 and s.real > 0
        assert s.real == pytest.approx(schur_at_ground(cfg), rel=1e-12)


def test_schur_pairing_symmetry():
    # d(J) |S_I(xi(J))| is symmetric in (I, J)
    sp = StateSpace(5, 2)
    cf = sp.configs()
    M = np.array([[schur(I, xi(J)) for J in cf] for I in cf])
    d = np.array([schur_at_ground(J) for J in cf])
    A = M * d[None, :]
    np.testing.assert_allclose(np.abs(A), np.abs(A).T, atol=1e-12)


def test_schur_at_ground_examples():
    assert schur_at_ground(ground_state(9, 4)) == pytest.approx(1.0)
    assert schur_at_ground(CircleConfig(4, (2, 0))) == pytest.approx(math.sqrt(2), rel=1e-14)
    for cfg in StateSpace(7, 3).configs():
        assert schur_at_ground(cfg) == pytest.approx(abs(schur(cfg, xi(ground_state(7, 3)))),
                                                     rel=1e-9)


@given(configs())
def test_schur_at_ground_positive(c):
    assert schur_at_ground(c) > 0


def test_vandermonde_table():
    vals = [vandermonde_abs_sq(c) for c in StateSpace(4, 2).configs()]
    np.testing.assert_allclose(vals, [2, 4, 2, 2, 4, 2], atol=1e-12)
    assert abs(sum(vals) - 16) <= 1e-12
    assert vandermonde_abs_sq(CircleConfig(5, (3,))) == 1
    assert stationary_weight(CircleConfig(5, (3,))) == pytest.approx(0.2)


@pytest.mark.parametrize("n,k", [(6, 3), (9, 4), (12, 6), (15, 2)])
def test_stationary_sums_to_one(n, k):
    total = sum(stationary_weight(c) for c in StateSpace(n, k).configs())
    assert abs(total - 1) <= 1e-12


def test_q_binomial():
    assert q_binomial_check(9, 4, 0) == 0
    assert q_binomial_check(7, 3, 2) <= 1e-12
    assert max(q_binomial_check(12, 5, l) for l in range(6)) <= 1e-10


def test_pieri():
    assert pieri_check(5, 2) <= 1e-10
    assert pieri_check(7, 3) <= 1e-9
    from circlewalk.configs import first_excited, second_excited
    for n, k in [(9, 4), (14, 5)]:
        s1 = schur_at_ground(first_excited(n, k))
        assert schur_at_ground(second_excited(n, k)) == pytest.approx(s1 ** 2 - 1, rel=1e-12)


def test_elementary_with_repeated_points():
    x = np.array([1j, 1j, -1, 0.6 + 0.8j, 1j])
    e = elementary_all(x)
    for ell in range(6):
        assert abs(e[ell] - brute_elementary(x, ell)) <= 1e-13 * 10


def test_elementary_near_full_circle():
    # k = n - 1: all e_l(xi(I0)) equal 1, a badly conditioned expansion
    for n in (33, 60):
        e = elementary_all(xi(ground_state(n, n - 1)))
        assert np.abs(e - 1).max() <= 1e-13


def test_newton_head_matches_brute_force():
    for ell in (3, 4, 5, 6):
        brute = cycle_type_coefficients(ell)
        for ctype, coef in newton_head(ell).items():
            assert brute[ctype] == coef, (ell, ctype)
    # the p2^2 term enters with a plus sign
    assert newton_head(4)[(2, 2)] == 3
