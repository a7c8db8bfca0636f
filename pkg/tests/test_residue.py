import math

import pytest
from hypothesis import given, strategies as st

from gradedmassey.residue import RingParams, binom_mod, is_prime, max_k, r_k, r_k0, vp


def test_binom_examples():
    assert binom_mod(2, 2, RingParams(3, 1)) == 1
    assert binom_mod(3, 1, RingParams(3, 2)) == 3
    # C(9,3) = 84, frozen from a factorial evaluation
    assert binom_mod(9, 3, RingParams(3, 2)).value == 3
    assert binom_mod(2, 5, RingParams(5, 1)) == 0


def test_vp_examples():
    assert vp(84, 3) == 1
    assert vp(1, 5) == 0
    assert vp(8, 2) == 3
    assert vp(-18, 3) == 2
    with pytest.raises(ValueError):
        vp(0, 3)


def test_r_k_examples():
    assert r_k(1, 3) == 0
    assert r_k(9, 3) == 2
    assert r_k(8, 3) == 1
    assert r_k0(0, 3) == 0
    with pytest.raises(ValueError):
        r_k(0, 3)


def test_params_validation():
    with pytest.raises(ValueError):
        RingParams(4, 1)
    with pytest.raises(ValueError):
        RingParams(3, 0)
    with pytest.raises(ValueError):
        RingParams(3, 2, n=1)
    assert RingParams(3, 2, 2).modulus == 9


def test_residue_arithmetic():
    R = RingParams(3, 2)
    a, b = R(5), R(7)
    assert a + b == 3
    assert (a * b).value == 8
    assert a - b == 7
    assert -a == 4
    assert a.inverse() * a == 1
    assert R(9).value == 0
    assert R(6).valuation() == 1
    assert R(0).valuation() == math.inf
    assert not R(3).is_unit()
    with pytest.raises(ValueError):
        a + RingParams(5, 1)(1)


def test_is_prime_against_sympy():
    import sympy
    assert all(is_prime(n) == sympy.isprime(n) for n in range(-3, 400))


def test_max_k():
    assert max_k(3, 2, 1) == 8
    assert max_k(2, 3, 2) == 3
    for p, n, m in ((2, 3, 1), (3, 2, 2), (5, 2, 1)):
        k = max_k(p, n, m)
        assert m + r_k(k, p) <= n < m + r_k(k + 1, p)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 3), st.integers(1, 64), st.integers(0, 64))
def test_pascal(p, m, a, k):
    R = RingParams(p, m)
    lhs = binom_mod(a, k, R)
    rhs = binom_mod(a - 1, k, R) + (binom_mod(a - 1, k - 1, R) if k else R(0))
    assert lhs == rhs


def test_pascal_exhaustive():
    R = RingParams(3, 2)
    for a in range(1, 65):
        for k in range(1, a + 1):
            assert binom_mod(a, k, R) == binom_mod(a - 1, k, R) + binom_mod(a - 1, k - 1, R)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (3, 4),
                                 (5, 1), (5, 2), (7, 1), (7, 2)])
def test_valuation_of_binomial_of_prime_power(p, n):
    for k in range(1, p**n + 1):
        assert vp(math.comb(p**n, k), p) == n - vp(k, p)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 200))
def test_r_k_monotone(p, k):
    assert r_k(k, p) <= r_k(k + 1, p)
    assert p ** r_k(k, p) <= k < p ** (r_k(k, p) + 1)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_r_k_at_prime_powers(p):
    for r in range(5):
        assert r_k(p**r, p) == r
