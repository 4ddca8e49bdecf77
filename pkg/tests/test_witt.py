import random

import pytest

from diamond_constants.fields import get_field
from diamond_constants.witt import (
    PrecisionExhausted,
    get_witt_ring,
    leading_term,
    precision_for_product,
    teichmuller,
    valuation,
)


@pytest.mark.parametrize("p,N", [(5, 4), (7, 3), (29, 6)])
def test_prime_field_teichmuller_matches_power_formula(p, N):
    F = get_field(p, 1)
    for a in range(1, p):
        # [a] = a^{p^{N-1}} mod p^N, an independent closed form
        assert teichmuller(F(a), N).coeffs[0] == pow(a, p ** (N - 1), p**N)


@pytest.mark.parametrize("p,f,N", [(3, 2, 4), (5, 2, 3), (2, 3, 5)])
def test_teichmuller_lifts_are_roots_of_unity(p, f, N):
    F = get_field(p, f)
    W = get_witt_ring(p, f, N)
    for x in F.elements():
        t = teichmuller(x, N)
        assert t.reduce() == x
        assert t ** (F.q - 1) == (W.one() if x else W.zero())


def test_teichmuller_of_zero_is_zero():
    assert not teichmuller(get_field(3, 2).zero(), 4)


def test_valuation_and_leading_term():
    W = get_witt_ring(5, 2, 4)
    x = W([25 * 3, 25 * 7])
    assert valuation(x) == 2
    assert leading_term(x) == get_field(5, 2)([3, 2])
    with pytest.raises(PrecisionExhausted):
        leading_term(W.zero())
    assert W.zero().valuation_checked() == (4, True)


def test_inverse():
    W = get_witt_ring(7, 3, 5)
    rng = random.Random(1)
    for _ in range(20):
        x = W([rng.randrange(W.pN) for _ in range(3)])
        if x.valuation() == 0:
            assert x * x.inv() == W.one()
    with pytest.raises(ZeroDivisionError):
        W(7).inv()


def test_divide_by_p_power_checks_divisibility():
    W = get_witt_ring(3, 1, 4)
    assert W(18).divide_by_p_power(2) == W(2)
    with pytest.raises(ArithmeticError):
        W(4).divide_by_p_power(1)


def test_rings_do_not_mix():
    with pytest.raises(ValueError):
        get_witt_ring(5, 1, 3)(1) + get_witt_ring(5, 1, 4)(1)


def test_precision_for_product_grows_with_length():
    assert precision_for_product(2, 3) > precision_for_product(2, 2) > precision_for_product(1, 2)
    with pytest.raises(ValueError):
        get_witt_ring(5, 1, 0)
