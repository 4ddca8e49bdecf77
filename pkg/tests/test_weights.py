import pytest

from diamond_constants.combinatorics import SubsetJ, all_subsets, find_J_star
from diamond_constants.fields import get_field
from diamond_constants.params import sample
from diamond_constants.weights import (
    BranchError,
    Character,
    c_chi,
    c_chi_branch,
    c_prime,
    chi,
    chi_s,
    digit_vector,
    gamma_empty,
    i_exponents,
    jacobi_modp,
    lemma_cprime_parts,
    mu_empty,
    mu_jstar_pair,
    neg_one_pow,
    s_vector,
    t_vector,
    to_integer,
    u_value,
    weight_vectors,
)
from diamond_constants.witt import get_witt_ring, teichmuller

from conftest import strict_sets


def jacobi_sum(a, b, p, f):
    """sum over x in F_q of [x]^a [1-x]^b, computed in W(F_q)/p^N."""
    F = get_field(p, f)
    N = 3 * f + 2
    W = get_witt_ring(p, f, N)
    total = W.zero()
    for x in F.elements():
        y = F.one() - x
        if x and y:
            total = total + teichmuller(x, N) ** a * teichmuller(y, N) ** b
    return total


@pytest.mark.parametrize("p,f", [(5, 1), (7, 1), (3, 2), (5, 2)])
def test_digit_formulas_match_jacobi_sums(p, f):
    q = p**f
    F = get_field(p, f)
    for a in range(1, q - 1):
        for b in range(1, q - 1):
            if (a + b) % (q - 1) == 0:
                continue
            s = jacobi_sum(a, b, p, f)
            assert s.valuation() == u_value((a, b), p, f), (a, b)
            assert s.leading_term() == F(jacobi_modp((a, b), p, f)), (a, b)


def test_no_carries_gives_u_equal_f():
    assert u_value((1, 2), 7, 3) == 3
    assert u_value((1 + 7, 2 + 49), 7, 3) == 3


def test_top_zero_representative():
    # the 0 argument is read as q-1: all digits p-1
    assert u_value((3, 0), 5, 1, top_zero=True) == 0
    assert jacobi_modp((3, 0), 5, 1, top_zero=True) == 5 - 1
    assert u_value((3, 0), 5, 1) == 1


def test_digit_vector_and_to_integer_round_trip():
    for a in range(0, 29**2 - 1, 37):
        assert to_integer(digit_vector(a, 29, 2), 29) == a
    assert digit_vector(29**2 - 1, 29, 2) == (0, 0)


def test_neg_one_pow():
    assert neg_one_pow(3, 7) == 6 and neg_one_pow(4, 7) == 1 and neg_one_pow(-1, 7) == 6


@pytest.mark.parametrize("params", strict_sets(fs=(1, 2, 3, 4)), ids=lambda ps: ps.params_hash())
def test_weight_vectors_are_in_range_and_conjugate(params):
    p = params.p
    for J in all_subsets(params.f):
        w = weight_vectors(J, params)
        assert all(0 <= x <= p - 1 for x in w.s)
        assert all(a + b == p - 1 for a, b in zip(w.s, w.s_star))
        assert all(a + b == rj for a, b, rj in zip(w.t, w.t_star, params.r))
        # the conjugate character swaps the two torus exponents
        c, cs = chi(J, params), chi_s(J, params)
        assert (c.a1 - c.a2 - (cs.a2 - cs.a1)) % (params.q - 1) == 0
    assert s_vector(SubsetJ.empty(params.f), params) == params.r
    assert t_vector(SubsetJ.empty(params.f), params) == (0,) * params.f


def test_character_twist_and_conjugation():
    c = Character(3, 5, 25)
    assert c.conj_s() == Character(5, 3, 25)
    assert c.twist(2) == Character(5, 3, 25)
    assert Character(30, -1, 25) == Character(6, 23, 25)


def test_c_chi_of_empty_is_minus_one():
    for params in strict_sets(fs=(1, 2, 3)):
        assert c_chi(SubsetJ.empty(params.f), params) == params.F(-1)


def test_c_chi_branches():
    params = sample(29, 3, SubsetJ.of([0], 3), seed=0)
    R = params.J_rho
    branches = {J: c_chi_branch(J, params) for J in all_subsets(3) if J != find_J_star(R)}
    assert set(branches.values()) == {"hu", "dl", "new"}
    with pytest.raises(BranchError):
        c_chi_branch(find_J_star(R), params)


def test_c_prime_is_a_sign():
    for params in strict_sets(fs=(2, 3)):
        R = params.J_rho
        for J in all_subsets(params.f):
            if J.issubset(R) or J == find_J_star(R):
                with pytest.raises(BranchError):
                    c_prime(J, params)
            else:
                assert c_prime(J, params) in (params.F(1), params.F(-1))


def test_cprime_parts_refuses_the_simple_regime():
    params = sample(29, 2, SubsetJ.empty(2), seed=0)
    with pytest.raises(BranchError):
        lemma_cprime_parts(SubsetJ.of([0], 2), params)


def test_i_exponents_are_reduced():
    for params in strict_sets(fs=(2, 3)):
        for J in all_subsets(params.f):
            ie = i_exponents(J, params)
            assert 0 <= ie.i_chi < params.q - 1 and 0 <= ie.i_chi_s < params.q - 1
            assert ie.P1 and ie.P2


def test_mu_constants():
    params = sample(31, 3, SubsetJ.of([1], 3), seed=4)
    assert mu_jstar_pair(params).value == params.F.one()
    assert gamma_empty(params) == params.xi
    assert mu_empty(params) == params.xi * (-1) ** (params.f - 1)
    with pytest.raises(BranchError):
        mu_jstar_pair(sample(31, 3, SubsetJ.empty(3), seed=4))
