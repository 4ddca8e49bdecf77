from dataclasses import replace

import pytest

from diamond_constants.combinatorics import SubsetJ, all_subsets
from diamond_constants.leadterm import (
    ID,
    SWAP,
    UP_CASES,
    CancellationFailure,
    IllegalWeylPair,
    Monomial,
    build_kisin,
    check_bar_A,
    check_character_lemma,
    kisin_up_class,
    star_w_wprime,
    tilde_up,
    up_case,
    up_chi_class,
    verify_up_closed,
)
from diamond_constants.params import mutate, sample

from conftest import strict_sets


def proper(f):
    return [R for R in all_subsets(f) if not R.is_full()]


def test_monomial_algebra():
    m = Monomial(sign=-1, beta_exp=2, d_exp={0: 1}, X_exp={1: 1})
    assert m * m.inv() == Monomial()
    assert m**2 == Monomial(beta_exp=4, d_exp={0: 2}, X_exp={1: 2})
    assert (m / m) == Monomial()
    assert Monomial(d_exp={0: 0}) == Monomial()
    with pytest.raises(ValueError):
        Monomial(sign=2)


def test_xy_cancellation_produces_powers_of_p():
    m = Monomial(X_exp={0: 2, 1: -1}, Y_exp={0: 1, 1: -1})
    r = m.reduce()
    assert r == Monomial(p_exp=0, X_exp={0: 1}) * Monomial(p_exp=1) * Monomial(p_exp=-1)
    assert r.X_exp == {0: 1} and r.p_exp == 0
    assert m.reduce(order=[1, 0]) == r


def test_evaluate_needs_full_cancellation():
    ps = sample(29, 2, [0], seed=0)
    with pytest.raises(CancellationFailure):
        Monomial(X_exp={0: 1}).evaluate(ps)
    assert Monomial(sign=-1, beta_exp=1).evaluate(ps) == -ps.beta


def test_up_case_table():
    R = SubsetJ.of([0], 2)
    assert up_case(SubsetJ.of([0, 1], 2), 0, R) == "both"
    assert up_case(SubsetJ.of([0], 2), 0, R) == "Y"
    assert up_case(SubsetJ.of([1], 2), 0, R) == "-X"
    assert up_case(SubsetJ.of([1], 2), 1, R) == "-c^-1"
    assert up_case(SubsetJ.of([0], 2), 1, R) == "c"
    assert set(UP_CASES) == {"both", "Y", "-X", "-c^-1", "c"}


@pytest.mark.parametrize("f", [1, 2, 3])
def test_table_matches_kisin_matrices(f):
    for R in all_subsets(f):
        for J in all_subsets(f):
            table = replace(up_chi_class(J, R), p_exp=0)
            assert table == replace(kisin_up_class(J, R), p_exp=0), (J, R)


@pytest.mark.parametrize("wj,wpj", [(ID, ID), (ID, SWAP), (SWAP, SWAP)])
@pytest.mark.parametrize("in_rho", [True, False])
def test_reduced_kisin_matrices(wj, wpj, in_rho):
    if (wj, wpj) == (ID, SWAP) and not in_rho:
        with pytest.raises(IllegalWeylPair):
            check_bar_A(wj, wpj, 0, in_rho)
    else:
        assert check_bar_A(wj, wpj, 0, in_rho) == []


def test_illegal_weyl_pairs():
    with pytest.raises(IllegalWeylPair):
        build_kisin(([SWAP], [ID]), SubsetJ.of([0], 1))
    with pytest.raises(IllegalWeylPair):
        build_kisin(([ID], [SWAP]), SubsetJ.empty(1))
    with pytest.raises(IllegalWeylPair):
        build_kisin(([ID], [ID, ID]), SubsetJ.empty(1))


def test_star_w_wprime_example():
    s, w, wp = star_w_wprime(SubsetJ.of([1], 2), SubsetJ.empty(2))
    assert s == [SWAP, ID] and w == [SWAP, SWAP] and wp == [SWAP, SWAP]


def test_character_lemma_holds():
    for ps in strict_sets(fs=(1, 2, 3)):
        for J in all_subsets(ps.f):
            assert check_character_lemma(J, ps) == []


@pytest.mark.parametrize("f", [1, 2, 3, 4])
def test_chain_ratio_cancels_and_matches_closed_form(f):
    for R in proper(f):
        ps = sample(29, f, R, seed=f)
        for J in all_subsets(f):
            rep = verify_up_closed(J, ps)
            assert rep.ok, rep.details
            assert not tilde_up(J, R).has_XY()


def test_tilde_up_does_not_depend_on_cancellation_order():
    R = SubsetJ.of([0, 2], 4)
    for J in all_subsets(4):
        assert tilde_up(J, R) == tilde_up(J, R, order=[3, 2, 1, 0])


def test_negative_controls():
    ps = sample(29, 3, [0], seed=0)
    R = ps.J_rho
    assert not all(verify_up_closed(J, ps, perturb="-X").ok for J in all_subsets(3))
    bad = mutate(ps, "d")
    assert not all(verify_up_closed(J, ps, oracle_params=bad).ok for J in all_subsets(3))
    assert up_chi_class(SubsetJ.of([1], 3), R, perturb="-X") != up_chi_class(SubsetJ.of([1], 3), R)
