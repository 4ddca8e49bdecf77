import random

import pytest

from diamond_constants.combinatorics import SubsetJ, all_subsets, delta_ss
from diamond_constants.matrices import (
    PatternError,
    admissible_subsets,
    build_banded,
    build_extended_nu,
    canonicalize,
    check_conditions,
    conjugate,
    extract_invariants,
    gamma_invariants,
    in_band,
    in_pattern,
    nu,
    nu_of_J_closed,
    random_diagonal,
    reconstruct_from_invariants,
    to_phi_orientation,
    verify_main_theorem,
)
from diamond_constants.params import mutate, sample

from conftest import strict_sets


def mixed(f):
    return [R for R in all_subsets(f) if R and not R.is_full()]


@pytest.fixture
def ps():
    return sample(29, 3, SubsetJ.of([0], 3), seed=0)


def test_support_is_exactly_the_pattern(ps):
    M = build_extended_nu(ps)
    assert check_conditions(M) == []
    R = ps.J_rho
    for J in all_subsets(3):
        for Jp in all_subsets(3):
            assert bool(M[J, Jp]) == in_pattern(J, Jp, R)
    with pytest.raises(PatternError):
        nu(SubsetJ.of([1], 3), SubsetJ.of([1], 3), ps)


def test_banded_part(ps):
    M = build_extended_nu(ps)
    B = build_banded(M)
    R = ps.J_rho
    for J in all_subsets(3):
        for Jp in all_subsets(3):
            expected = M[J, Jp] if in_band(J, Jp, R) else M.zero
            assert B[J, Jp] == expected
    rows = to_phi_orientation(M)
    assert rows[1][2] == M[SubsetJ(2, 3), SubsetJ(1, 3)]


def test_chain_products_match_closed_form(ps):
    inv = extract_invariants(build_extended_nu(ps))
    for J in admissible_subsets(ps.J_rho):
        assert inv.at_J[J] == nu_of_J_closed(J, ps)


def test_invariants_survive_diagonal_conjugation(ps):
    M = build_extended_nu(ps)
    inv = extract_invariants(M).to_json()
    canon = canonicalize(M)[0].entries
    rng = random.Random(3)
    for _ in range(20):
        B = conjugate(M, random_diagonal(ps.F, M.size, rng))
        assert extract_invariants(B).to_json() == inv
        assert canonicalize(B)[0].entries == canon


def test_canonical_form_normalizes_the_chain(ps):
    C, _ = canonicalize(build_extended_nu(ps))
    R = ps.J_rho
    for J in all_subsets(3):
        if J:
            assert C[J, delta_ss(J, R)] == ps.F.one()


def test_reconstruction_round_trip(ps):
    M = build_extended_nu(ps)
    inv = extract_invariants(M)
    assert reconstruct_from_invariants(inv, 3, ps.J_rho).entries == canonicalize(M)[0].entries


@pytest.mark.parametrize("params", strict_sets(fs=(2, 3)), ids=lambda p: p.params_hash())
def test_main_theorem(params):
    if not params.J_rho:
        with pytest.raises(ValueError):
            verify_main_theorem(params)
        return
    rep = verify_main_theorem(params)
    assert rep.ok, rep.problems
    assert rep.rows[0]["family"] == "empty"


def test_gamma_side_matches_at_f4():
    ps = sample(29, 4, SubsetJ.of([0, 2], 4), seed=2)
    assert verify_main_theorem(ps).ok
    assert set(gamma_invariants(ps).at_J) == set(admissible_subsets(ps.J_rho))


def test_perturbed_nu_side_is_caught():
    ps = sample(29, 3, SubsetJ.of([0], 3), seed=0)
    assert not verify_main_theorem(ps, mutate(ps, "d")).ok


def test_extended_matrix_needs_proper_j_rho():
    with pytest.raises(ValueError):
        build_extended_nu(sample(29, 2, [0, 1], seed=0))
