import random

import pytest

from diamond_constants.combinatorics import SubsetJ, all_subsets
from diamond_constants.fields import get_field
from diamond_constants.groupalg import (
    GroupAlgElem,
    NotScalarMultiple,
    PrincipalSeries,
    S_op,
    S_plus_op,
    extract_scalar,
    get_group,
    legal_pair,
    pr_subsets,
    random_ssv_args,
    verify_pr,
    verify_product_lemmas,
    verify_SSv,
)
from diamond_constants.params import mutate, sample
from diamond_constants.weights import Character, chi, s_vector, to_integer
from diamond_constants.witt import PrecisionExhausted, get_witt_ring, teichmuller


def test_group_tables():
    G = get_group(3, 2)
    F = get_field(3, 2)
    rng = random.Random(0)
    for _ in range(30):
        a, b = F.random(rng), F.random(rng, nonzero=True)
        ca, cb = a.to_int(), b.to_int()
        assert F.from_int(G.add(ca, cb)) == a + b
        assert F.from_int(G.mul(ca, cb)) == a * b
        assert F.from_int(G.inv(cb)) == b.inv()


def test_bruhat_decomposition_recovers_each_matrix():
    G = get_group(5, 1)
    for rep in range(G.q + 1):
        for m21 in range(5):
            for m22 in range(5):
                if (m21, m22) == (0, 0):
                    continue
                rep_, xlog, zlog = G.decompose(1, 2, m21, m22)
                assert 0 <= rep_ <= G.q


def test_convolution_of_point_masses():
    G, W = get_group(5, 1), get_witt_ring(5, 1, 3)
    g, h = (1, 2, 0, 1), (0, 1, 1, 3)
    prod = GroupAlgElem.delta(G, W, g, 2) * GroupAlgElem.delta(G, W, h, 3)
    assert prod == GroupAlgElem.delta(G, W, G.matmul(g, h), 6)
    one = GroupAlgElem.identity(G, W)
    x = S_op(1, 5, 1, 3)
    assert one * x == x == x * one


def test_convolution_is_bilinear_and_associative():
    p, f, N = 3, 2, 3
    a, b, c = S_op(1, p, f, N), S_plus_op(2, p, f, N), S_op(5, p, f, N)
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a - a) == GroupAlgElem(a.group, a.ring, {})


def test_point_masses_must_be_invertible():
    with pytest.raises(ValueError):
        GroupAlgElem.delta(get_group(5, 1), get_witt_ring(5, 1, 2), (1, 2, 2, 4))


def test_operator_support_and_coefficients():
    p, f, N = 5, 1, 3
    F = get_field(p, f)
    x = S_op(3, p, f, N)
    assert len(x) == p**f - 1
    for lam in range(1, p):
        assert x.terms[(lam, 1, 1, 0)] == teichmuller(F(lam), N) ** 3
    y = S_plus_op(2, p, f, N)
    assert set(y.terms) == {(1, 0, lam, 1) for lam in range(1, p)}


@pytest.mark.parametrize("p,f,args,expected", [
    (5, 1, (1, 2), (1, 3)),
    (5, 1, (2, 3), (0, 2)),
])
def test_product_examples(p, f, args, expected):
    rep = verify_product_lemmas(args, p, f)
    assert rep.ok
    assert (rep.details["S+"]["valuation"], rep.details["S+"]["leading"][0]) == expected


@pytest.mark.parametrize("p,f", [(5, 1), (7, 1), (3, 2), (5, 2)])
def test_product_lemmas_on_random_pairs_and_triples(p, f):
    q = p**f
    rng = random.Random(q)
    for _ in range(15):
        a, b = rng.randrange(1, q - 1), rng.randrange(1, q - 1)
        if legal_pair(a, b, q):
            assert verify_product_lemmas((a, b), p, f).ok
    for k in range(8):
        a1, a2 = rng.randrange(1, q - 1), rng.randrange(1, q - 1)
        if (a1 + a2) % (q - 1) == 0:
            continue
        a3 = (-a1 - a2) % (q - 1) if k % 2 else rng.randrange(1, q - 1)
        if a3:
            assert verify_product_lemmas((a1, a2, a3), p, f).ok


def test_degenerate_products_are_refused():
    with pytest.raises(ValueError):
        verify_product_lemmas((1, 3), 5, 1)
    with pytest.raises(ValueError):
        verify_product_lemmas((0, 2), 5, 1)
    with pytest.raises(ValueError):
        verify_product_lemmas((2,), 5, 1)
    with pytest.raises(ValueError):
        verify_product_lemmas((2, 2, 1), 5, 1)


def test_extract_scalar():
    p, f, N = 5, 2, 4
    F = get_field(p, f)
    ref = S_op(3, p, f, N)
    s = extract_scalar(ref.scale(p**2), ref)
    assert (s.valuation, s.leading) == (2, F.one())
    s = extract_scalar(ref.scale(teichmuller(F(2), N)), ref)
    assert (s.valuation, s.leading) == (0, F(2))
    bent = dict(ref.scale(3).terms)
    key = next(iter(bent))
    bent[key] = bent[key] + 1
    with pytest.raises(NotScalarMultiple):
        extract_scalar(GroupAlgElem(ref.group, ref.ring, bent), ref)
    with pytest.raises(PrecisionExhausted):
        extract_scalar(ref.scale(p**N), ref)


def test_fast_operator_action_matches_generic_action():
    for p, f in ((5, 1), (3, 2)):
        ps = sample(p, f, [], seed=1, mode="relaxed")
        V = PrincipalSeries(chi(SubsetJ.of([0], f), ps), p, f, 4)
        v = V.phi()
        for i in (0, 1, 3):
            assert V.S(i, v) == V.act(S_op(i, p, f, 4), v)
            assert V.S_plus(i, v) == V.act(S_plus_op(i, p, f, 4), v)


def test_phi_is_a_torus_eigenvector():
    V = PrincipalSeries(Character(1, 2, 9), 3, 2, 3)
    assert V.torus_character(V.phi()) == (1, 2)


def _all_legal(J, ps):
    q = ps.q
    s = to_integer(s_vector(J, ps), ps.p)
    for a in range(1, q - 1):
        for b in range(q - 1):
            if all(x % (q - 1) for x in (a, a - b, a - b - s)):
                yield a, b


def test_conventions_are_calibrated_at_q5():
    """Only the right-translation convention with S_i (not S_-i) gives the formula.

    The wrong conventions agree with it only where the weight has r = 2, J = {0}.
    """
    total, passed, stray = 0, {"right": 0, "opposite": 0, "sign": 0}, set()
    for R in all_subsets(1):
        for seed in range(3):
            ps = sample(5, 1, R, seed=seed, mode="relaxed")
            for J in all_subsets(1):
                for a, b in _all_legal(J, ps):
                    total += 1
                    for name, kw in (("right", {}), ("opposite", {"opposite": True}),
                                     ("sign", {"sign": -1})):
                        ok = verify_SSv(J, a, b, ps, **kw).ok
                        passed[name] += ok
                        if ok and name != "right":
                            stray.add((ps.r, J.bits))
    assert total == 75 and passed["right"] == total
    assert passed["opposite"] <= total // 5 and passed["sign"] <= total // 5
    assert stray <= {((2,), 0), ((2,), 1)}


@pytest.mark.parametrize("p,f", [(7, 1), (3, 2)])
def test_ssv_exhaustive_small(p, f):
    for R in all_subsets(f):
        ps = sample(p, f, R, seed=0, mode="relaxed")
        for J in all_subsets(f):
            for a, b in _all_legal(J, ps):
                rep = verify_SSv(J, a, b, ps)
                assert rep.ok, rep.details


def test_ssv_rejects_degenerate_arguments():
    ps = sample(5, 1, [], seed=0, mode="relaxed")
    with pytest.raises(ValueError):
        verify_SSv(SubsetJ.empty(1), 0, 1, ps)


def test_random_ssv_args_are_legal():
    ps = sample(29, 1, [], seed=0)
    rng = random.Random(5)
    J = SubsetJ.of([0], 1)
    s = to_integer(s_vector(J, ps), 29)
    for _ in range(20):
        a, b = random_ssv_args(J, ps, rng)
        assert all(x % 28 for x in (a, a - b, a - b - s))


def test_pr_subsets_partition():
    R = SubsetJ.of([0], 3)
    parts = pr_subsets(R)
    flat = [J for v in parts.values() for J in v]
    assert len(flat) == len(set(flat)) == 8 - 2
    assert all(parts.values())


@pytest.mark.parametrize("p,f", [(5, 2), (7, 2)])
def test_projection_lemmas_relaxed(p, f):
    for R in all_subsets(f):
        if R.is_full():
            continue
        ps = sample(p, f, R, seed=0, mode="relaxed")
        for branch, Js in pr_subsets(R).items():
            for J in Js:
                rep = verify_pr(J, ps)
                assert rep.ok, (branch, rep.details)


def test_projection_lemma_detects_perturbed_r():
    ps = sample(7, 2, [0], seed=0, mode="relaxed")
    bad = mutate(ps, "r")
    results = [verify_pr(J, ps, oracle_params=bad).ok
               for Js in pr_subsets(ps.J_rho).values() for J in Js]
    assert not all(results)
