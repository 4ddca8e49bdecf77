"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line.

Run as a script (python tests/test_acceptance.py) for the summary alone.
"""

import random
import sys
import time
from contextlib import contextmanager

from diamond_constants.combinatorics import all_subsets
from diamond_constants.fields import get_field
from diamond_constants.groupalg import (
    legal_pair,
    pr_subsets,
    random_ssv_args,
    verify_pr,
    verify_product_lemmas,
    verify_SSv,
)
from diamond_constants.params import mutate, sample
from diamond_constants.suite import run_checks
from diamond_constants.witt import get_witt_ring, teichmuller

PRIMES = (29, 31, 37)
LEMMA_SLUGS = ["compare-sj", "t-t-s", "j-star", "j0-delta", "jab", "ichij-sj", "mu-jstar",
               "cprime-parts"]

_lines = []


@contextmanager
def criterion(number, title, budget=None, capsys=None):
    """Time the block and print one PASS/FAIL line for it."""
    state = {"ok": False, "note": ""}
    start = time.perf_counter()
    try:
        yield state
    finally:
        elapsed = time.perf_counter() - start
        ok = state["ok"] and (budget is None or elapsed < budget)
        limit = f" (budget {budget:g}s)" if budget else ""
        note = f" - {state['note']}" if state["note"] else ""
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{elapsed:.1f}s{limit}]{note}"
        _lines.append(line)
        if capsys is not None:
            with capsys.disabled():
                print("\n" + line)
        else:
            print(line)
        state["final"] = ok


def proper_subsets(f):
    return [R for R in all_subsets(f) if not R.is_full()]


def strict_sets(fs, mixed_only=False):
    out = []
    for f in fs:
        for R in proper_subsets(f):
            if mixed_only and not R:
                continue
            out.extend(sample(p, f, R, seed=0) for p in PRIMES)
    return out


def summarize(recs):
    bad = [r for r in recs if r.status in ("fail", "error")]
    return bad, f"{len(recs)} checks, {len(bad)} not passing"


def test_criterion_1_lemma_suite(capsys):
    with criterion(1, "combinatorial lemmas, f <= 4, p in {29, 31, 37}", 60, capsys) as st:
        recs = run_checks(LEMMA_SLUGS, strict_sets((1, 2, 3, 4)))
        bad, st["note"] = summarize(recs)
        st["ok"] = not bad and {r.slug for r in recs} == set(LEMMA_SLUGS)
    assert st["final"], bad[:3]


def test_criterion_2_cprime(capsys):
    with criterion(2, "c'(J) = (-1)^A(J), f <= 3", None, capsys) as st:
        recs = run_checks(["cprime-simple", "cprime-new"], strict_sets((1, 2, 3)))
        bad, st["note"] = summarize(recs)
        st["ok"] = not bad and {r.slug for r in recs} == {"cprime-simple", "cprime-new"}
    assert st["final"], bad[:3]


def test_criterion_3_up_closed(capsys):
    with criterion(3, "U_p chain ratio closed form, f <= 4", 10, capsys) as st:
        recs = run_checks(["up-closed"], strict_sets((1, 2, 3, 4)))
        bad, st["note"] = summarize(recs)
        st["ok"] = not bad and len(recs) > 0
    assert st["final"], bad[:3]


def _witt_trials(p, f, N, trials, rng):
    F = get_field(p, f)
    W = get_witt_ring(p, f, N)
    problems = 0
    for _ in range(trials):
        lam, mu = F.random(rng), F.random(rng)
        t_lam, t_mu = teichmuller(lam, N), teichmuller(mu, N)
        problems += t_lam ** F.q != t_lam
        problems += teichmuller(lam * mu, N) != t_lam * t_mu
        if f == 1 and lam:
            problems += t_lam.coeffs[0] != pow(lam.to_int(), p ** (N - 1), p**N)
        vx, vy = rng.randrange(N // 2), rng.randrange(N - N // 2)
        x = W([rng.randrange(W.pN) for _ in range(f)]) * p**vx
        y = W([rng.randrange(W.pN) for _ in range(f)]) * p**vy
        if x.valuation() == vx and y.valuation() == vy and vx + vy < N:
            problems += (x * y).valuation() != vx + vy
            problems += (x * y).leading_term() != x.leading_term() * y.leading_term()
    return problems


def test_criterion_4_witt(capsys):
    with criterion(4, "Witt layer, 1000 trials at three (p, f, N)", None, capsys) as st:
        rng = random.Random(2024)
        problems = sum(_witt_trials(p, f, N, 1000, rng) for p, f, N in ((5, 1, 4), (3, 2, 4), (29, 2, 6)))
        st["note"] = f"{problems} violations"
        st["ok"] = problems == 0
    assert st["final"]


def _products(q_list, pairs, triples, rng):
    failures = total = 0
    for p, f in q_list:
        q = p**f
        done = 0
        while done < pairs:
            a, b = rng.randrange(1, q - 1), rng.randrange(1, q - 1)
            if legal_pair(a, b, q):
                failures += not verify_product_lemmas((a, b), p, f).ok
                done += 1
        done = 0
        while done < triples:
            a1, a2 = rng.randrange(1, q - 1), rng.randrange(1, q - 1)
            if (a1 + a2) % (q - 1) == 0:
                continue
            # alternate between the divisible and non-divisible total
            a3 = (-a1 - a2) % (q - 1) if done % 2 else rng.randrange(1, q - 1)
            failures += not verify_product_lemmas((a1, a2, a3), p, f).ok
            done += 1
        total += pairs + triples
    return failures, total


def test_criterion_5_operators(capsys):
    with criterion(5, "operator calculus: products, S S v, projections at p = 29", 300, capsys) as st:
        rng = random.Random(5)
        prod_fail, prod_total = _products([(5, 1), (7, 1), (3, 2), (5, 2)], 200, 100, rng)
        ssv_fail = ssv_total = 0
        for f in (1, 2):
            for k in range(50):
                R = rng.choice(proper_subsets(f))
                J = rng.choice(all_subsets(f))
                ps = sample(29, f, R, seed=k)
                a, b = random_ssv_args(J, ps, rng)
                ssv_fail += not verify_SSv(J, a, b, ps).ok
                ssv_total += 1
        pr_fail = pr_total = 0
        for R in proper_subsets(2):
            ps = sample(29, 2, R, seed=0)
            for Js in pr_subsets(R).values():
                for J in Js:
                    pr_fail += not verify_pr(J, ps).ok
                    pr_total += 1
        st["note"] = (f"products {prod_total - prod_fail}/{prod_total}, "
                      f"S S v {ssv_total - ssv_fail}/{ssv_total}, projections {pr_total - pr_fail}/{pr_total}")
        st["ok"] = prod_fail == ssv_fail == pr_fail == 0 and pr_total > 0
    assert st["final"]


def test_criterion_6_main_theorem(capsys):
    with criterion(6, "main theorem, f in {2, 3}, J_rho not empty or everything", 30, capsys) as st:
        recs = run_checks(["theorem"], strict_sets((2, 3), mixed_only=True))
        bad, st["note"] = summarize(recs)
        st["ok"] = not bad and len(recs) == 3 * (2 + 6)
    assert st["final"], bad[:3]


def test_criterion_7_negative_controls(capsys):
    with criterion(7, "negative controls and conjugation invariance", None, capsys) as st:
        sets = [sample(29, 3, [0], seed=0), sample(29, 2, [0], seed=0)]
        slugs = LEMMA_SLUGS + ["cprime-simple", "cprime-new", "up-closed", "up-prime",
                               "mu-empty-consistency", "theorem", "pr-hu", "pr-dl"]
        caught = {}
        for kind in ("d", "r"):
            recs = run_checks(slugs, sets, mutate_oracle=lambda ps, k=kind: mutate(ps, k))
            caught[kind] = sorted({r.slug for r in recs if r.status == "fail"})
        recs = run_checks(slugs, sets, perturb="-X")
        caught["table"] = sorted({r.slug for r in recs if r.status == "fail"})
        conj = run_checks(["conjugation"], [sample(29, 3, [0], seed=0)], samples=100)
        conj_ok = [r.status for r in conj] == ["pass"] and conj[0].details["trials"] == 100
        st["note"] = "; ".join(f"{k} caught by {', '.join(v) or 'nothing'}" for k, v in caught.items())
        st["ok"] = all(caught.values()) and conj_ok
    assert st["final"]


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
