"""Registry of verification checks and the driver that runs them.

Each check compares two independently computed sides.  When a perturbed
oracle ParamSet is supplied, it feeds the closed-form (expected) side only,
so a correct check must then fail somewhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from .combinatorics import (
    SubsetJ,
    all_subsets,
    boundary,
    delta_ss,
    exponents,
    find_J_star,
    j_delta,
)
from .groupalg import (
    NotScalarMultiple,
    legal_pair,
    pr_subsets,
    random_ssv_args,
    verify_SSv,
    verify_pr,
    verify_product_lemmas,
)
from .leadterm import (
    UP_CASES,
    check_character_lemma,
    kisin_up_class,
    up_chi_class,
    verify_up_closed,
)
from .matrices import (
    build_extended_nu,
    canonicalize,
    conjugate,
    extract_invariants,
    random_diagonal,
    verify_main_theorem,
)
from .params import ParamSet
from .weights import (
    BranchError,
    _inv,
    alpha_prime_per_index,
    c_prime,
    digit_vector,
    i_exponents,
    jacobi_modp,
    lemma_cprime_parts,
    mu_empty,
    mu_jstar_pair,
    neg_one_pow,
    s_vector,
    t_vector,
    to_integer,
    weight_vectors,
)

__all__ = [
    "CheckRecord",
    "Context",
    "SLUGS",
    "run_checks",
]


@dataclass
class Context:
    """Everything a check may need besides (params, J)."""

    oracle: ParamSet | None = None
    perturb: str | None = None
    seed: int = 0
    samples: int | None = None
    precision: int | None = None

    def oracle_for(self, params: ParamSet) -> ParamSet:
        return self.oracle or params

    def rng(self, *salt) -> random.Random:
        return random.Random(":".join(map(str, (self.seed, *salt))))


@dataclass
class CheckRecord:
    slug: str
    params_hash: str
    params: dict
    subset: list[int] | None
    status: str  # pass, fail, skip or error
    details: dict = field(default_factory=dict)

    def sort_key(self):
        sub = self.subset
        return (self.slug, self.params_hash, -1 if sub is None else len(sub), sub or [])

    def to_json(self) -> dict:
        return {"slug": self.slug, "params": {**self.params, "hash": self.params_hash},
                "subset": self.subset, "status": self.status, "details": self.details}


class Skip(Exception):
    """The check does not apply to these inputs."""


Result = tuple[bool, dict]


# Weight combinatorics

def check_compare_sj(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    p, R = params.p, params.J_rho
    oracle = ctx.oracle_for(params)
    s = s_vector(J, params)
    s_prev = s_vector(delta_ss(J, R), oracle)
    s_ss = s_vector(J & R, oracle)
    Jd, nss = j_delta(J, R), J - R
    bad = []
    for j in range(params.f):
        rhs1 = (p - 2 - s_prev[j] if (j + 1) in Jd else s_prev[j]) + (j in Jd)
        rhs2 = (p - 2 - s_ss[j] if (j + 1) in nss else s_ss[j]) + (j in nss)
        if s[j] != rhs1:
            bad.append(f"(i) at j={j}: {s[j]} != {rhs1}")
        if s[j] != rhs2:
            bad.append(f"(ii) at j={j}: {s[j]} != {rhs2}")
    return not bad, {"s": list(s), "problems": bad}


def check_t_t_s(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    w = weight_vectors(J, params)
    oracle = ctx.oracle_for(params)
    bad = []
    for Jp in all_subsets(params.f):
        total = sum(w.t) + sum(w.t_star) + sum(s_vector(Jp, oracle))
        if total % 2:
            bad.append(repr(Jp))
    return not bad, {"odd_for": bad}


def _same_weight(J1: tuple, J2: tuple, params: ParamSet) -> bool:
    """F(s + t, t) = F(s' + t', t') iff s = s' and the twists agree mod q-1."""
    (s1, t1), (s2, t2) = J1, J2
    p, q = params.p, params.q
    return s1 == s2 and (to_integer(t1, p) - to_integer(t2, p)) % (q - 1) == 0


def check_j_star(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    R = params.J_rho
    if R.is_full():
        raise Skip("J* needs J_rho to be a proper subset")
    w = weight_vectors(J, params)
    K = delta_ss(J, R)
    oracle = ctx.oracle_for(params)
    same = _same_weight((w.s_star, w.t_star), (s_vector(K, oracle), t_vector(K, oracle)), params)
    full = j_delta(J, R).is_full()
    Js = find_J_star(R)
    # j in J* iff j not in J_rho, or j in J_rho and j+1 not in J*
    described = all((j in Js) == ((j not in R) or ((j + 1) not in Js)) for j in range(params.f))
    ok = same == full and full == (J == Js) and described
    return ok, {"conjugate_matches": same, "J_delta_full": full, "J_star": Js.to_list()}


def check_j0_delta(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    p, f, R = params.p, params.f, params.J_rho
    ss, nss = J & R, J - R
    J0 = (ss | (J.complement().shift(-1) - R)).shift(1)
    oracle = ctx.oracle_for(params)
    s, s0, s_ss = s_vector(J, params), s_vector(J0, oracle), s_vector(ss, oracle)
    d = lambda cond: int(bool(cond))  # noqa: E731
    bad = []
    for j in range(f):
        cp = 2 * d(j in J0 and j in nss) + p - 1 - s0[j] + d(j in (J0 ^ J))
        lhs1 = (-1) ** d((j + 1) not in J0) * (
            2 * d(j in J0 and j in nss) + d(j in ss) - d(j in (J0 ^ ss)) + d(j in (J0 ^ J)))
        rhs1 = d(j in ss) + d(j in nss) * (-1) ** d((j + 1) in J)
        out = (j + 1) not in (J0 ^ J)
        lhs2 = s[j] + d(out) * cp
        rhs2 = d(not out) * s[j] + d(out) * (p - 1)
        lhs3 = d((j + 1) not in nss) * s_ss[j] + d((j + 1) in nss) * (p - 1) + d(out) * cp
        rhs3 = (d((j + 1) in J0 and (j + 1) in nss) * p + d((j + 1) in (J0 ^ ss)) * s_ss[j]
                + d((j + 1) not in (J0 ^ ss)) * (p - 1))
        for part, lhs, rhs in (("i", lhs1, rhs1), ("ii", lhs2, rhs2), ("iii", lhs3, rhs3)):
            if lhs != rhs:
                bad.append(f"({part}) at j={j}: {lhs} != {rhs}")
    return not bad, {"J0": J0.to_list(), "problems": bad}


def check_jab(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    R = params.J_rho
    if R.is_full() or J == find_J_star(R):
        raise Skip("needs J != J*")
    p, f = params.p, params.f
    ie = i_exponents(J, params)
    s = to_integer(s_vector(J, params), p)
    lhs = jacobi_modp((ie.i_chi_s, -s), p, f)
    oracle = ctx.oracle_for(params)
    K, Jd = delta_ss(J, R), j_delta(J, R)
    sK = s_vector(K, oracle)
    sign = 1 + sum(sK[j] for j in range(f) if (j + 1) in Jd)
    num = den = 1
    for j in range(f):
        if (j + 1) in Jd and j not in Jd:
            num = num * -(sK[j] + 1) % p
        if (j + 1) not in Jd and j in Jd:
            den = den * (sK[j] + 1) % p
    rhs = neg_one_pow(sign, p) * num * _inv(den, p) % p
    return lhs == rhs, {"lhs": lhs, "rhs": rhs}


def check_ichij_sj(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    R = params.J_rho
    if J.issubset(R):
        raise Skip("needs J not contained in J_rho")
    p, f = params.p, params.f
    ie = i_exponents(J, params)
    lhs = digit_vector(ie.i_chi + to_integer(s_vector(J, params), p), p, f)
    oracle = ctx.oracle_for(params)
    s_ss, nss = s_vector(J & R, oracle), J - R
    rhs = tuple((p - 1 - s_ss[j]) if (j + 1) in nss else 0 for j in range(f))
    return lhs == rhs, {"lhs": list(lhs), "rhs": list(rhs)}


def check_mu_jstar(params: ParamSet, J: SubsetJ | None, ctx: Context) -> Result:
    R = params.J_rho
    if not R or R.is_full():
        raise Skip("needs J_rho neither empty nor everything")
    pair = mu_jstar_pair(params)
    return pair.value == params.F.one(), {"J_star": pair.J_star.to_list(), "sign_exp": pair.sign_exp,
                "mu_product": pair.mu_product.to_json(), "value": pair.value.to_json()}


# c'(J)

def _admissible(J: SubsetJ, R: SubsetJ) -> bool:
    return not R.is_full() and not J.issubset(R) and J != find_J_star(R)


def _simple(J: SubsetJ, R: SubsetJ) -> bool:
    return delta_ss(J, R) == J & R


def _cprime_check(params: ParamSet, J: SubsetJ, ctx: Context, simple: bool) -> Result:
    R = params.J_rho
    if not _admissible(J, R) or _simple(J, R) != simple:
        raise Skip("outside this regime")
    lhs = c_prime(J, params)
    oracle = ctx.oracle_for(params)
    A = exponents(J, R).A
    rhs = oracle.F(neg_one_pow(A, oracle.p))
    return lhs == rhs, {"c_prime": lhs.to_json(), "A": A}


def check_cprime_simple(params, J, ctx):
    return _cprime_check(params, J, ctx, simple=True)


def check_cprime_new(params, J, ctx):
    return _cprime_check(params, J, ctx, simple=False)


def check_cprime_parts(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    R = params.J_rho
    if not _admissible(J, R) or _simple(J, R):
        raise Skip("needs the regime (J-1)^ss != J^ss")
    parts = lemma_cprime_parts(J, params)
    oracle = ctx.oracle_for(params)
    prod_ap = oracle.F.one()
    for j in range(params.f):
        prod_ap = prod_ap * alpha_prime_per_index(J, j, oracle)
    sign = oracle.F(neg_one_pow(len(boundary(J) - R), oracle.p))
    bad = []
    if parts.U != parts.A_ss:
        bad.append(f"(i) U={parts.U} != A_ss={parts.A_ss}")
    if parts.alpha_prime != sign * prod_ap:
        bad.append("(ii) alpha' differs from its table")
    if parts.alpha * prod_ap != params.F.one():
        bad.append("(iii) alpha * prod alpha'_j != 1")
    if parts.alpha != parts.alpha_table:
        bad.append("alpha differs from the index-set count")
    return not bad, {"U": parts.U, "A_ss": parts.A_ss, "problems": bad}


# U_p

def check_up_prime(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    R = params.J_rho
    table = replace(up_chi_class(J, R, ctx.perturb), p_exp=0)
    kisin = replace(kisin_up_class(J, R), p_exp=0)
    char_problems = check_character_lemma(J, params)
    ok = table == kisin and not char_problems
    return ok, {"table": table.to_json(), "kisin": kisin.to_json(), "character": char_problems}


def check_up_closed(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    if params.J_rho.is_full():
        raise Skip("needs J_rho to be a proper subset")
    rep = verify_up_closed(J, params, ctx.perturb, ctx.oracle)
    return rep.ok, {"lhs": rep.lhs, "rhs": rep.rhs, "problems": rep.details}


def check_mu_empty(params: ParamSet, J: SubsetJ | None, ctx: Context) -> Result:
    empty = SubsetJ.empty(params.f)
    via_table = up_chi_class(empty, params.J_rho, ctx.perturb).evaluate(params)
    oracle = ctx.oracle_for(params)
    P1 = i_exponents(empty, oracle).P1
    via_mu = oracle.F(neg_one_pow(oracle.f - 1, oracle.p)) * P1 * mu_empty(oracle)
    return via_table == via_mu, {"table": via_table.to_json(), "mu": via_mu.to_json()}


# Matrices

def check_conjugation(params: ParamSet, J: SubsetJ | None, ctx: Context) -> Result:
    R = params.J_rho
    if not R or R.is_full():
        raise Skip("needs J_rho neither empty nor everything")
    M = build_extended_nu(ctx.oracle_for(params))
    inv0 = extract_invariants(M).to_json()
    canon0 = canonicalize(M)[0].entries
    rng = ctx.rng("conjugation", params.params_hash())
    trials = ctx.samples or 5
    changed = 0
    for _ in range(trials):
        Q = random_diagonal(params.F, M.size, rng)
        B = conjugate(M, Q)
        if extract_invariants(B).to_json() != inv0 or canonicalize(B)[0].entries != canon0:
            changed += 1
    return not changed, {"trials": trials, "changed": changed}


def check_theorem(params: ParamSet, J: SubsetJ | None, ctx: Context) -> Result:
    R = params.J_rho
    if not R or R.is_full():
        raise Skip("needs J_rho neither empty nor everything")
    rep = verify_main_theorem(params, ctx.oracle)
    return rep.ok, {"rows": rep.rows, "problems": rep.problems}


# Operators

def check_sss_product(params: ParamSet, J: SubsetJ | None, ctx: Context) -> Result:
    """Random pairs and triples over F_q; only (p, f) of params matter."""
    p, f, q = params.p, params.f, params.q
    if q > 125:
        raise Skip(f"convolution at q={q} is outside the desk-scale budget")
    if q < 4:
        raise Skip(f"no legal pairs over F_{q}")
    rng = ctx.rng("sss", p, f)
    n = ctx.samples or 200
    failures = []
    for k in range(n):
        while True:
            a, b = rng.randrange(1, q - 1), rng.randrange(1, q - 1)
            if legal_pair(a, b, q):
                break
        rep = verify_product_lemmas((a, b), p, f, ctx.precision)
        if not rep.ok:
            failures.append(rep.details)
    for k in range(max(1, n // 2)):
        while True:
            a1, a2 = rng.randrange(1, q - 1), rng.randrange(1, q - 1)
            a3 = (-a1 - a2) % (q - 1) if k % 2 else rng.randrange(1, q - 1)
            if (a1 + a2) % (q - 1) and 0 < a3 < q - 1:
                break
        rep = verify_product_lemmas((a1, a2, a3), p, f, ctx.precision)
        if not rep.ok:
            failures.append(rep.details)
    return not failures, {"q": q, "pairs": n, "triples": max(1, n // 2), "failures": failures[:5]}


OPERATOR_Q_LIMIT = 29**2


def check_ssv(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
    if params.q > OPERATOR_Q_LIMIT:
        raise Skip(f"principal series of dimension {params.q + 1} is outside the budget")
    rng = ctx.rng("ssv", params.params_hash(), J.bits)
    n = ctx.samples or 5
    failures = []
    for _ in range(n):
        a, b = random_ssv_args(J, params, rng)
        rep = verify_SSv(J, a, b, params, ctx.precision)
        if not rep.ok:
            failures.append(rep.details)
    return not failures, {"trials": n, "failures": failures[:5]}


def _pr_check(branch: str):
    def check(params: ParamSet, J: SubsetJ, ctx: Context) -> Result:
        R = params.J_rho
        if R.is_full() or J not in pr_subsets(R)[branch]:
            raise Skip(f"J outside the {branch} branch")
        if params.q > OPERATOR_Q_LIMIT:
            raise Skip(f"principal series of dimension {params.q + 1} is outside the budget")
        rep = verify_pr(J, params, ctx.precision, ctx.oracle)
        return rep.ok, rep.details
    return check


@dataclass(frozen=True)
class CheckSpec:
    fn: Callable
    per_subset: bool = True


SLUGS: dict[str, CheckSpec] = {
    "compare-sj": CheckSpec(check_compare_sj),
    "t-t-s": CheckSpec(check_t_t_s),
    "j-star": CheckSpec(check_j_star),
    "j0-delta": CheckSpec(check_j0_delta),
    "jab": CheckSpec(check_jab),
    "ichij-sj": CheckSpec(check_ichij_sj),
    "sss-product": CheckSpec(check_sss_product, per_subset=False),
    "ssv": CheckSpec(check_ssv),
    "pr-hu": CheckSpec(_pr_check("hu")),
    "pr-dl": CheckSpec(_pr_check("dl")),
    "pr-new": CheckSpec(_pr_check("new")),
    "cprime-simple": CheckSpec(check_cprime_simple),
    "cprime-new": CheckSpec(check_cprime_new),
    "cprime-parts": CheckSpec(check_cprime_parts),
    "up-prime": CheckSpec(check_up_prime),
    "up-closed": CheckSpec(check_up_closed),
    "mu-jstar": CheckSpec(check_mu_jstar, per_subset=False),
    "mu-empty-consistency": CheckSpec(check_mu_empty, per_subset=False),
    "conjugation": CheckSpec(check_conjugation, per_subset=False),
    "theorem": CheckSpec(check_theorem, per_subset=False),
}

TABLE_CASES = tuple(UP_CASES)


def _run_one(slug: str, params: ParamSet, J: SubsetJ | None, ctx: Context) -> CheckRecord | None:
    spec = SLUGS[slug]
    sub = None if J is None else J.to_list()
    base = (slug, params.params_hash(), params.to_json(), sub)
    try:
        ok, details = spec.fn(params, J, ctx)
    except Skip:
        return None
    except BranchError as exc:
        return CheckRecord(*base, "skip", {"reason": str(exc)})
    except NotScalarMultiple as exc:
        return CheckRecord(*base, "fail", {"error": str(exc)})
    except ArithmeticError as exc:
        return CheckRecord(*base, "error", {"error": f"{type(exc).__name__}: {exc}",
                                            "hint": "raise --precision if precision ran out"})
    return CheckRecord(*base, "pass" if ok else "fail", _jsonable(details))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    if hasattr(x, "to_json"):
        return x.to_json()
    return repr(x)


def run_checks(slugs: Iterable[str], param_sets: Iterable[ParamSet],
               mutate_oracle: Callable[[ParamSet], ParamSet] | None = None,
               perturb: str | None = None, seed: int = 0, samples: int | None = None,
               precision: int | None = None) -> list[CheckRecord]:
    """Run every slug on every ParamSet (and every subset where relevant)."""
    slugs = list(slugs)
    unknown = [s for s in slugs if s not in SLUGS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    records = []
    for params in param_sets:
        oracle = mutate_oracle(params) if mutate_oracle else None
        ctx = Context(oracle, perturb, seed, samples, precision)
        for slug in slugs:
            if SLUGS[slug].per_subset:
                targets = all_subsets(params.f)
            else:
                targets = [None]
            for J in targets:
                rec = _run_one(slug, params, J, ctx)
                if rec is not None:
                    records.append(rec)
    records.sort(key=CheckRecord.sort_key)
    return records
