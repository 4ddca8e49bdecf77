"""Weight vectors, characters, the digit/factorial calculus and scalar constants.

All constants here lie in the prime field.  Internally they are Python ints
reduced mod p; the public wrappers return elements of the coefficient field.
Signs (-1)^x with a multi-index exponent x are evaluated as (-1)^(sum of its
entries), which is valid because p is odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod

from .combinatorics import (
    SubsetJ,
    boundary,
    delta_chain,
    delta_ss,
    find_J_star,
    j_delta,
    run_length,
)
from .fields import FqElem, factorial_mod_p
from .params import ParamSet

__all__ = [
    "BranchError",
    "Character",
    "CprimeParts",
    "Digits",
    "IExponents",
    "JStarPair",
    "WeightVectors",
    "alpha_chi",
    "alpha_of_J",
    "alpha_per_index",
    "alpha_prime",
    "alpha_prime_per_index",
    "beta_chain",
    "c_chi",
    "c_chi_branch",
    "c_of_J",
    "c_prime",
    "chi",
    "chi_s",
    "digit_vector",
    "digits",
    "expected_alpha_product_sign",
    "gamma_empty",
    "gamma_of_J",
    "i_exponents",
    "i_plus",
    "jacobi_modp",
    "lemma_cprime_parts",
    "mu_JsJ",
    "mu_empty",
    "mu_jstar_pair",
    "neg_one_pow",
    "s_vector",
    "t_vector",
    "to_integer",
    "u_and_J",
    "u_and_J_multi",
    "u_value",
    "weight_vectors",
]


class BranchError(ValueError):
    """A constant was requested outside the subsets where it is defined."""


def neg_one_pow(x, p: int) -> int:
    """(-1)^x mod p, where x is an int or a vector summed entrywise."""
    n = x if isinstance(x, int) else sum(x)
    return 1 if n % 2 == 0 else p - 1


def _inv(x: int, p: int) -> int:
    return pow(x % p, -1, p)


def _fact(n: int, p: int) -> int:
    return factorial_mod_p(n, p)


def to_integer(vec, p: int) -> int:
    """sum_j vec_j p^j."""
    return sum(v * p**j for j, v in enumerate(vec))


# Weight vectors

@dataclass(frozen=True)
class WeightVectors:
    s: tuple[int, ...]
    t: tuple[int, ...]
    s_star: tuple[int, ...]
    t_star: tuple[int, ...]


def _s_entry(j: int, J: SubsetJ, J_rho: SubsetJ, r: int, p: int) -> int:
    here, nxt = j in J, (j + 1) in J
    if not here and not nxt:
        return r
    if here and not nxt:
        return r + 1
    if not here and nxt:
        return p - 2 - r
    return p - 3 - r if j in J_rho else p - 1 - r


def _t_entry(j: int, J: SubsetJ, J_rho: SubsetJ, r: int) -> int:
    here, nxt = j in J, (j + 1) in J
    if not here and not nxt:
        return 0
    if here and not nxt:
        return -1
    if not here or j in J_rho:
        return r + 1
    return r


@lru_cache(maxsize=None)
def s_vector(J: SubsetJ, params: ParamSet) -> tuple[int, ...]:
    return tuple(_s_entry(j, J, params.J_rho, params.r[j], params.p) for j in range(params.f))


@lru_cache(maxsize=None)
def t_vector(J: SubsetJ, params: ParamSet) -> tuple[int, ...]:
    return tuple(_t_entry(j, J, params.J_rho, params.r[j]) for j in range(params.f))


def weight_vectors(J: SubsetJ, params: ParamSet) -> WeightVectors:
    s, t = s_vector(J, params), t_vector(J, params)
    return WeightVectors(
        s=s,
        t=t,
        s_star=tuple(params.p - 1 - x for x in s),
        t_star=tuple(rj - x for rj, x in zip(params.r, t)),
    )


@dataclass(frozen=True)
class Character:
    """chi(diag(a, d)) = a^a1 d^a2 on the torus of GL_2(F_q); exponents mod q-1."""

    a1: int
    a2: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "a1", self.a1 % (self.q - 1))
        object.__setattr__(self, "a2", self.a2 % (self.q - 1))

    def conj_s(self) -> "Character":
        return Character(self.a2, self.a1, self.q)

    def twist(self, i: int) -> "Character":
        """chi * alpha^i with alpha(diag(a, d)) = a d^{-1}."""
        return Character(self.a1 + i, self.a2 - i, self.q)


def _character(s, t, p: int, q: int) -> Character:
    return Character(to_integer([a + b for a, b in zip(s, t)], p), to_integer(t, p), q)


def chi(J: SubsetJ, params: ParamSet) -> Character:
    return _character(s_vector(J, params), t_vector(J, params), params.p, params.q)


def chi_s(J: SubsetJ, params: ParamSet) -> Character:
    """The character of the conjugate weight, built from (s*, t*)."""
    w = weight_vectors(J, params)
    return _character(w.s_star, w.t_star, params.p, params.q)


# Digit calculus

@dataclass(frozen=True)
class Digits:
    value: int
    aq: int
    digits: tuple[int, ...]


@lru_cache(maxsize=None)
def digit_vector(a: int, p: int, f: int) -> tuple[int, ...]:
    aq = a % (p**f - 1)
    out = []
    for _ in range(f):
        aq, d = divmod(aq, p)
        out.append(d)
    return tuple(out)


def digits(a: int, params: ParamSet) -> Digits:
    aq = a % (params.q - 1)
    return Digits(a, aq, digit_vector(a, params.p, params.f))


def _arg_digits(a: int, p: int, f: int, top: bool) -> tuple[int, ...]:
    if top and a % (p**f - 1) == 0:
        return (p - 1,) * f
    return digit_vector(a, p, f)


def u_value(args, p: int, f: int, top_zero: bool = False) -> int:
    """u(a_1, ..., a_n); an exact integer by construction.

    With top_zero, arguments divisible by q-1 use the digits of q-1 instead
    of 0 (the sum keeps the 0 representative).
    """
    total = sum(digit_vector(sum(args), p, f))
    numer = sum((p - 1) * f - sum(_arg_digits(a, p, f, top_zero)) for a in args) - ((p - 1) * f - total)
    u, rem = divmod(numer, p - 1)
    if rem:
        raise AssertionError(f"u{tuple(args)} is not an integer")
    return u


def jacobi_modp(args, p: int, f: int, top_zero: bool = False) -> int:
    """The signed factorial ratio J(a_1, ..., a_n) mod p."""
    args = list(args)
    n = len(args)
    u = u_value(args, p, f, top_zero)
    num = 1
    for a in args:
        for d in _arg_digits(a, p, f, top_zero):
            num = num * _fact(d, p) % p
    den = prod(_fact(d, p) for d in digit_vector(sum(args), p, f)) % p
    return neg_one_pow((n - 1) * (f - 1) + u, p) * num * _inv(den, p) % p


def u_and_J(a: int, b: int, params: ParamSet) -> tuple[int, FqElem]:
    return u_and_J_multi((a, b), params)


def u_and_J_multi(args, params: ParamSet) -> tuple[int, FqElem]:
    p, f = params.p, params.f
    return u_value(args, p, f), params.F(jacobi_modp(args, p, f))


# i-exponents and the P factors

@dataclass(frozen=True)
class IExponents:
    i_chi: int
    i_chi_s: int
    P1: FqElem
    P2: FqElem


@lru_cache(maxsize=None)
def _i_chi_s_digits(J: SubsetJ, params: ParamSet) -> tuple[int, ...]:
    p, R = params.p, params.J_rho
    Jd = j_delta(J, R)
    s_prev = s_vector(delta_ss(J, R), params)
    return tuple((p - 1 - s_prev[j]) if (j + 1) in Jd else 0 for j in range(params.f))


@lru_cache(maxsize=None)
def _i_chi_digits(J: SubsetJ, params: ParamSet) -> tuple[int, ...]:
    p, R = params.p, params.J_rho
    J_nss = J - R
    s_ss = s_vector(J & R, params)
    return tuple(0 if (j + 1) in J_nss else (p - 1 - s_ss[j]) for j in range(params.f))


def _P1_chi(J: SubsetJ, params: ParamSet) -> int:
    p = params.p
    return prod(_fact(d, p) for d in _i_chi_s_digits(J, params)) % p


def _P2_chi(J: SubsetJ, params: ParamSet) -> int:
    p = params.p
    return prod(_fact(d, p) for d in _i_chi_digits(J, params)) % p


def i_exponents(J: SubsetJ, params: ParamSet) -> IExponents:
    p = params.p
    return IExponents(
        i_chi=to_integer(_i_chi_digits(J, params), p),
        i_chi_s=to_integer(_i_chi_s_digits(J, params), p),
        P1=params.F(_P1_chi(J, params)),
        P2=params.F(_P2_chi(J, params)),
    )


def _s_int(J: SubsetJ, params: ParamSet) -> int:
    return to_integer(s_vector(J, params), params.p)


def _t_sum(J: SubsetJ, params: ParamSet) -> int:
    return sum(t_vector(J, params))


@lru_cache(maxsize=None)
def _j_star(J_rho: SubsetJ) -> SubsetJ:
    return find_J_star(J_rho)


def c_chi_branch(J: SubsetJ, params: ParamSet) -> str:
    """Which closed form governs c(chi_J): "hu", "dl" or "new"."""
    R = params.J_rho
    if J == _j_star(R):
        raise BranchError(f"c(chi_J) is undefined at J = J* = {J}")
    if delta_ss(J, R) == J & R:
        return "hu"
    if J.issubset(R):
        return "dl"
    return "new"


def i_plus(J: SubsetJ, params: ParamSet) -> int:
    branch = c_chi_branch(J, params)
    p, q = params.p, params.q
    i_s = to_integer(_i_chi_s_digits(J, params), p)
    if branch == "dl":
        return q - 1 - i_s
    if branch == "new":
        return to_integer(_i_chi_digits(J, params), p) - i_s + _s_int(J, params)
    raise BranchError(f"i_plus is undefined for J={J} with (J-1)^ss = J^ss and J nonempty")


@lru_cache(maxsize=None)
def _c_chi(J: SubsetJ, params: ParamSet) -> int:
    p, f, q = params.p, params.f, params.q
    branch = c_chi_branch(J, params)
    i_s = to_integer(_i_chi_s_digits(J, params), p)
    s = _s_int(J, params)
    head = jacobi_modp((i_s, -s), p, f)
    if branch == "dl":
        return head
    sign = neg_one_pow(_t_sum(J, params), p)
    i_c = to_integer(_i_chi_digits(J, params), p)
    if branch == "hu":
        if (i_s - s - i_c) % (q - 1):
            raise AssertionError(f"index congruence fails for J={J}")
        return sign * head % p
    tail = jacobi_modp((i_plus(J, params), -i_c - s), p, f)
    return sign * head * _inv(tail, p) % p


def c_chi(J: SubsetJ, params: ParamSet) -> FqElem:
    return params.F(_c_chi(J, params))


def _chain(J: SubsetJ, params: ParamSet) -> list[SubsetJ]:
    return delta_chain(J, params.J_rho)


def _beta_chain(J: SubsetJ, params: ParamSet) -> int:
    chain = _chain(J, params)
    return jacobi_modp([i_plus(K, params) for K in chain], params.p, params.f)


def beta_chain(J: SubsetJ, params: ParamSet) -> FqElem:
    """J-constant of the i+ chain of J.

    The empty chain gets the value of the general formula with no arguments,
    namely -1 (with u = -f).
    """
    return params.F(_beta_chain(J, params))


def _chain_ratio(J: SubsetJ, params: ParamSet, fn) -> int:
    p = params.p
    num = prod(fn(K, params) for K in _chain(J, params)) % p
    den = prod(fn(K, params) for K in _chain(J & params.J_rho, params)) % p
    return num * _inv(den, p) % p


def _require_admissible(J: SubsetJ, params: ParamSet, what: str) -> None:
    if J.issubset(params.J_rho):
        raise BranchError(f"{what} needs J not contained in J_rho, got J={J}")
    if J == _j_star(params.J_rho):
        raise BranchError(f"{what} is undefined at J = J* = {J}")


def _is_simple(J: SubsetJ, params: ParamSet) -> bool:
    return delta_ss(J, params.J_rho) == J & params.J_rho


@lru_cache(maxsize=None)
def _c_of_J(J: SubsetJ, params: ParamSet) -> int:
    _require_admissible(J, params, "c(J)")
    if _is_simple(J, params):
        return _c_chi(J, params)
    p = params.p
    beta = _beta_chain(J, params) * _inv(_beta_chain(J & params.J_rho, params), p)
    return beta * _chain_ratio(J, params, _c_chi) % p


def c_of_J(J: SubsetJ, params: ParamSet) -> FqElem:
    return params.F(_c_of_J(J, params))


def _mu_JsJ(J: SubsetJ, params: ParamSet) -> int:
    if (J - params.J_rho).is_full():
        raise BranchError("mu_{J^s,J} is undefined when J^nss is everything")
    p = params.p
    w = weight_vectors(J, params)
    return neg_one_pow(w.t_star, p) * prod(_fact(x, p) for x in w.s) % p


def mu_JsJ(J: SubsetJ, params: ParamSet) -> FqElem:
    return params.F(_mu_JsJ(J, params))


def _nss_overlap(J: SubsetJ, params: ParamSet) -> int:
    """|J intersect (J-1)^nss|."""
    return len(J & (J.shift(-1) - params.J_rho))


@lru_cache(maxsize=None)
def _c_prime(J: SubsetJ, params: ParamSet) -> int:
    p = params.p
    sign = neg_one_pow(params.f - 1 + _nss_overlap(J, params), p)
    P1 = _chain_ratio(J, params, _P1_chi)
    val = sign * _mu_JsJ(J, params) * _P2_chi(J, params) * _inv(P1, p)
    return val * _c_of_J(J, params) % p


def c_prime(J: SubsetJ, params: ParamSet) -> FqElem:
    return params.F(_c_prime(J, params))


# Pieces of c'(J) in the regime (J-1)^ss != J^ss

def _alpha_chi(J: SubsetJ, params: ParamSet) -> int:
    p, f = params.p, params.f
    ds = _i_chi_s_digits(J, params)
    jab = jacobi_modp((to_integer(ds, p), -_s_int(J, params)), p, f)
    facts = prod(_fact(p - 1 - d, p) for d in ds) % p
    return jab * neg_one_pow(f - 1, p) * facts * _inv(_P1_chi(J, params), p) % p


def alpha_chi(J: SubsetJ, params: ParamSet) -> FqElem:
    return params.F(_alpha_chi(J, params))


def alpha_of_J(J: SubsetJ, params: ParamSet) -> FqElem:
    """Chain ratio of alpha(chi_K) over delta_ss(J) and delta_ss(J^ss)."""
    return params.F(_chain_ratio(J, params, _alpha_chi))


def alpha_prime(J: SubsetJ, params: ParamSet) -> FqElem:
    p, f = params.p, params.f
    sign = neg_one_pow(_nss_overlap(J, params) + _t_sum(J, params), p)
    shifted = -to_integer(_i_chi_digits(J, params), p) - _s_int(J, params)
    den = prod(_fact(d, p) for d in digit_vector(shifted, p, f)) % p
    val = sign * _mu_JsJ(J, params) * _P2_chi(J, params) * _inv(den, p) % p
    return params.F(val)


def alpha_prime_per_index(J: SubsetJ, j: int, params: ParamSet) -> FqElem:
    """The six-case table for the j-th factor of alpha'(J)."""
    p, R = params.p, params.J_rho
    r = params.r[j]
    J_nss = J - R
    here, nxt = j in J_nss, (j + 1) in J_nss
    if not here and not nxt:
        val = 1
    elif here and (j + 1) not in J:
        val = r + 1
    elif here and not nxt:
        val = p - 1 - r
    elif j not in J:
        val = -_inv(_fact(r, p) * _fact(r + 1, p), p)
    elif not here:
        val = -_inv(_fact(r + 1, p) * _fact(r + 2, p), p)
    else:
        val = _inv(_fact(r, p) ** 2, p)
    return params.F(val)


def _I_sets(J: SubsetJ, j: int, params: ParamSet, depth: int) -> dict[int, int]:
    """Cardinalities of the index sets I^1..I^8 at position j."""
    R = params.J_rho
    chain = [J]
    for _ in range(depth + 1):
        chain.append(delta_ss(chain[-1], R))
    sizes = dict.fromkeys(range(1, 9), 0)
    for i in range(depth + 1):
        cur, nxt = (j + 1) in chain[i], (j + 1) in chain[i + 1]
        in_delta = j in j_delta(chain[i], R)
        kind = {(True, False): 1, (False, True): 2, (True, True): 3, (False, False): 4}[(cur, nxt)]
        sizes[kind] += 1
        if kind in (1, 2) and not in_delta:
            sizes[kind + 4] += 1
        if kind in (3, 4) and in_delta:
            sizes[kind + 4] += 1
    return sizes


def alpha_per_index(J: SubsetJ, j: int, params: ParamSet) -> FqElem:
    """alpha(J)_j from the index-set cardinalities."""
    p, R = params.p, params.J_rho
    r = params.r[j]
    in_rho = int(j in R)
    depth = params.f + 2
    a, b = _I_sets(J, j, params, depth), _I_sets(J & R, j, params, depth)
    i1 = a[1] - b[1]
    i2 = a[2] - b[2]
    i3 = (a[5] - b[5]) - (a[7] - b[7])
    i4 = (a[6] - b[6]) - (a[8] - b[8])
    val = (
        pow(_fact(r + in_rho, p), 2 * i1, p)
        * pow(_fact(p - 2 - r, p), 2 * i2, p)
        * pow(p - 1 - r - in_rho, i3, p)
        * pow(r + 1, i4, p)
    )
    return params.F(val)


@dataclass(frozen=True)
class CprimeParts:
    U: int
    A_ss: int
    alpha_prime: FqElem
    alpha_prime_table: FqElem
    alpha: FqElem
    alpha_table: FqElem
    c_prime: FqElem


def lemma_cprime_parts(J: SubsetJ, params: ParamSet) -> CprimeParts:
    """U(J), alpha'(J) and alpha(J), each from its definition and its table."""
    from .combinatorics import exponents

    _require_admissible(J, params, "the c'(J) decomposition")
    if _is_simple(J, params):
        raise BranchError(f"J={J} has (J-1)^ss = J^ss; the decomposition needs the other regime")
    p, f, R = params.p, params.f, params.J_rho
    chain, chain_ss = _chain(J, params), _chain(J & R, params)
    u_J = u_value([i_plus(K, params) for K in chain], p, f)
    u_ss = u_value([i_plus(K, params) for K in chain_ss], p, f)
    i_c = to_integer(_i_chi_digits(J, params), p)
    u_prime = u_value((i_plus(J, params), -i_c - _s_int(J, params)), p, f)
    sign = neg_one_pow(len(boundary(J) - R), p)
    ap_table = params.F(sign)
    al_table = params.F(1)
    for j in range(f):
        ap_table = ap_table * alpha_prime_per_index(J, j, params)
        al_table = al_table * alpha_per_index(J, j, params)
    return CprimeParts(
        U=u_J - u_ss - u_prime,
        A_ss=exponents(J, R).A_ss,
        alpha_prime=alpha_prime(J, params),
        alpha_prime_table=ap_table,
        alpha=alpha_of_J(J, params),
        alpha_table=al_table,
        c_prime=c_prime(J, params),
    )


def expected_alpha_product_sign(J: SubsetJ, j: int, params: ParamSet) -> int:
    """Sign of alpha(J)_j * alpha'(J)_j predicted by the case analysis."""
    R = params.J_rho
    if (j + 1) in R and j not in R:
        k = run_length(j, R) - 1
        return -1 if (j + k + 1) not in J and (j + k + 2) in J else 1
    if (j + 1) not in R and j in R:
        return -1 if j not in J and (j + 1) in J else 1
    return 1


def gamma_of_J(J: SubsetJ, params: ParamSet) -> FqElem:
    """gamma(J) = U_p(J) c'(J) with U_p(J) evaluated from its leading monomial."""
    from .leadterm import tilde_up

    return tilde_up(J, params.J_rho).evaluate(params) * c_prime(J, params)


@dataclass(frozen=True)
class JStarPair:
    J_star: SubsetJ
    sign_exp: int
    mu_product: FqElem
    value: FqElem


def mu_jstar_pair(params: ParamSet) -> JStarPair:
    """(-1)^{|J* & (J*-1)^nss|} times the two mu constants linking J* and (J*-1)^ss.

    mu_{(J*-1)^ss, J*} is the closed form at J* and mu_{J*, (J*-1)^ss} the
    closed form at (J*-1)^ss, because the two weights are conjugate.
    """
    R = params.J_rho
    if not R or R.is_full():
        raise BranchError("the J* pair needs J_rho to be neither empty nor everything")
    p = params.p
    Js = _j_star(R)
    K = delta_ss(Js, R)
    mu = _mu_JsJ(Js, params) * _mu_JsJ(K, params) % p
    e = _nss_overlap(Js, params)
    return JStarPair(Js, e, params.F(mu), params.F(neg_one_pow(e, p) * mu % p))


def mu_empty(params: ParamSet) -> FqElem:
    """mu_{empty,empty} = (-1)^{f-1} xi."""
    return params.F(neg_one_pow(params.f - 1, params.p)) * params.xi


def gamma_empty(params: ParamSet) -> FqElem:
    """gamma_{empty,empty}: the sign (-1)^{f-1} times mu_{empty,empty}."""
    return params.F(neg_one_pow(params.f - 1, params.p)) * mu_empty(params)
