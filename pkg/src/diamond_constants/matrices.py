"""The 2^f x 2^f constant matrices, their conjugation invariants and canonical forms.

Rows and columns are indexed by subsets of Z/f (by bit mask).  The extended
matrices are stored as entries[J][J'] and are supported on the pattern
(J-1)^ss = (J')^ss.  The banded Frobenius matrix uses the other orientation,
entries[J'][J+1]; `to_phi_orientation` converts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import prod

from .combinatorics import (
    SubsetJ,
    all_subsets,
    d_exponent_vector,
    delta_chain,
    delta_ss,
    exponents,
    find_J_star,
)
from .fields import FqElem
from .params import ParamSet
from .weights import gamma_empty, gamma_of_J, mu_jstar_pair

__all__ = [
    "ConstMatrix",
    "Invariants",
    "MainTheoremReport",
    "PatternError",
    "admissible_subsets",
    "build_banded",
    "build_extended_nu",
    "canonicalize",
    "check_conditions",
    "conjugate",
    "extract_invariants",
    "gamma_invariants",
    "in_band",
    "in_pattern",
    "nu",
    "nu_of_J_closed",
    "random_diagonal",
    "reconstruct_from_invariants",
    "to_phi_orientation",
    "verify_main_theorem",
]


class PatternError(ValueError):
    pass


def in_pattern(J: SubsetJ, Jp: SubsetJ, J_rho: SubsetJ) -> bool:
    return delta_ss(J, J_rho) == Jp & J_rho


def in_band(J: SubsetJ, Jp: SubsetJ, J_rho: SubsetJ) -> bool:
    """(J-1)^ss <= J' <= J-1."""
    return delta_ss(J, J_rho).issubset(Jp) and Jp.issubset(J.shift(-1))


def nu(J: SubsetJ, Jp: SubsetJ, params: ParamSet) -> FqElem:
    R = params.J_rho
    if not in_pattern(J, Jp, R):
        raise PatternError(f"nu_{{{J},{Jp}}} is outside the pattern (J-1)^ss = (J')^ss")
    num = prod((params.d[j] for j in J.shift(-1) - R), start=params.F.one())
    den = prod((params.d[j] for j in Jp - R), start=params.F.one())
    return params.beta ** (params.f - 2 * len(J)) * num / den


@dataclass(frozen=True)
class ConstMatrix:
    f: int
    J_rho: SubsetJ
    entries: tuple[tuple[FqElem, ...], ...]
    banded: bool = False

    def __getitem__(self, key: tuple[SubsetJ, SubsetJ]) -> FqElem:
        J, Jp = key
        return self.entries[J.bits][Jp.bits]

    @property
    def zero(self) -> FqElem:
        return self.entries[0][0] * 0

    @property
    def size(self) -> int:
        return 1 << self.f

    def to_json(self) -> dict:
        out = {}
        for J in all_subsets(self.f):
            for Jp in all_subsets(self.f):
                x = self[J, Jp]
                if x:
                    out[f"{J}|{Jp}"] = x.to_json()
        return {"f": self.f, "J_rho": self.J_rho.to_list(), "banded": self.banded, "entries": out}


def _from_fn(f: int, J_rho: SubsetJ, zero: FqElem, fn, banded: bool = False) -> ConstMatrix:
    subsets = all_subsets(f)

    def at(J, Jp):
        x = fn(J, Jp)
        return zero if x is None else x

    rows = tuple(tuple(at(J, Jp) for Jp in subsets) for J in subsets)
    return ConstMatrix(f, J_rho, rows, banded)


def check_conditions(B: ConstMatrix) -> list[str]:
    """Support exactly on the pattern, and ratio consistency within each block."""
    R, problems = B.J_rho, []
    subsets = all_subsets(B.f)
    for J in subsets:
        for Jp in subsets:
            if bool(B[J, Jp]) != in_pattern(J, Jp, R):
                problems.append(f"support at ({J},{Jp}) does not match the pattern")
    # rows J1, J2 with the same (J-1)^ss and columns J3, J4 with that ss part
    blocks: dict[SubsetJ, tuple[list, list]] = {}
    for J in subsets:
        blocks.setdefault(delta_ss(J, R), ([], []))[0].append(J)
        blocks.setdefault(J & R, ([], []))[1].append(J)
    for rows, cols in blocks.values():
        if not rows or not cols:
            continue
        ref_row, ref_col = rows[0], cols[0]
        for J1 in rows[1:]:
            for J3 in cols[1:]:
                lhs = B[J1, J3] * B[ref_row, ref_col]
                rhs = B[ref_row, J3] * B[J1, ref_col]
                if lhs != rhs:
                    problems.append(f"ratio consistency fails at rows {ref_row},{J1} cols {ref_col},{J3}")
    return problems


def build_extended_nu(params: ParamSet, check: bool = True) -> ConstMatrix:
    R = params.J_rho
    if R.is_full():
        raise ValueError("the extended nu matrix needs J_rho to be a proper subset")
    M = _from_fn(params.f, R, params.F.zero(),
                 lambda J, Jp: nu(J, Jp, params) if in_pattern(J, Jp, R) else None)
    if check:
        problems = check_conditions(M)
        if problems:
            raise AssertionError("; ".join(problems))
    return M


def build_banded(M: ConstMatrix) -> ConstMatrix:
    R = M.J_rho
    return _from_fn(M.f, R, M.zero,
                    lambda J, Jp: M[J, Jp] if in_band(J, Jp, R) else None, banded=True)


def to_phi_orientation(M: ConstMatrix) -> list[list[FqElem]]:
    """entries[J'][J] -> M[J][J'], the row/column convention of the Frobenius matrix."""
    subsets = all_subsets(M.f)
    return [[M[J, Jp] for J in subsets] for Jp in subsets]


def conjugate(B: ConstMatrix, Q: list[FqElem]) -> ConstMatrix:
    """Q^{-1} B Q for a diagonal Q given by its entries."""
    return _from_fn(B.f, B.J_rho, B.zero,
                    lambda J, Jp: B[J, Jp] * Q[Jp.bits] / Q[J.bits], banded=B.banded)


def random_diagonal(F, size: int, rng: random.Random) -> list[FqElem]:
    return [F.random(rng, nonzero=True) for _ in range(size)]


def admissible_subsets(J_rho: SubsetJ) -> list[SubsetJ]:
    """J not contained in J_rho and different from J*."""
    Js = find_J_star(J_rho)
    return [J for J in all_subsets(J_rho.f) if not J.issubset(J_rho) and J != Js]


def _chain_product(B: ConstMatrix, J: SubsetJ) -> FqElem:
    R = B.J_rho
    out = B.entries[0][0] ** 0
    for K in delta_chain(J, R):
        out = out * B[K, delta_ss(K, R)]
    return out


def _star_ratio(B: ConstMatrix, J: SubsetJ) -> FqElem:
    """B_{*,J} / B_{*,J^ss}, checked to be the same for every admissible row."""
    R = B.J_rho
    values = {
        B[row, J] / B[row, J & R]
        for row in all_subsets(B.f)
        if delta_ss(row, R) == J & R
    }
    if len(values) != 1:
        raise PatternError(f"B_*,{J} / B_*,{J & R} depends on the row: {values}")
    return values.pop()


@dataclass
class Invariants:
    at_empty: FqElem
    at_Jstar: FqElem
    at_J: dict[SubsetJ, FqElem] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "at_empty": self.at_empty.to_json(),
            "at_Jstar": self.at_Jstar.to_json(),
            "at_J": {repr(J): x.to_json() for J, x in sorted(self.at_J.items(), key=lambda kv: kv[0].sort_key())},
        }


def extract_invariants(B: ConstMatrix) -> Invariants:
    R = B.J_rho
    empty = SubsetJ.empty(B.f)
    Js = find_J_star(R)
    K = delta_ss(Js, R)
    at_J = {}
    for J in admissible_subsets(R):
        at_J[J] = _star_ratio(B, J) * _chain_product(B, J) / _chain_product(B, J & R)
    return Invariants(B[empty, empty], B[K, Js] * B[Js, K], at_J)


def canonicalize(B: ConstMatrix) -> tuple[ConstMatrix, list[FqElem]]:
    """Conjugate so that B[J, delta_ss(J)] = 1 for all nonempty J."""
    Q = [_chain_product(B, J) for J in all_subsets(B.f)]
    return conjugate(B, Q), Q


def reconstruct_from_invariants(inv: Invariants, f: int, J_rho: SubsetJ) -> ConstMatrix:
    """The canonical matrix with the given invariants."""
    R = J_rho
    one = inv.at_empty ** 0
    Js = find_J_star(R)
    K = delta_ss(Js, R)

    def to_ss(J: SubsetJ) -> FqElem:
        # the canonical B[J, (J-1)^ss]
        return inv.at_empty if not J else one

    def entry(J: SubsetJ, Jp: SubsetJ):
        if not in_pattern(J, Jp, R):
            return None
        if Jp.issubset(R):
            return to_ss(J)
        if Jp == Js:
            return inv.at_Jstar * to_ss(J) / to_ss(K)
        return inv.at_J[Jp] * to_ss(J)

    return _from_fn(f, R, one * 0, entry)


def nu_of_J_closed(J: SubsetJ, params: ParamSet) -> FqElem:
    """beta^B(J) d(J) from the combinatorial exponents."""
    R = params.J_rho
    val = params.beta ** exponents(J, R).B
    for j, e in d_exponent_vector(J, R).items():
        if e:
            val = val * params.d[j] ** e
    return val


def gamma_invariants(params: ParamSet) -> Invariants:
    """The gamma-side invariants, computed without building any matrix."""
    R = params.J_rho
    return Invariants(
        gamma_empty(params),
        mu_jstar_pair(params).value,
        {J: gamma_of_J(J, params) for J in admissible_subsets(R)},
    )


@dataclass
class MainTheoremReport:
    ok: bool
    rows: list[dict]
    problems: list[str]


def verify_main_theorem(params: ParamSet, oracle_params: ParamSet | None = None) -> MainTheoremReport:
    """Compare the nu-side and gamma-side invariants and canonical forms.

    `oracle_params` (default: params) feeds the nu side only; passing a
    perturbed copy is a negative control.
    """
    R = params.J_rho
    if not R or R.is_full():
        raise ValueError("the main theorem check needs J_rho to be neither empty nor everything")
    nu_params = oracle_params or params
    M = build_extended_nu(nu_params)
    nu_inv = extract_invariants(M)
    g_inv = gamma_invariants(params)
    rows, problems = [], []

    def record(family, J, lhs, rhs):
        ok = lhs == rhs
        rows.append({"family": family, "J": None if J is None else J.to_list(),
                     "nu": lhs.to_json(), "gamma": rhs.to_json(), "ok": ok})
        if not ok:
            problems.append(f"{family} at J={J}: nu side {lhs}, gamma side {rhs}")

    record("empty", None, nu_inv.at_empty, g_inv.at_empty)
    record("J*", find_J_star(R), nu_inv.at_Jstar, g_inv.at_Jstar)
    for J in nu_inv.at_J:
        record("J", J, nu_inv.at_J[J], g_inv.at_J[J])
        closed = nu_of_J_closed(J, nu_params)
        if closed != nu_inv.at_J[J]:
            problems.append(f"nu(J) chain product {nu_inv.at_J[J]} != closed form {closed} at J={J}")

    canon, Q = canonicalize(M)
    rebuilt = reconstruct_from_invariants(g_inv, params.f, R)
    if canon.entries != rebuilt.entries:
        problems.append("canonical forms differ")
    band_canon = build_banded(canon)
    if band_canon.entries != build_banded(rebuilt).entries:
        problems.append("banded canonical forms differ")
    if conjugate(build_banded(M), Q).entries != band_canon.entries:
        problems.append("conjugation does not commute with banding")
    return MainTheoremReport(not problems, rows, problems)
