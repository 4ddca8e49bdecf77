"""Subsets of Z/fZ and the integer exponents built from them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

__all__ = [
    "DerivedOps",
    "Exponents",
    "SubsetJ",
    "all_subsets",
    "boundary",
    "complement_boundary",
    "d_exponent_vector",
    "d_exponent_vector_via_runs",
    "delta_chain",
    "delta_chain_via_runs",
    "delta_ss",
    "derived_ops",
    "ell",
    "exponents",
    "exponents_via_runs",
    "find_J_star",
    "interval_decomposition",
    "j_delta",
    "run_length",
]


class SubsetJ:
    """A subset of Z/fZ stored as an f-bit mask."""

    __slots__ = ("bits", "f")

    def __init__(self, bits: int, f: int):
        if f < 1:
            raise ValueError("f must be positive")
        self.bits = bits & ((1 << f) - 1)
        self.f = f

    @classmethod
    def of(cls, indices: Iterable[int], f: int) -> "SubsetJ":
        bits = 0
        for j in indices:
            bits |= 1 << (j % f)
        return cls(bits, f)

    @classmethod
    def empty(cls, f: int) -> "SubsetJ":
        return cls(0, f)

    @classmethod
    def full(cls, f: int) -> "SubsetJ":
        return cls((1 << f) - 1, f)

    def __contains__(self, j: int) -> bool:
        return bool(self.bits >> (j % self.f) & 1)

    def __iter__(self) -> Iterator[int]:
        return (j for j in range(self.f) if self.bits >> j & 1)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __bool__(self) -> bool:
        return self.bits != 0

    def _check(self, other: "SubsetJ") -> None:
        if self.f != other.f:
            raise ValueError(f"subsets of Z/{self.f} and Z/{other.f} do not mix")

    def __or__(self, other: "SubsetJ") -> "SubsetJ":
        self._check(other)
        return SubsetJ(self.bits | other.bits, self.f)

    def __and__(self, other: "SubsetJ") -> "SubsetJ":
        self._check(other)
        return SubsetJ(self.bits & other.bits, self.f)

    def __sub__(self, other: "SubsetJ") -> "SubsetJ":
        self._check(other)
        return SubsetJ(self.bits & ~other.bits, self.f)

    def __xor__(self, other: "SubsetJ") -> "SubsetJ":
        self._check(other)
        return SubsetJ(self.bits ^ other.bits, self.f)

    def complement(self) -> "SubsetJ":
        return SubsetJ(~self.bits, self.f)

    def shift(self, k: int) -> "SubsetJ":
        """The translate J + k."""
        return SubsetJ.of((j + k for j in self), self.f)

    def issubset(self, other: "SubsetJ") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def is_full(self) -> bool:
        return self.bits == (1 << self.f) - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubsetJ):
            return NotImplemented
        return self.bits == other.bits and self.f == other.f

    def __hash__(self) -> int:
        return hash((self.bits, self.f))

    def sort_key(self) -> tuple[int, list[int]]:
        return (len(self), sorted(self))

    def to_list(self) -> list[int]:
        return list(self)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


def all_subsets(f: int) -> list[SubsetJ]:
    return [SubsetJ(b, f) for b in range(1 << f)]


def boundary(J: SubsetJ) -> SubsetJ:
    """J minus (J - 1): the last element of each run of J."""
    return J - J.shift(-1)


def complement_boundary(J: SubsetJ) -> SubsetJ:
    """{j not in J with j + 1 in J}."""
    return boundary(J.complement())


def delta_ss(J: SubsetJ, J_rho: SubsetJ) -> SubsetJ:
    return J.shift(-1) & J_rho


def j_delta(J: SubsetJ, J_rho: SubsetJ) -> SubsetJ:
    return J ^ delta_ss(J, J_rho)


@dataclass(frozen=True)
class DerivedOps:
    J_ss: SubsetJ
    J_nss: SubsetJ
    J_c: SubsetJ
    boundary: SubsetJ
    delta_ss: SubsetJ
    J_delta: SubsetJ


def derived_ops(J: SubsetJ, J_rho: SubsetJ) -> DerivedOps:
    return DerivedOps(
        J_ss=J & J_rho,
        J_nss=J - J_rho,
        J_c=J.complement(),
        boundary=boundary(J),
        delta_ss=delta_ss(J, J_rho),
        J_delta=j_delta(J, J_rho),
    )


def _require_proper(J_rho: SubsetJ, what: str) -> None:
    if J_rho.is_full():
        raise ValueError(f"{what} undefined when J_rho is all of Z/{J_rho.f}")


def delta_chain(J: SubsetJ, J_rho: SubsetJ) -> list[SubsetJ]:
    """[J, delta_ss(J), ..., delta_ss^{l-1}(J)], stopping before the empty set."""
    chain = []
    seen = set()
    while J:
        if J in seen:
            raise ValueError("ell undefined: the delta_ss orbit cycles")
        seen.add(J)
        chain.append(J)
        J = delta_ss(J, J_rho)
    return chain


def ell(J: SubsetJ, J_rho: SubsetJ) -> int:
    if J and J_rho.is_full():
        raise ValueError("ell undefined when J_rho is everything and J is nonempty")
    return len(delta_chain(J, J_rho))


def find_J_star(J_rho: SubsetJ) -> SubsetJ:
    """The unique J with J symmetric-difference (J-1)^ss equal to everything."""
    _require_proper(J_rho, "J*")
    hits = [J for J in all_subsets(J_rho.f) if j_delta(J, J_rho).is_full()]
    if len(hits) != 1:
        raise AssertionError(f"expected a unique J*, found {hits}")
    return hits[0]


def run_length(j: int, J_rho: SubsetJ) -> int:
    """k(j): number of consecutive members of J_rho right after j."""
    _require_proper(J_rho, "run length")
    k = 0
    while (j + k + 1) in J_rho:
        k += 1
    return k


def interval_decomposition(J_rho: SubsetJ) -> list[tuple[int, int]]:
    """Maximal cyclic runs {j, ..., j+k} of J_rho as (j, k), ordered by start."""
    _require_proper(J_rho, "interval decomposition")
    return [(j, run_length(j, J_rho)) for j in J_rho - J_rho.shift(1)]


@dataclass(frozen=True)
class Exponents:
    A_ss: int
    A: int
    B: int


def _chain_weight(J: SubsetJ, J_rho: SubsetJ) -> int:
    return sum(J.f - 2 * len(K) for K in delta_chain(J, J_rho))


def exponents(J: SubsetJ, J_rho: SubsetJ) -> Exponents:
    _require_proper(J_rho, "exponents")
    bd_c = complement_boundary(J)
    A_ss = sum(k + 1 for j, k in interval_decomposition(J_rho) if (j + k) in bd_c)
    A = A_ss + len(boundary(J) - J_rho)
    B = _chain_weight(J, J_rho) - _chain_weight(J & J_rho, J_rho)
    return Exponents(A_ss, A, B)


def d_exponent_vector(J: SubsetJ, J_rho: SubsetJ) -> dict[int, int]:
    """Exponent of each d_j (j outside J_rho) in the d-factor of U_p(J)."""
    _require_proper(J_rho, "d exponents")
    out = {j: 0 for j in range(J.f) if j not in J_rho}
    for j in J - J_rho:
        out[j] -= 1
    for sign, start in ((1, J), (-1, J & J_rho)):
        for K in delta_chain(start, J_rho):
            for j in K.shift(-1) - J_rho:
                out[j] += sign
    return out


# Second route: j lies in delta_ss^i(J) exactly when j+i is in J and
# j, j+1, ..., j+i-1 all lie in J_rho.

@lru_cache(maxsize=None)
def _runs_cached(bits: int, rho_bits: int, f: int) -> tuple[SubsetJ, ...]:
    J, J_rho = SubsetJ(bits, f), SubsetJ(rho_bits, f)
    chain = []
    i = 0
    while True:
        K = SubsetJ.of(
            (j for j in range(f)
             if (j + i) in J and all((j + s) in J_rho for s in range(i))),
            f,
        )
        if not K:
            return tuple(chain)
        chain.append(K)
        i += 1


def delta_chain_via_runs(J: SubsetJ, J_rho: SubsetJ) -> list[SubsetJ]:
    _require_proper(J_rho, "delta chain")
    return list(_runs_cached(J.bits, J_rho.bits, J.f))


def exponents_via_runs(J: SubsetJ, J_rho: SubsetJ) -> Exponents:
    """A_ss, A, B recomputed by per-index run lengths instead of intervals."""
    _require_proper(J_rho, "exponents")
    f = J.f
    bd_c = complement_boundary(J)
    A_ss = sum(1 for j in J_rho if (j + run_length(j, J_rho)) in bd_c)
    A = A_ss + sum(1 for j in range(f) if j not in J_rho and j in J and (j + 1) not in J)
    # |delta^i(J)| summed over i equals the number of (j, i) pairs, which is
    # the sum over j in J of 1 + (length of the J_rho run ending at j - 1)
    def total(K: SubsetJ) -> tuple[int, int]:
        size = depth = 0
        for j in K:
            back = 0
            while back < f and (j - 1 - back) in J_rho:
                back += 1
            size += back + 1
            depth = max(depth, back + 1)
        return size, depth

    size, depth = total(J)
    size_ss, depth_ss = total(J & J_rho)
    B = (f * depth - 2 * size) - (f * depth_ss - 2 * size_ss)
    return Exponents(A_ss, A, B)


def d_exponent_vector_via_runs(J: SubsetJ, J_rho: SubsetJ) -> dict[int, int]:
    """M(J)_j = [j + k(j) + 1 in J] - [j in J] for j outside J_rho."""
    _require_proper(J_rho, "d exponents")
    return {
        j: int((j + run_length(j, J_rho) + 1) in J) - int(j in J)
        for j in range(J.f)
        if j not in J_rho
    }
