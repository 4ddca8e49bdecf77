"""Parameter instances: validation, sampling, serialization and mutation."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from sympy import isprime, nextprime

from .combinatorics import SubsetJ
from .fields import FiniteField, FqElem, get_field

__all__ = [
    "ParamSet",
    "ParamError",
    "ValidationReport",
    "load_params",
    "minimal_strict_prime",
    "mutate",
    "sample",
    "strict_window",
    "validate",
]


class ParamError(ValueError):
    pass


def strict_window(p: int, f: int) -> tuple[int, int]:
    """Inclusive bounds on each r_j in strict-generic mode (may be empty)."""
    return max(12, 2 * f + 1), p - max(15, 2 * f + 3)


def minimal_strict_prime(f: int) -> int:
    lo = max(12, 2 * f + 1) + max(15, 2 * f + 3)
    return lo if isprime(lo) else nextprime(lo)


@dataclass(frozen=True)
class ParamSet:
    p: int
    f: int
    e: int
    r: tuple[int, ...]
    J_rho: SubsetJ
    beta: FqElem
    d: tuple[FqElem, ...]

    def __post_init__(self):
        if not isprime(self.p):
            raise ParamError(f"p={self.p} is not prime")
        if self.f < 1 or self.e < 1 or self.e % self.f:
            raise ParamError(f"need f >= 1 and f | e, got f={self.f}, e={self.e}")
        if len(self.r) != self.f or len(self.d) != self.f or self.J_rho.f != self.f:
            raise ParamError("r, d and J_rho must all have length f")
        F = self.F
        for x in (self.beta, *self.d):
            if x.field is not F:
                raise ParamError(f"{x!r} is not an element of {F}")
        if not self.beta:
            raise ParamError("beta must be nonzero")

    @property
    def F(self) -> FiniteField:
        return get_field(self.p, self.e)

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def xi(self) -> FqElem:
        return self.beta**self.f

    @classmethod
    def build(cls, p, f, r, J_rho, beta, d, e=None) -> "ParamSet":
        """Convenience constructor accepting ints / coefficient lists."""
        e = f if e is None else e
        if not isprime(p):
            raise ParamError(f"p={p} is not prime")
        if f < 1 or e < 1:
            raise ParamError(f"need f, e >= 1, got f={f}, e={e}")
        F = get_field(p, e)
        if not isinstance(J_rho, SubsetJ):
            J_rho = SubsetJ.of(J_rho, f)
        return cls(p, f, e, tuple(r), J_rho, F(beta), tuple(F(x) for x in d))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "f": self.f,
            "e": self.e,
            "r": list(self.r),
            "J_rho": self.J_rho.to_list(),
            "beta": self.beta.to_json(),
            "d": [x.to_json() for x in self.d],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ParamSet":
        try:
            return cls.build(
                data["p"], data["f"], data["r"], data["J_rho"],
                data["beta"], data["d"], data.get("e"),
            )
        except KeyError as exc:
            raise ParamError(f"parameter profile is missing {exc}") from None

    def params_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def with_J_rho(self, J_rho: SubsetJ) -> "ParamSet":
        return replace(self, J_rho=J_rho)


def load_params(path: str | Path) -> ParamSet:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParamError(f"cannot read parameter profile {path}: {exc}") from None
    return ParamSet.from_json(data)


@dataclass
class ValidationReport:
    mode: str
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_if_invalid(self) -> None:
        if self.errors:
            raise ParamError("; ".join(self.errors))


def validate(params: ParamSet, mode: str = "strict") -> ValidationReport:
    if mode not in ("strict", "relaxed"):
        raise ValueError(f"unknown mode {mode!r}")
    report = ValidationReport(mode)
    p, f = params.p, params.f
    for j in range(f):
        in_rho = j in params.J_rho
        if in_rho != (not params.d[j]):
            report.errors.append(
                f"d/J_rho coupling violated at j={j}: d_j {'=' if not params.d[j] else '!='} 0"
                f" but j {'in' if in_rho else 'not in'} J_rho"
            )
    lo, hi = strict_window(p, f) if mode == "strict" else (1, p - 2)
    for j, rj in enumerate(params.r):
        if rj < lo:
            report.errors.append(f"r_{j}={rj} below lower bound {lo} ({mode})")
        if rj > hi:
            report.errors.append(f"r_{j}={rj} above upper bound {hi} ({mode})")
    return report


def _rng(seed: int, *salt) -> random.Random:
    return random.Random(":".join(map(str, (seed, *salt))))


def sample(p: int, f: int, J_rho: SubsetJ | list[int], seed: int,
           e: int | None = None, mode: str = "strict") -> ParamSet:
    """Deterministic pseudorandom ParamSet for (p, f, J_rho, seed)."""
    if not isprime(p):
        raise ParamError(f"p={p} is not prime")
    e = f if e is None else e
    if f < 1 or e < 1 or e % f:
        raise ParamError(f"need f >= 1 and f | e, got f={f}, e={e}")
    if not isinstance(J_rho, SubsetJ):
        J_rho = SubsetJ.of(J_rho, f)
    lo, hi = strict_window(p, f) if mode == "strict" else (1, p - 2)
    if lo > hi:
        raise ParamError(
            f"strict window for p={p}, f={f} is empty ({lo} > {hi}); "
            f"minimal admissible p is {minimal_strict_prime(f)}"
        )
    F = get_field(p, e)
    rng = _rng(seed, p, f, e, J_rho.bits)
    r = tuple(rng.randint(lo, hi) for _ in range(f))
    beta = F.random(rng, nonzero=True)
    d = tuple(F.zero() if j in J_rho else F.random(rng, nonzero=True) for j in range(f))
    return ParamSet(p, f, e, r, J_rho, beta, d)


MUTATIONS = ("d", "r")


def mutate(params: ParamSet, kind: str) -> ParamSet:
    """Single-parameter perturbation used for negative controls.

    "d" rescales the first d_j with j outside J_rho by 2; "r" bumps r_0 by one.
    """
    if kind == "d":
        for j, dj in enumerate(params.d):
            if dj:
                d = list(params.d)
                d[j] = dj * 2
                return replace(params, d=tuple(d))
        raise ParamError("no nonzero d_j to perturb (J_rho is everything)")
    if kind == "r":
        return replace(params, r=(params.r[0] + 1,) + params.r[1:])
    raise ParamError(f"unknown parameter mutation {kind!r}")
