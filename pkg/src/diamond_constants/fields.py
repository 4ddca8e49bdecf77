"""Exact arithmetic in the finite fields F_p and F_{p^e}.

Elements are coefficient vectors over F_p with respect to a canonical monic
irreducible modulus, so encodings are stable across runs.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from sympy import factorint, isprime

__all__ = [
    "FiniteField",
    "FqElem",
    "canonical_modulus",
    "check_factorial_identity",
    "factorial_mod_p",
    "frobenius",
    "get_field",
    "is_irreducible",
]


# Dense polynomials over F_p, low degree first, no trailing zeros.

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _trim(a)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _poly_powmod(base: list[int], n: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, m, p)
    while n:
        if n & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        n >>= 1
    return result


def is_irreducible(m: list[int] | tuple[int, ...], p: int) -> bool:
    """Ben-Or test: m is irreducible iff gcd(x^{p^i} - x, m) = 1 for i <= deg/2."""
    m = _trim([c % p for c in m])
    deg = len(m) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(deg // 2):
        power = _poly_powmod(power, p, m, p)
        if len(_poly_gcd(m, _poly_sub(power, x, p), p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def canonical_modulus(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over F_p.

    Returned as coefficients low degree first, including the leading 1.
    Candidates are ordered by (c_0, c_1, ..., c_{e-1}).
    """
    if e < 1:
        raise ValueError("degree must be at least 1")
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    # for e > 1 a zero constant term means x | m, so that block is skipped
    first = range(p) if e == 1 else range(1, p)
    for low in itertools.product(first, *[range(p)] * (e - 1)):
        m = list(low) + [1]
        if is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("an irreducible polynomial always exists")


class FiniteField:
    """The field F_{p^e} = F_p[x]/(m) for the canonical modulus m."""

    def __init__(self, p: int, e: int = 1):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = canonical_modulus(p, e)
        # x^k mod m for e <= k <= 2e-2, used to fold products back down
        self._fold = []
        for k in range(e, 2 * e - 1):
            mono = [0] * k + [1]
            red = _poly_mod(mono, list(self.modulus), p)
            self._fold.append(red + [0] * (e - len(red)))
        self._log: dict[int, int] | None = None
        self._exp: list[FqElem] | None = None

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, e={self.e})"

    def __reduce__(self):
        return (get_field, (self.p, self.e))

    def __call__(self, value) -> "FqElem":
        if isinstance(value, FqElem):
            if value.field is not self:
                raise ValueError(f"element of {value.field} is not in {self}")
            return value
        if isinstance(value, int):
            return FqElem(self, (value % self.p,) + (0,) * (self.e - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.e:
            raise ValueError(f"expected at most {self.e} coefficients")
        return FqElem(self, tuple(coeffs + [0] * (self.e - len(coeffs))))

    def zero(self) -> "FqElem":
        return self(0)

    def one(self) -> "FqElem":
        return self(1)

    def gen(self) -> "FqElem":
        """The class of x, a root of the modulus."""
        if self.e == 1:
            return self(-self.modulus[0])
        return self([0, 1])

    def from_int(self, code: int) -> "FqElem":
        """Inverse of FqElem.to_int: base-p digits are the coefficients."""
        digits = []
        for _ in range(self.e):
            code, d = divmod(code, self.p)
            digits.append(d)
        return FqElem(self, tuple(digits))

    def elements(self):
        for code in range(self.q):
            yield self.from_int(code)

    def random(self, rng: random.Random, nonzero: bool = False) -> "FqElem":
        lo = 1 if nonzero else 0
        return self.from_int(rng.randrange(lo, self.q))

    def _mul_coeffs(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        e, p = self.e, self.p
        if e == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        out = prod[:e]
        for k, fold in enumerate(self._fold):
            c = prod[e + k]
            if c:
                for i in range(e):
                    out[i] += c * fold[i]
        return tuple(c % p for c in out)

    @lru_cache(maxsize=None)
    def primitive_element(self) -> "FqElem":
        order = self.q - 1
        primes = list(factorint(order)) if order > 1 else []
        for code in range(1, self.q):
            g = self.from_int(code)
            if all(g ** (order // ell) != self.one() for ell in primes):
                return g
        raise AssertionError("the multiplicative group is cyclic")

    def _tables(self) -> tuple[dict[int, int], list["FqElem"]]:
        if self._exp is None:
            g = self.primitive_element()
            exp, x = [], self.one()
            for _ in range(self.q - 1):
                exp.append(x)
                x = x * g
            self._exp = exp
            self._log = {y.to_int(): k for k, y in enumerate(exp)}
        return self._log, self._exp

    def log(self, x: "FqElem") -> int:
        """Discrete log to the base primitive_element()."""
        if not x:
            raise ZeroDivisionError("log of zero")
        return self._tables()[0][x.to_int()]

    def exp(self, k: int) -> "FqElem":
        return self._tables()[1][k % (self.q - 1)]


@lru_cache(maxsize=None)
def get_field(p: int, e: int = 1) -> FiniteField:
    return FiniteField(p, e)


class FqElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other) -> "FqElem | None":
        if isinstance(other, FqElem):
            if other.field is not self.field:
                raise ValueError("operands live in different fields")
            return other
        if isinstance(other, int):
            return self.field(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FqElem(self.field, self.field._mul_coeffs(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def inv(self) -> "FqElem":
        if not self:
            raise ZeroDivisionError("division by zero")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, n: int) -> "FqElem":
        if not self:
            if n <= 0:
                raise ZeroDivisionError("division by zero")
            return self
        n %= self.field.q - 1
        result, base = self.field.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def frobenius(self, j: int = 1) -> "FqElem":
        return self ** (self.field.p ** (j % self.field.e))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.field(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.e, self.coeffs))

    def is_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        p = self.field.p
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    def __int__(self) -> int:
        if not self.is_prime_field():
            raise ValueError(f"{self} is not in the prime field")
        return self.coeffs[0]

    def __repr__(self) -> str:
        if self.field.e == 1:
            return f"{self.coeffs[0]} (mod {self.field.p})"
        terms = [f"{c}*x^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def frobenius(x: FqElem, j: int) -> FqElem:
    """The arithmetic Frobenius x -> x^p applied j times."""
    return x.frobenius(j)


def factorial_mod_p(n: int, p: int) -> int:
    if not 0 <= n <= p - 1:
        raise ValueError(f"factorial_mod_p needs 0 <= n <= p-1, got n={n}, p={p}")
    return _factorials(p)[n]


@lru_cache(maxsize=None)
def _factorials(p: int) -> tuple[int, ...]:
    out = [1]
    for k in range(1, p):
        out.append(out[-1] * k % p)
    return tuple(out)


def check_factorial_identity(p: int) -> bool:
    """((p-1-r)!)^{-1} == (-1)^{r+1} r! mod p for every 0 <= r <= p-1."""
    for r in range(p):
        lhs = pow(factorial_mod_p(p - 1 - r, p), -1, p)
        rhs = (-1) ** (r + 1) * factorial_mod_p(r, p) % p
        if lhs != rhs:
            return False
    return True
