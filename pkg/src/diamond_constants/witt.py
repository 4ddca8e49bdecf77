"""Truncated unramified Witt vectors W(F_q)/p^N.

The ring is realized as (Z/p^N)[x]/(m) where m is the coefficient-wise
minimal lift of the canonical modulus of F_q.  This is valid because the
extension is unramified.
"""

from __future__ import annotations

from functools import lru_cache

from .fields import FqElem, canonical_modulus, get_field

__all__ = [
    "PrecisionExhausted",
    "WittElem",
    "WittRing",
    "get_witt_ring",
    "leading_term",
    "precision_for_product",
    "teichmuller",
    "valuation",
]


class PrecisionExhausted(ArithmeticError):
    """The element is zero modulo p^N, so its valuation is not certified."""


def precision_for_product(f: int, n: int) -> int:
    """Working precision for an n-fold product of S-operators over F_{p^f}."""
    return f * (n + 2) + 2


class WittRing:
    def __init__(self, p: int, f: int, N: int):
        if N < 1:
            raise ValueError("precision N must be at least 1")
        self.p, self.f, self.N = p, f, N
        self.q = p**f
        self.pN = p**N
        self.residue_field = get_field(p, f)
        self.modulus = canonical_modulus(p, f)
        # x^k mod m over Z/p^N for f <= k <= 2f-2
        self._fold = []
        for k in range(f, 2 * f - 1):
            self._fold.append(self._reduce_monomial(k))

    def _reduce_monomial(self, k: int) -> list[int]:
        poly = [0] * k + [1]
        m, f = self.modulus, self.f
        for top in range(k, f - 1, -1):
            c = poly[top]
            if c:
                for i in range(f + 1):
                    poly[top - f + i] -= c * m[i]
        return [c % self.pN for c in poly[:f]]

    def __repr__(self) -> str:
        return f"WittRing(p={self.p}, f={self.f}, N={self.N})"

    def __call__(self, value) -> "WittElem":
        if isinstance(value, WittElem):
            return value
        if isinstance(value, int):
            return WittElem(self, (value % self.pN,) + (0,) * (self.f - 1))
        coeffs = [int(c) % self.pN for c in value]
        return WittElem(self, tuple(coeffs + [0] * (self.f - len(coeffs))))

    def zero(self) -> "WittElem":
        return self(0)

    def one(self) -> "WittElem":
        return self(1)

    def lift(self, x: FqElem) -> "WittElem":
        """The coefficient-wise minimal lift of a residue."""
        return self(list(x.coeffs))

    def teichmuller(self, x: FqElem) -> "WittElem":
        return _teichmuller_cached(self.p, self.f, self.N, x.coeffs)

    def _mul_coeffs(self, a, b):
        f, pN = self.f, self.pN
        if f == 1:
            return (a[0] * b[0] % pN,)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        out = prod[:f]
        for k, fold in enumerate(self._fold):
            c = prod[f + k]
            if c:
                for i in range(f):
                    out[i] += c * fold[i]
        return tuple(c % pN for c in out)


@lru_cache(maxsize=None)
def get_witt_ring(p: int, f: int, N: int) -> WittRing:
    return WittRing(p, f, N)


@lru_cache(maxsize=None)
def _teichmuller_cached(p: int, f: int, N: int, coeffs: tuple[int, ...]) -> "WittElem":
    ring = get_witt_ring(p, f, N)
    x = ring(list(coeffs))
    # each x -> x^q step gains at least one p-adic digit
    for _ in range(N + 1):
        nxt = x ** ring.q
        if nxt == x:
            return x
        x = nxt
    raise AssertionError("Teichmuller iteration did not stabilize")


class WittElem:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: WittRing, coeffs: tuple[int, ...]):
        self.ring = ring
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, WittElem):
            if other.ring is not self.ring:
                raise ValueError("operands live in different Witt rings")
            return other
        if isinstance(other, int):
            return self.ring(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        pN = self.ring.pN
        return WittElem(self.ring, tuple((a + b) % pN for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.ring.pN
        return WittElem(self.ring, tuple(-a % pN for a in self.coeffs))

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
        return WittElem(self.ring, self.ring._mul_coeffs(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "WittElem":
        if n < 0:
            return self.inv() ** (-n)
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def reduce(self) -> FqElem:
        """Reduction modulo p."""
        return self.ring.residue_field([c % self.ring.p for c in self.coeffs])

    def valuation(self) -> int:
        """Largest v with p^v dividing self; N for zero (see valuation_checked)."""
        p = self.ring.p
        best = self.ring.N
        for c in self.coeffs:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                best = min(best, v)
        return best

    def valuation_checked(self) -> tuple[int, bool]:
        """(valuation, exhausted) where exhausted flags a zero element."""
        v = self.valuation()
        return v, not self

    def divide_by_p_power(self, v: int) -> "WittElem":
        """Exact division by p^v; the top v digits become unknown and are set to 0."""
        pv = self.ring.p**v
        if any(c % pv for c in self.coeffs):
            raise ArithmeticError(f"not divisible by p^{v}")
        return WittElem(self.ring, tuple(c // pv for c in self.coeffs))

    def inv(self) -> "WittElem":
        """Inverse of a unit via Newton iteration from the residue inverse."""
        if self.valuation() != 0:
            raise ZeroDivisionError("element is not a unit")
        y = self.ring.lift(self.reduce().inv())
        prec = 1
        while prec < self.ring.N:
            y = y * (2 - self * y)
            prec *= 2
        return y

    def leading_term(self) -> FqElem:
        if not self:
            raise PrecisionExhausted(f"element vanishes modulo p^{self.ring.N}")
        return self.divide_by_p_power(self.valuation()).reduce()

    def digits(self) -> list[list[int]]:
        """Base-p digit expansion of each coefficient (debug dump)."""
        p, N = self.ring.p, self.ring.N
        out = []
        for c in self.coeffs:
            ds = []
            for _ in range(N):
                c, d = divmod(c, p)
                ds.append(d)
            out.append(ds)
        return out

    def __repr__(self) -> str:
        return f"WittElem({list(self.coeffs)} mod {self.ring.p}^{self.ring.N})"


def teichmuller(lam: FqElem, N: int) -> WittElem:
    f = lam.field
    return get_witt_ring(f.p, f.e, N).teichmuller(lam)


def valuation(w: WittElem) -> int:
    return w.valuation()


def leading_term(w: WittElem) -> FqElem:
    return w.leading_term()
