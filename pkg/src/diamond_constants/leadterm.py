"""Leading terms of U_p for the Kisin modules over R_0.

R_0 is O[[X_j, Y_j, Z_j, Z'_j]] modulo Y_j (j outside J_rho) and
X_j Y_j - p (j in J_rho).  Elements that show up as U_p factors are, up to a
1-unit, monomials p^a * sign * beta^b * prod d_j^e * prod X_j^x Y_j^y, and the
Monomial class below is exactly that quotient.

Two routes compute U_p(chi_J):

* the per-embedding case table (up_chi_factor / up_chi_class), and
* a symbolic route that builds A = D A' with sympy, takes the relevant
  diagonal entry mod v and reads off its class (kisin_up_class).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import sympy

from .combinatorics import (
    SubsetJ,
    d_exponent_vector,
    delta_chain,
    exponents,
)
from .fields import FqElem
from .params import ParamSet

__all__ = [
    "CancellationFailure",
    "IllegalWeylPair",
    "KisinMatrices",
    "Monomial",
    "UP_CASES",
    "UpReport",
    "bar_A_table",
    "build_kisin",
    "check_bar_A",
    "check_character_lemma",
    "etale_phi_matrix",
    "kisin_up_class",
    "star_w_wprime",
    "tilde_up",
    "up_case",
    "up_chi_class",
    "up_chi_factor",
    "verify_up_closed",
]


class CancellationFailure(ArithmeticError):
    """X/Y exponents survived in a quantity that must be free of them."""


class IllegalWeylPair(ValueError):
    pass


def _clean(m: dict[int, int]) -> dict[int, int]:
    return {j: e for j, e in sorted(m.items()) if e}


def _add(a: dict[int, int], b: dict[int, int], sign: int = 1) -> dict[int, int]:
    out = dict(a)
    for j, e in b.items():
        out[j] = out.get(j, 0) + sign * e
    return _clean(out)


@dataclass(frozen=True)
class Monomial:
    """sign * p^p_exp * beta^beta_exp * prod d_j^.. * prod X_j^.. Y_j^.. mod 1-units."""

    sign: int = 1
    p_exp: int = 0
    beta_exp: int = 0
    d_exp: dict[int, int] = field(default_factory=dict)
    X_exp: dict[int, int] = field(default_factory=dict)
    Y_exp: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        for name in ("d_exp", "X_exp", "Y_exp"):
            object.__setattr__(self, name, _clean(getattr(self, name)))

    def _key(self):
        return (self.sign, self.p_exp, self.beta_exp,
                tuple(self.d_exp.items()), tuple(self.X_exp.items()), tuple(self.Y_exp.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Monomial):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(
            self.sign * other.sign,
            self.p_exp + other.p_exp,
            self.beta_exp + other.beta_exp,
            _add(self.d_exp, other.d_exp),
            _add(self.X_exp, other.X_exp),
            _add(self.Y_exp, other.Y_exp),
        )

    def inv(self) -> "Monomial":
        neg = lambda m: {j: -e for j, e in m.items()}  # noqa: E731
        return Monomial(self.sign, -self.p_exp, -self.beta_exp,
                        neg(self.d_exp), neg(self.X_exp), neg(self.Y_exp))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inv()

    def __pow__(self, n: int) -> "Monomial":
        out = Monomial()
        base = self if n >= 0 else self.inv()
        for _ in range(abs(n)):
            out = out * base
        return out

    def reduce_step(self, j: int) -> "Monomial":
        """One application of X_j Y_j = p (or its inverse) at index j."""
        x, y = self.X_exp.get(j, 0), self.Y_exp.get(j, 0)
        if x > 0 and y > 0:
            step = 1
        elif x < 0 and y < 0:
            step = -1
        else:
            return self
        return Monomial(self.sign, self.p_exp + step, self.beta_exp, self.d_exp,
                        _add(self.X_exp, {j: step}, -1), _add(self.Y_exp, {j: step}, -1))

    def reduce(self, order=None) -> "Monomial":
        """Apply X_j Y_j -> p until no index carries both X_j and Y_j with one sign.

        `order` lists indices to visit; the result does not depend on it.
        """
        out = self
        indices = list(order) if order is not None else sorted(set(self.X_exp) | set(self.Y_exp))
        changed = True
        while changed:
            changed = False
            for j in indices:
                nxt = out.reduce_step(j)
                if nxt is not out:
                    out, changed = nxt, True
        return out

    def has_XY(self) -> bool:
        return bool(self.X_exp or self.Y_exp)

    def evaluate(self, params: ParamSet) -> FqElem:
        """The F-valued class sign * beta^b * prod d_j^e, forgetting the power of p."""
        if self.has_XY():
            raise CancellationFailure(f"cannot evaluate {self} in F: X/Y exponents remain")
        val = params.F(self.sign) * params.beta**self.beta_exp
        for j, e in self.d_exp.items():
            val = val * params.d[j] ** e
        return val

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "p": self.p_exp,
            "beta": self.beta_exp,
            "d": {str(j): e for j, e in self.d_exp.items()},
            "X": {str(j): e for j, e in self.X_exp.items()},
            "Y": {str(j): e for j, e in self.Y_exp.items()},
        }

    def __repr__(self) -> str:
        parts = ["-1" if self.sign < 0 else "1"]
        if self.p_exp:
            parts.append(f"p^{self.p_exp}")
        if self.beta_exp:
            parts.append(f"b^{self.beta_exp}")
        parts += [f"d{j}^{e}" for j, e in self.d_exp.items()]
        parts += [f"X{j}^{e}" for j, e in self.X_exp.items()]
        parts += [f"Y{j}^{e}" for j, e in self.Y_exp.items()]
        return "Monomial(" + "*".join(parts) + ")"


# The per-embedding table.  [beta^-2 d_j] contributes beta^-2 d_j.

def _c(j: int) -> Monomial:
    return Monomial(beta_exp=-2, d_exp={j: 1})


UP_CASES = {
    "both": lambda j: Monomial(),
    "Y": lambda j: Monomial(Y_exp={j: 1}),
    "-X": lambda j: Monomial(sign=-1, X_exp={j: 1}),
    "-c^-1": lambda j: Monomial(sign=-1) * _c(j).inv(),
    "c": lambda j: _c(j),
}


def up_case(J: SubsetJ, j: int, J_rho: SubsetJ) -> str:
    here, nxt = j in J, (j + 1) in J
    if here == nxt:
        return "both"
    if j in J_rho:
        return "Y" if here else "-X"
    return "-c^-1" if here else "c"


def up_chi_factor(J: SubsetJ, j: int, J_rho: SubsetJ, perturb: str | None = None) -> Monomial:
    """U_p(chi_J)'_j.  `perturb` names a case whose sign is flipped (negative control)."""
    case = up_case(J, j, J_rho)
    m = UP_CASES[case](j)
    if perturb == case:
        m = m * Monomial(sign=-1)
    return m


def up_chi_class(J: SubsetJ, J_rho: SubsetJ, perturb: str | None = None) -> Monomial:
    """U_p(chi_J) modulo 1-units and powers of p, via the case table."""
    out = Monomial(beta_exp=J.f - 2 * len(J))
    for j in range(J.f):
        out = out * up_chi_factor(J, j, J_rho, perturb)
    return out


def tilde_up(J: SubsetJ, J_rho: SubsetJ, perturb: str | None = None, order=None) -> Monomial:
    """Chain ratio prod U_p(chi_K), K over the chain of J, divided by the same for J^ss."""
    if J_rho.is_full():
        raise ValueError("the U_p chain ratio needs J_rho to be a proper subset")
    out = Monomial()
    for K in delta_chain(J, J_rho):
        out = out * up_chi_class(K, J_rho, perturb)
    for K in delta_chain(J & J_rho, J_rho):
        out = out / up_chi_class(K, J_rho, perturb)
    out = out.reduce(order)
    if out.has_XY():
        raise CancellationFailure(f"cancellation failure for J={J}, J_rho={J_rho}: {out}")
    return out


@dataclass
class UpReport:
    J: SubsetJ
    ok: bool
    lhs: dict
    rhs: dict
    details: str = ""


def verify_up_closed(J: SubsetJ, params: ParamSet, perturb: str | None = None,
                     oracle_params: ParamSet | None = None) -> UpReport:
    """Compare the reduced chain ratio with (-1)^A beta^B d(J).

    Exponents are compared symbolically and the two classes are also compared
    as elements of F.  `oracle_params` (default: params) is used for the
    closed-form side only, so a perturbed copy acts as a negative control.
    """
    R = params.J_rho
    oracle_params = oracle_params or params
    try:
        lhs = tilde_up(J, R, perturb)
    except CancellationFailure as exc:
        return UpReport(J, False, {}, {}, str(exc))
    ex = exponents(J, R)
    dvec = {j: e for j, e in d_exponent_vector(J, R).items() if e}
    sign = -1 if ex.A % 2 else 1
    rhs_val = oracle_params.F(sign) * oracle_params.beta**ex.B
    for j, e in dvec.items():
        rhs_val = rhs_val * oracle_params.d[j] ** e
    lhs_val = lhs.evaluate(params)
    problems = []
    if lhs.sign != sign:
        problems.append(f"sign {lhs.sign} != (-1)^A = {sign}")
    if lhs.beta_exp != ex.B:
        problems.append(f"beta exponent {lhs.beta_exp} != B = {ex.B}")
    if lhs.d_exp != dvec:
        problems.append(f"d exponents {lhs.d_exp} != {dvec}")
    if lhs_val != rhs_val:
        problems.append(f"value {lhs_val} != {rhs_val}")
    return UpReport(
        J,
        not problems,
        {"monomial": lhs.to_json(), "value": lhs_val.to_json()},
        {"A": ex.A, "B": ex.B, "d": {str(j): e for j, e in dvec.items()},
         "value": rhs_val.to_json()},
        "; ".join(problems),
    )


# Symbolic Kisin matrices

ID, SWAP = "id", "w"

v, p_sym, b_sym = sympy.symbols("v p b")


def _syms(j: int):
    return sympy.symbols(f"X{j} Y{j} Z{j} Zp{j} c{j}")


def star_w_wprime(J: SubsetJ, J_rho: SubsetJ) -> tuple[list[str], list[str], list[str]]:
    """(s*, w, w') attached to J, with w_j = s*_j s*_{j-1}."""
    f = J.f
    s_star = [SWAP if (j + 1) in J else ID for j in range(f)]
    w = [ID if s_star[j] == s_star[j - 1] else SWAP for j in range(f)]
    wp = [
        ID if ((j not in J and (j + 1) not in J) or (j in J and (j + 1) in J and j not in J_rho))
        else SWAP
        for j in range(f)
    ]
    return s_star, w, wp


@dataclass(frozen=True)
class KisinMatrices:
    """Per-embedding A^{(f-1-j)} = D A' over R_0[[v]] (sympy), keyed by j."""

    w: tuple[str, ...]
    w_prime: tuple[str, ...]
    J_rho: SubsetJ
    D: tuple[sympy.Matrix, ...]
    A_prime: tuple[sympy.Matrix, ...]

    def A(self, j: int) -> sympy.Matrix:
        return (self.D[j] * self.A_prime[j]).expand()

    def reduction(self, j: int) -> sympy.Matrix:
        """A mod (m_0, p), with [x] read as x."""
        X, Y, Z, Zp, _ = _syms(j)
        return self.A(j).subs({X: 0, Y: 0, Z: 0, Zp: 0, p_sym: 0}).applyfunc(sympy.simplify)


def _a_prime(wj: str, wpj: str, in_rho: bool, j: int) -> sympy.Matrix:
    X, Y, _, _, c = _syms(j)
    if not in_rho:
        Y = sympy.Integer(0)
    # c stands for the Teichmuller lift [beta^-2 d_j]; it vanishes on J_rho
    c = sympy.Integer(0) if in_rho else c
    if (wj, wpj) == (ID, ID):
        return sympy.Matrix([[v + p_sym, 0], [(X - c) * v, 1]])
    if (wj, wpj) == (ID, SWAP):
        return sympy.Matrix([[1, -Y], [0, v + p_sym]])
    if in_rho:
        return sympy.Matrix([[-Y, 1], [v, X]])
    return sympy.Matrix([[-p_sym / (X - c), 1], [v, X - c]])


def build_kisin(J_or_pair, J_rho: SubsetJ) -> KisinMatrices:
    """Kisin matrices for a subset J, or for an explicit pair (w, w')."""
    if isinstance(J_or_pair, SubsetJ):
        _, w, wp = star_w_wprime(J_or_pair, J_rho)
    else:
        w, wp = map(list, J_or_pair)
    f = J_rho.f
    if len(w) != f or len(wp) != f:
        raise IllegalWeylPair("w and w' need one entry per embedding")
    D, Ap = [], []
    for j in range(f):
        if (w[j], wp[j]) == (SWAP, ID):
            raise IllegalWeylPair(f"(w_{j}, w'_{j}) = (w, id) is not allowed")
        if (w[j], wp[j]) == (ID, SWAP) and j not in J_rho:
            raise IllegalWeylPair(f"(w_{j}, w'_{j}) = (id, w) needs {j} in J_rho")
        _, _, Z, Zp, _ = _syms(j)
        D.append(sympy.diag(Zp + 1 / b_sym, Z + b_sym))
        Ap.append(_a_prime(w[j], wp[j], j in J_rho, j))
    return KisinMatrices(tuple(w), tuple(wp), J_rho, tuple(D), tuple(Ap))


def etale_phi_matrix(j: int, r_j: int, in_rho: bool) -> sympy.Matrix:
    """Mat(phi^{(f-1-j)}) of the mod p etale phi-module, with c = beta^-2 d_j."""
    c = sympy.Integer(0) if in_rho else _syms(j)[4]
    return sympy.diag(1 / b_sym, b_sym) * sympy.Matrix([[v ** (r_j + 1), 0], [-c * v ** (r_j + 1), 1]])


def bar_A_table(wj: str, wpj: str, j: int, in_rho: bool) -> sympy.Matrix:
    """The tabulated reductions A-bar."""
    c = sympy.Integer(0) if in_rho else _syms(j)[4]
    D = sympy.diag(1 / b_sym, b_sym)
    if (wj, wpj) == (ID, ID):
        return D * sympy.Matrix([[v, 0], [-c * v, 1]])
    if (wj, wpj) == (ID, SWAP):
        return D * sympy.Matrix([[1, 0], [0, v]])
    return D * sympy.Matrix([[0, 1], [v, -c]])


def check_bar_A(wj: str, wpj: str, j: int, in_rho: bool, r_j: int = 13) -> list[str]:
    """Check that both A mod (m_0, p) and Mat(phi) v^-(mu - w' eta) w-dot give the table."""
    problems = []
    R = SubsetJ.of([j] if in_rho else [], j + 1)
    pair = ([ID] * j + [wj], [ID] * j + [wpj])
    expected = bar_A_table(wj, wpj, j, in_rho)
    got = build_kisin(pair, R).reduction(j)
    if (got - expected).applyfunc(sympy.simplify) != sympy.zeros(2, 2):
        problems.append(f"A mod m_0 is {got.tolist()}, table says {expected.tolist()}")
    shift = (r_j, 0) if wpj == ID else (r_j + 1, -1)
    wdot = sympy.eye(2) if wj == ID else sympy.Matrix([[0, 1], [1, 0]])
    via_phi = etale_phi_matrix(j, r_j, in_rho) * sympy.diag(v ** -shift[0], v ** -shift[1]) * wdot
    if (via_phi - expected).applyfunc(sympy.simplify) != sympy.zeros(2, 2):
        problems.append(f"Mat(phi) v^-(mu-w'eta) w gives {via_phi.tolist()}")
    return problems


def check_character_lemma(J: SubsetJ, params: ParamSet) -> list[str]:
    """lambda_J - (s*)^{-1}(mu - w' eta) equals (p e^{J-1} - e^J, 0) entrywise."""
    from .weights import s_vector, t_vector

    s_star, _, wp = star_w_wprime(J, params.J_rho)
    s, t = s_vector(J, params), t_vector(J, params)
    problems = []
    for j in range(params.f):
        lam = (s[j] + t[j], t[j])
        mu_w = (params.r[j], 0) if wp[j] == ID else (params.r[j] + 1, -1)
        rhs = mu_w if s_star[j] == ID else (mu_w[1], mu_w[0])
        want = (params.p * int((j + 1) in J) - int(j in J), 0)
        diff = (lam[0] - rhs[0], lam[1] - rhs[1])
        if diff != want:
            problems.append(f"j={j}: difference {diff}, expected {want}")
    return problems


def _classify(expr, j: int, in_rho: bool) -> Monomial:
    """Class of a nonzero element of R_0[1/p] (given in sympy) modulo 1-units."""
    X, Y, Z, Zp, c = _syms(j)
    m0 = {Z: 0, Zp: 0}
    if not in_rho:
        m0[X] = 0
    out = Monomial()
    for factor in sympy.Mul.make_args(sympy.factor(sympy.together(expr))):
        base, e = factor.as_base_exp()
        if isinstance(base, sympy.Add):
            # a sum is its value at the maximal ideal times a 1-unit
            base = base.subs(m0)
            if base == 0:
                raise ArithmeticError(f"{expr} is not a unit times a monomial")
        for atom, k in _powers(sympy.factor(base) ** e).items():
            out = out * _atom_monomial(atom, k, j)
    return out


def _powers(expr) -> dict:
    out: dict = {}
    for factor in sympy.Mul.make_args(expr):
        base, e = factor.as_base_exp()
        if base.is_Integer:
            n = int(base)
            if n < 0:
                out[sympy.Integer(-1)] = out.get(sympy.Integer(-1), 0) + e
            for prime, m in sympy.factorint(abs(n)).items():
                out[sympy.Integer(prime)] = out.get(sympy.Integer(prime), 0) + m * e
            continue
        out[base] = out.get(base, 0) + e
    return out


def _atom_monomial(atom, k, j: int) -> Monomial:
    X, Y, _, _, c = _syms(j)
    k = int(k)
    if atom == -1:
        return Monomial(sign=-1 if k % 2 else 1)
    if atom == p_sym:
        return Monomial(p_exp=k)
    if atom == b_sym:
        return Monomial(beta_exp=k)
    if atom == c:
        return Monomial(beta_exp=-2 * k, d_exp={j: k})
    if atom == X:
        return Monomial(X_exp={j: k})
    if atom == Y:
        return Monomial(Y_exp={j: k})
    raise ArithmeticError(f"unexpected factor {atom} in a U_p entry")


def _clear_inverse_XY(m: Monomial) -> Monomial:
    """Rewrite X_j^-1 as Y_j / p and Y_j^-1 as X_j / p, then reduce."""
    X, Y, p_exp = dict(m.X_exp), dict(m.Y_exp), m.p_exp
    for j in set(X) | set(Y):
        x, y = X.get(j, 0), Y.get(j, 0)
        if x < 0:
            Y[j], X[j], p_exp = y - x, 0, p_exp + x
        elif y < 0:
            X[j], Y[j], p_exp = x - y, 0, p_exp + y
    return Monomial(m.sign, p_exp, m.beta_exp, m.d_exp, X, Y).reduce()


@lru_cache(maxsize=None)
def _kisin_factor(J: SubsetJ, J_rho: SubsetJ, j: int) -> Monomial:
    s_star, w, wp = star_w_wprime(J, J_rho)
    K = build_kisin((w, wp), J_rho)
    k = 0 if s_star[j - 1] == ID else 1
    U = p_sym / K.A(j)[k, k].subs(v, 0)
    return _clear_inverse_XY(_classify(U, j, j in J_rho))


def kisin_up_class(J: SubsetJ, J_rho: SubsetJ) -> Monomial:
    """U_p(chi_J) modulo 1-units, read off the symbolic Kisin matrices.

    Powers of p are kept; compare with up_chi_class after dropping them.
    """
    out = Monomial()
    for j in range(J.f):
        out = out * _kisin_factor(J, J_rho, j)
    return out
